use std::collections::BTreeMap;

use serde::Serialize;

use super::verify::{run_checks, CheckResult};
use super::{Format, PolicyChoice, RunConfig, ScenarioKind, EXIT_CHECK_FAILED, EXIT_NO_SOLUTION, EXIT_OK};
use crate::error::{Error, Result};
use crate::protocol::{
    baseline_same_count, encode_message, estimate, run_exchange, stat_bound, AnnouncementPolicy, MessageAngles,
    Scenario, StatBound, TallyTable,
};
use crate::qstate::{AlignmentAngle, ProbabilityTable};
use crate::recovery::{
    qutrit_state, recover_ghz3, recover_ghz3_linear_optics, recover_misaligned, recover_qubit_partner,
    recover_qudit3, ObservableKind, Observables, RecoveryResult,
};
use crate::rng::{child_seed, seeded};

/// Rendered report plus the exit code it should be returned with.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub code: i32,
    pub report: String,
    /// Short diagnostic for stderr, if any.
    pub message: Option<String>,
}

#[derive(Debug, Serialize)]
struct TallyEntry {
    rounds: u64,
    counts: BTreeMap<String, u64>,
    discarded: u64,
}

#[derive(Debug, Serialize)]
struct ObservableEntry {
    exact: f64,
    estimate: f64,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum RecoveryEntry {
    Solved(RecoveryResult),
    Failed { error: String, best_residual: Option<f64> },
}

impl RecoveryEntry {
    fn from_result(r: Result<RecoveryResult>) -> Result<Self> {
        match r {
            Ok(r) => Ok(RecoveryEntry::Solved(r)),
            Err(Error::NoSolution { best_residual }) => {
                Ok(RecoveryEntry::Failed { error: "no_solution".into(), best_residual: Some(best_residual) })
            }
            Err(e) => Err(e),
        }
    }

    fn failed(&self) -> bool {
        matches!(self, RecoveryEntry::Failed { .. })
    }
}

#[derive(Debug, Serialize)]
struct TrialEntry {
    trial: u64,
    seed: u64,
    tally: TallyEntry,
    estimates: BTreeMap<String, f64>,
    observables: BTreeMap<String, ObservableEntry>,
    recovery: RecoveryEntry,
}

#[derive(Debug, Serialize)]
struct ExchangeReport<'a> {
    config: &'a RunConfig,
    exact_probabilities: BTreeMap<String, f64>,
    observables: BTreeMap<String, ObservableEntry>,
    tally: TallyEntry,
    estimates: BTreeMap<String, f64>,
    bounds: BTreeMap<String, StatBound>,
    recovery: RecoveryEntry,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trials: Vec<TrialEntry>,
}

#[derive(Debug, Serialize)]
struct BaselineTrial {
    trial: u64,
    seed: u64,
    same: u64,
    fraction_same: f64,
}

#[derive(Debug, Serialize)]
struct BaselineReport<'a> {
    config: &'a RunConfig,
    expected_same: f64,
    same: u64,
    fraction_same: f64,
    bound: StatBound,
    /// `acos(sqrt(fraction_same))`
    recovered_alignment: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trials: Vec<BaselineTrial>,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    config: &'a RunConfig,
    passed: bool,
    checks: Vec<CheckResult>,
}

/// Runs the scenario described by `config` and renders its report.
pub fn run_command(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    match config.scenario {
        ScenarioKind::Verify => run_verify(config),
        ScenarioKind::Baseline => run_baseline(config),
        _ => run_exchange_like(config),
    }
}

struct Setup {
    scenario: Scenario,
    policy: AnnouncementPolicy,
    kind: ObservableKind,
}

fn qubit_angles(theta: f64, phi: f64) -> Result<MessageAngles> {
    MessageAngles::new(theta, phi)
}

fn setup(config: &RunConfig) -> Result<Setup> {
    let a = qubit_angles(config.theta_a, config.phi_a)?;
    let b = qubit_angles(config.theta_b, config.phi_b)?;
    Ok(match config.scenario {
        ScenarioKind::Exchange => Setup {
            scenario: Scenario::TwoParty { a: encode_message(&a), b: encode_message(&b) },
            policy: AnnouncementPolicy::linear_optics(2),
            kind: ObservableKind::TwoParty,
        },
        ScenarioKind::Misaligned => Setup {
            scenario: Scenario::Misaligned {
                a: encode_message(&a),
                b: encode_message(&b),
                theta: AlignmentAngle::new(config.alignment)?,
            },
            policy: AnnouncementPolicy::linear_optics(2),
            kind: ObservableKind::Misaligned,
        },
        ScenarioKind::Qudit3 => Setup {
            scenario: Scenario::Qudit {
                a: qutrit_state(config.theta_a, config.theta2_a, config.phi_a, config.phi2_a)?,
                b: qutrit_state(config.theta_b, config.theta2_b, config.phi_b, config.phi2_b)?,
            },
            policy: AnnouncementPolicy::qudit3(),
            kind: ObservableKind::Qudit3,
        },
        ScenarioKind::Ghz3 => {
            let c = qubit_angles(config.theta_c, config.phi_c)?;
            let states = vec![encode_message(&a), encode_message(&b), encode_message(&c)];
            match config.policy {
                PolicyChoice::Standard => Setup {
                    scenario: Scenario::Ghz { states },
                    policy: AnnouncementPolicy::ghz3_last_announcer(),
                    kind: ObservableKind::Ghz3,
                },
                PolicyChoice::LinearOptics => Setup {
                    scenario: Scenario::Ghz { states },
                    policy: AnnouncementPolicy::linear_optics(3),
                    kind: ObservableKind::Ghz3LinearOptics,
                },
            }
        }
        ScenarioKind::Baseline | ScenarioKind::Verify => unreachable!("handled by run_command"),
    })
}

/// Recovery from party A's vantage.
fn recover(config: &RunConfig, obs: &Observables) -> Result<RecoveryResult> {
    let own = qubit_angles(config.theta_a, config.phi_a)?;
    match obs.kind() {
        ObservableKind::TwoParty => recover_qubit_partner(&own, obs, None),
        ObservableKind::Misaligned => recover_misaligned(&own, obs, None),
        ObservableKind::Qudit3 => {
            let own = qutrit_state(config.theta_a, config.theta2_a, config.phi_a, config.phi2_a)?;
            recover_qudit3(&own, obs, None)
        }
        ObservableKind::Ghz3 => recover_ghz3(&own, obs, None),
        ObservableKind::Ghz3LinearOptics => {
            let b = qubit_angles(config.theta_b, config.phi_b)?;
            let c = qubit_angles(config.theta_c, config.phi_c)?;
            recover_ghz3_linear_optics(&own, b.theta(), c.theta(), obs, None)
        }
    }
}

struct RunResult {
    tally: TallyTable,
    estimates: BTreeMap<String, f64>,
    observables: BTreeMap<String, ObservableEntry>,
    recovery: RecoveryEntry,
}

fn run_once(config: &RunConfig, setup: &Setup, exact_obs: &Observables, seed: u64) -> Result<RunResult> {
    let mut rng = seeded(seed);
    let tally = run_exchange(&setup.scenario, &setup.policy, config.rounds, &mut rng)?;
    let estimates = estimate(&tally)?.into_iter().map(|(o, p)| (o.label(), p)).collect();
    let obs = Observables::from_tally(setup.kind, &tally)?;
    let tol = obs.default_tolerance();
    let observables = setup
        .kind
        .labels()
        .into_iter()
        .enumerate()
        .map(|(k, label)| {
            (label, ObservableEntry { exact: exact_obs.values()[k], estimate: obs.values()[k], tolerance: tol[k] })
        })
        .collect();
    let recovery = RecoveryEntry::from_result(recover(config, &obs))?;
    Ok(RunResult { tally, estimates, observables, recovery })
}

fn tally_entry(t: &TallyTable) -> TallyEntry {
    TallyEntry { rounds: t.rounds_total(), counts: t.counts_by_label(), discarded: t.discarded() }
}

fn recordable(table: &ProbabilityTable, policy: &AnnouncementPolicy) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (o, p) in table.iter() {
        if policy.records(&o)? {
            out.push((o.label(), p));
        }
    }
    Ok(out)
}

fn run_exchange_like(config: &RunConfig) -> Result<CommandOutput> {
    let setup = setup(config)?;
    let table = setup.scenario.prob_table()?;
    let exact_obs = Observables::exact(setup.kind, &table)?;
    let exact_probabilities: BTreeMap<String, f64> = table.iter().map(|(o, p)| (o.label(), p)).collect();
    let recordable = recordable(&table, &setup.policy)?;

    let primary = run_once(config, &setup, &exact_obs, config.seed)?;
    let mut estimates = primary.estimates.clone();
    for (label, _) in &recordable {
        estimates.entry(label.clone()).or_insert(0.0);
    }
    let bounds = recordable
        .iter()
        .map(|(label, p)| Ok((label.clone(), stat_bound(p.clamp(0.0, 1.0), config.rounds)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;

    let mut trials = Vec::new();
    for k in 1..config.trials {
        let seed = child_seed(config.seed, k);
        let r = run_once(config, &setup, &exact_obs, seed)?;
        trials.push(TrialEntry {
            trial: k,
            seed,
            tally: tally_entry(&r.tally),
            estimates: r.estimates,
            observables: r.observables,
            recovery: r.recovery,
        });
    }

    let failed = primary.recovery.failed();
    let report = ExchangeReport {
        config,
        exact_probabilities,
        observables: primary.observables,
        tally: tally_entry(&primary.tally),
        estimates: estimates.clone(),
        bounds: bounds.clone(),
        recovery: primary.recovery,
        trials,
    };
    let rendered = match config.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let rows = recordable.iter().map(|(label, p)| {
                [
                    label.clone(),
                    p.to_string(),
                    primary.tally.counts_by_label().get(label).copied().unwrap_or(0).to_string(),
                    estimates[label].to_string(),
                    bounds[label].half_width.to_string(),
                ]
            });
            to_csv(rows)?
        }
    };
    Ok(CommandOutput {
        code: if failed { EXIT_NO_SOLUTION } else { EXIT_OK },
        report: rendered,
        message: failed.then(|| "no recovery candidate within tolerance".to_string()),
    })
}

fn run_baseline(config: &RunConfig) -> Result<CommandOutput> {
    let theta = AlignmentAngle::new(config.alignment)?;
    let expected = theta.radians().cos().powi(2).clamp(0.0, 1.0);
    let same = baseline_same_count(theta, config.rounds, &mut seeded(config.seed))?;
    let n = config.rounds as f64;
    let fraction = same as f64 / n;
    let mut trials = Vec::new();
    for k in 1..config.trials {
        let seed = child_seed(config.seed, k);
        let s = baseline_same_count(theta, config.rounds, &mut seeded(seed))?;
        trials.push(BaselineTrial { trial: k, seed, same: s, fraction_same: s as f64 / n });
    }
    let report = BaselineReport {
        config,
        expected_same: expected,
        same,
        fraction_same: fraction,
        bound: stat_bound(expected, config.rounds)?,
        recovered_alignment: fraction.sqrt().clamp(0.0, 1.0).acos(),
        trials,
    };
    let rendered = match config.format {
        Format::Json => to_json(&report)?,
        Format::Csv => to_csv(std::iter::once([
            "same".to_string(),
            expected.to_string(),
            same.to_string(),
            fraction.to_string(),
            report.bound.half_width.to_string(),
        ]))?,
    };
    Ok(CommandOutput { code: EXIT_OK, report: rendered, message: None })
}

fn run_verify(config: &RunConfig) -> Result<CommandOutput> {
    let checks = run_checks(config.seed);
    let passed = checks.iter().all(|c| c.passed);
    let rendered = match config.format {
        Format::Json => to_json(&VerifyReport { config, passed, checks: checks.clone() })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "passed", "detail"]).map_err(csv_err)?;
            for c in &checks {
                w.write_record([c.name.as_str(), if c.passed { "true" } else { "false" }, c.detail.as_str()])
                    .map_err(csv_err)?;
            }
            finish_csv(w)?
        }
    };
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Ok(CommandOutput {
        code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
        report: rendered,
        message: (!passed).then(|| format!("failed checks: {}", failed.join(", "))),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn to_csv(rows: impl Iterator<Item = [String; 5]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "exact", "count", "estimate", "bound"]).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    finish_csv(w)
}

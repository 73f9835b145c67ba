use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::models::{
    qutrit_from_params, GhzModel, MisalignedModel, PairModel, PartnerModel, PhaseSumModel, QutritModel,
};
use super::observables::{ObservableKind, Observables};
use super::solver::{generically_rank_deficient, max_deviation, solve, Model, SolveOutput, SolverConfig};
use crate::error::{Error, Result};
use crate::protocol::MessageAngles;
use crate::qstate::{make_state, Amplitude, QuditState};

/// Candidates closer than this (in radians, or amplitude units for
/// qutrits and GHZ products) are reported once.
pub const MERGE_TOL: f64 = 1e-3;

const CONFIG: SolverConfig = SolverConfig { max_starts: 32, merge_tol: MERGE_TOL };
const WITNESS_CONFIG: SolverConfig = SolverConfig { max_starts: 64, merge_tol: MERGE_TOL };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambiguity {
    Unique,
    /// Finitely many distinct candidates fit.
    DiscreteSet,
    /// The observables cannot fix every unknown for this known input; the
    /// listed candidates are samples from a continuous family.
    Continuum,
}

/// The recovered unknowns of one candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Unknowns {
    Partner { partner: MessageAngles },
    Misaligned { partner: MessageAngles, alignment: f64 },
    Qutrit { partner: QuditState },
    /// `products` is `[b0 c0, b1 c1, b0 c1, b1 c0]`.
    Ghz { second: MessageAngles, third: MessageAngles, products: [Complex64; 4] },
    /// Only `phi_b + phi_c` is identifiable; `b1c1` carries it.
    PhaseSum { phase_sum: f64, b0c0: Complex64, b1c1: Complex64 },
    Pair { first: MessageAngles, second: MessageAngles },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub unknowns: Unknowns,
    /// Raw solver parameters, canonicalized.
    pub params: Vec<f64>,
    /// Largest absolute deviation between predicted and observed values.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    /// Ascending residual.
    pub candidates: Vec<Candidate>,
    pub ambiguity: Ambiguity,
    /// Set when the observables fix products of the partners' amplitudes but
    /// not how they split into individual states.
    pub factorization_ambiguous: bool,
    pub tolerance: Vec<f64>,
}

impl RecoveryResult {
    pub fn best(&self) -> &Candidate {
        &self.candidates[0]
    }
}

fn expect_kind(obs: &Observables, kind: ObservableKind) -> Result<()> {
    if obs.kind() != kind {
        return Err(Error::InvalidArgument(format!("expected {kind:?} observables, got {:?}", obs.kind())));
    }
    Ok(())
}

fn known_qutrit(state: &QuditState) -> Result<[Amplitude; 3]> {
    state
        .amps()
        .try_into()
        .map_err(|_| Error::DimensionMismatch { expected: 3, found: state.dim() })
}

fn tolerance(obs: &Observables, tol: Option<f64>) -> Result<Vec<f64>> {
    match tol {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            Err(Error::InvalidArgument(format!("tolerance {t} must be finite and non-negative")))
        }
        Some(t) => Ok(vec![t; obs.values().len()]),
        None => Ok(obs.default_tolerance()),
    }
}

fn angles(p: &[f64]) -> MessageAngles {
    MessageAngles::new(p[0], p[1]).expect("finite solver output")
}

fn ambiguity_of<M: Model>(model: &M, out: &SolveOutput) -> Ambiguity {
    if generically_rank_deficient(model) {
        Ambiguity::Continuum
    } else if out.kept.len() > 1 {
        Ambiguity::DiscreteSet
    } else {
        Ambiguity::Unique
    }
}

fn run<M: Model>(
    model: &M,
    obs: &Observables,
    tol: Vec<f64>,
    unknowns: impl Fn(&[f64]) -> Unknowns,
) -> Result<(RecoveryResult, SolveOutput)> {
    let out = solve(model, obs.values(), &tol, CONFIG)?;
    let candidates = out
        .kept
        .iter()
        .map(|s| Candidate { unknowns: unknowns(&s.params), params: s.params.clone(), residual: s.residual })
        .collect();
    let result = RecoveryResult {
        candidates,
        ambiguity: ambiguity_of(model, &out),
        factorization_ambiguous: false,
        tolerance: tol,
    };
    Ok((result, out))
}

/// Partner qubit from two-party observables, seen from the side that
/// prepared `own`.
pub fn recover_qubit_partner(own: &MessageAngles, obs: &Observables, tol: Option<f64>) -> Result<RecoveryResult> {
    expect_kind(obs, ObservableKind::TwoParty)?;
    let model = PartnerModel::new(own.amplitudes());
    let tol = tolerance(obs, tol)?;
    run(&model, obs, tol, |p| Unknowns::Partner { partner: angles(p) }).map(|r| r.0)
}

/// Partner qubit and relative axis rotation. The rotation is reported in
/// `[0, pi)`: the observables do not distinguish `alpha` from `alpha + pi`.
pub fn recover_misaligned(own: &MessageAngles, obs: &Observables, tol: Option<f64>) -> Result<RecoveryResult> {
    expect_kind(obs, ObservableKind::Misaligned)?;
    let model = MisalignedModel::new(own.amplitudes());
    let tol = tolerance(obs, tol)?;
    run(&model, obs, tol, |p| Unknowns::Misaligned { partner: angles(p), alignment: p[2] }).map(|r| r.0)
}

/// Partner qutrit from the `{00, 21}` announcements.
pub fn recover_qudit3(own: &QuditState, obs: &Observables, tol: Option<f64>) -> Result<RecoveryResult> {
    expect_kind(obs, ObservableKind::Qudit3)?;
    let model = QutritModel::new(known_qutrit(own)?);
    let tol = tolerance(obs, tol)?;
    run(&model, obs, tol, |p| Unknowns::Qutrit {
        partner: make_state(&qutrit_from_params(p)).expect("unit vector"),
    })
    .map(|r| r.0)
}

/// Both remaining GHZ partners from the first party's vantage.
pub fn recover_ghz3(own: &MessageAngles, obs: &Observables, tol: Option<f64>) -> Result<RecoveryResult> {
    expect_kind(obs, ObservableKind::Ghz3)?;
    let model = GhzModel::new(own.amplitudes());
    let tol = tolerance(obs, tol)?;
    let (mut result, out) = run(&model, obs, tol, |p| Unknowns::Ghz {
        second: angles(&p[..2]),
        third: angles(&p[2..]),
        products: GhzModel::products(p),
    })?;
    let pair_dist = |p: &[f64], q: &[f64]| {
        super::models::pair_distance(&p[..2], &q[..2]).max(super::models::pair_distance(&p[2..], &q[2..]))
    };
    result.factorization_ambiguous = out.accepted.iter().enumerate().any(|(k, s)| {
        out.accepted[k + 1..].iter().any(|t| {
            model.distance(&s.params, &t.params) <= MERGE_TOL && pair_dist(&s.params, &t.params) > MERGE_TOL
        })
    });
    Ok(result)
}

/// GHZ case where every party is limited to `{10, 11}` and the polar angles
/// `theta_b`, `theta_c` are public. Only the phase sum `phi_b + phi_c` and
/// with it the product `b1 c1` are identifiable, so the result is always
/// flagged as factorization-ambiguous.
pub fn recover_ghz3_linear_optics(
    own: &MessageAngles,
    theta_b: f64,
    theta_c: f64,
    obs: &Observables,
    tol: Option<f64>,
) -> Result<RecoveryResult> {
    expect_kind(obs, ObservableKind::Ghz3LinearOptics)?;
    if !theta_b.is_finite() || !theta_c.is_finite() {
        return Err(Error::NonFinite);
    }
    let model = PhaseSumModel::new(own.amplitudes(), theta_b, theta_c);
    let tol = tolerance(obs, tol)?;
    let (mut result, _) = run(&model, obs, tol, |p| Unknowns::PhaseSum {
        phase_sum: p[0],
        b0c0: Complex64::new(model.b0c0, 0.0),
        b1c1: model.b1c1(p[0]),
    })?;
    result.factorization_ambiguous = true;
    Ok(result)
}

/// Two different `(a, b)` qubit pairs that both reproduce the two-party
/// observables, showing an outside party cannot recover the messages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub first: Unknowns,
    pub second: Unknowns,
    pub residuals: [f64; 2],
}

pub fn underdetermination_witness(obs: &Observables, tol: Option<f64>) -> Result<Witness> {
    expect_kind(obs, ObservableKind::TwoParty)?;
    let model = PairModel::new();
    let tol = tolerance(obs, tol)?;
    let out = match solve(&model, obs.values(), &tol, WITNESS_CONFIG) {
        Ok(out) => out,
        Err(Error::NoSolution { .. }) => return Err(Error::WitnessNotFound),
        Err(e) => return Err(e),
    };
    // the observables depend on a0 b0 and a1 b1 only, so swapping the
    // parties or moving phase from one to the other preserves every fit
    let mut pool: Vec<Vec<f64>> = Vec::new();
    for s in &out.kept {
        let p = &s.params;
        pool.push(p.clone());
        pool.push(vec![p[2], p[3], p[0], p[1]]);
        pool.push(vec![p[0], p[1] + FRAC_PI_2, p[2], p[3] - FRAC_PI_2]);
        pool.push(vec![p[0], p[1] + PI, p[2], p[3] + PI]);
    }
    let mut fits: Vec<(Vec<f64>, f64)> = Vec::new();
    for mut p in pool {
        model.canonicalize(&mut p);
        let pred = model.predict_at(&p);
        if pred.iter().zip(obs.values()).zip(&tol).all(|((x, o), t)| (x - o).abs() <= *t) {
            let residual = max_deviation(&pred, obs.values());
            fits.push((p, residual));
        }
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..fits.len() {
        for j in i + 1..fits.len() {
            let d = model.distance(&fits[i].0, &fits[j].0);
            if best.is_none_or(|(bd, _, _)| d > bd) {
                best = Some((d, i, j));
            }
        }
    }
    match best {
        Some((d, i, j)) if d > 10.0 * MERGE_TOL => {
            let pair = |p: &[f64]| Unknowns::Pair { first: angles(&p[..2]), second: angles(&p[2..]) };
            Ok(Witness {
                first: pair(&fits[i].0),
                second: pair(&fits[j].0),
                residuals: [fits[i].1, fits[j].1],
            })
        }
        _ => Err(Error::WitnessNotFound),
    }
}

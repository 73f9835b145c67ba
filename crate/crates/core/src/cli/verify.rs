//! A quick self-check of the library's core invariants, run by
//! `bellex verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::protocol::{
    baseline_direction, decode_message, encode_message, run_exchange, AnnouncementPolicy, MessageAngles, Scenario,
};
use crate::qstate::oracle::{ghz_initial, misaligned_initial, two_party_initial};
use crate::qstate::{oracle_coeffs, prob_table, AlignmentAngle, PartyBasis, ProbabilityTable, QuditState};
use crate::recovery::{recover_qubit_partner, two_party_probs, ObservableKind, Observables};
use crate::rng::{child, seeded, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, outcome: Result<(bool, String)>) -> CheckResult {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, e.to_string()));
    CheckResult { name: name.to_string(), passed, detail }
}

fn random_angles(rng: &mut SimRng) -> MessageAngles {
    MessageAngles::new(rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..TAU)).expect("finite")
}

fn random_qudit(rng: &mut SimRng, d: usize) -> Result<QuditState> {
    let amps: Vec<_> = (0..d)
        .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    QuditState::new(&amps)
}

fn max_diff(a: &ProbabilityTable, b: &ProbabilityTable) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs every check with streams derived from `seed`.
pub fn run_checks(seed: u64) -> Vec<CheckResult> {
    vec![
        check("oracle_equivalence", oracle_equivalence(&mut child(seed, 0))),
        check("worked_two_party_values", worked_values()),
        check("misaligned_identities", misaligned_identities(&mut child(seed, 1))),
        check("marginal_uniformity", marginal_uniformity(&mut child(seed, 2))),
        check("message_round_trip", message_round_trip(&mut child(seed, 3))),
        check("exchange_determinism", exchange_determinism(seed)),
        check("partner_recovery", partner_recovery(&mut child(seed, 4))),
        check("baseline_extremes", baseline_extremes(seed)),
    ]
}

fn scenario_tables(rng: &mut SimRng) -> Result<Vec<(ProbabilityTable, ProbabilityTable)>> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let a = random_qudit(rng, d)?;
        let b = random_qudit(rng, d)?;
        let closed = Scenario::Qudit { a: a.clone(), b: b.clone() }.prob_table()?;
        let oracle = prob_table(&oracle_coeffs(&two_party_initial(&a, &b)?, &[PartyBasis::standard(d), PartyBasis::standard(d)])?);
        out.push((closed, oracle));
    }
    let states = vec![random_qudit(rng, 2)?, random_qudit(rng, 2)?, random_qudit(rng, 2)?];
    let closed = Scenario::Ghz { states: states.clone() }.prob_table()?;
    let oracle = prob_table(&oracle_coeffs(&ghz_initial(&states)?, &vec![PartyBasis::standard(2); 3])?);
    out.push((closed, oracle));
    let a = random_qudit(rng, 2)?;
    let b = random_qudit(rng, 2)?;
    let theta = AlignmentAngle::new(rng.random_range(0.0..TAU))?;
    let closed = Scenario::Misaligned { a: a.clone(), b: b.clone(), theta }.prob_table()?;
    let oracle = prob_table(&oracle_coeffs(
        &misaligned_initial(&a, &b, theta)?,
        &[PartyBasis::standard(2), PartyBasis::rotated_qubit(theta)],
    )?);
    out.push((closed, oracle));
    Ok(out)
}

fn oracle_equivalence(rng: &mut SimRng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        for (closed, oracle) in scenario_tables(rng)? {
            worst = worst.max(max_diff(&closed, &oracle));
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
}

fn worked_values() -> Result<(bool, String)> {
    let a = encode_message(&MessageAngles::new(PI / 6.0, 0.0)?);
    let b = encode_message(&MessageAngles::new(PI / 3.0, 0.0)?);
    let t = Scenario::TwoParty { a, b }.prob_table()?;
    let want = [("00,00", 3.0 / 32.0), ("00,01", 0.0), ("00,10", 1.0 / 8.0), ("00,11", 1.0 / 32.0)];
    let worst = want.iter().map(|(l, p)| (t.at(l) - p).abs()).fold(0.0, f64::max);
    Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
}

fn misaligned_identities(rng: &mut SimRng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = AlignmentAngle::new(rng.random_range(0.0..TAU))?;
        let t = Scenario::Misaligned { a: random_qudit(rng, 2)?, b: random_qudit(rng, 2)?, theta }.prob_table()?;
        let p = |l: &str| 2.0 * t.at(l);
        let (p1, p2, p3, p4) = (p("00,00"), p("00,01"), p("00,10"), p("00,11"));
        let (p5, p6, p7, p8) = (p("01,00"), p("01,01"), p("01,10"), p("01,11"));
        worst = worst
            .max((p1 + p2 + p3 + p4 - 0.5).abs())
            .max((p2 + p3 - p5 - p8).abs())
            .max((p1 + p4 - p6 - p7).abs());
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
}

fn marginal_uniformity(rng: &mut SimRng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        for (closed, _) in scenario_tables(rng)? {
            let d2 = (closed.dim() * closed.dim()) as f64;
            for party in 0..closed.parties() {
                for m in closed.marginal(party)? {
                    worst = worst.max((m - 1.0 / d2).abs());
                }
            }
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
}

fn message_round_trip(rng: &mut SimRng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = random_angles(rng);
        let back = decode_message(&encode_message(&m))?;
        worst = worst.max((back.theta() - m.theta()).abs()).max((back.phi() - m.phi()).abs());
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
}

fn exchange_determinism(seed: u64) -> Result<(bool, String)> {
    let mut rng = seeded(seed);
    let scenario = Scenario::TwoParty {
        a: encode_message(&random_angles(&mut rng)),
        b: encode_message(&random_angles(&mut rng)),
    };
    let policy = AnnouncementPolicy::linear_optics(2);
    let first = run_exchange(&scenario, &policy, 2000, &mut seeded(seed))?;
    let second = run_exchange(&scenario, &policy, 2000, &mut seeded(seed))?;
    Ok((first == second, format!("{} recorded rounds", 2000 - first.discarded())))
}

fn partner_recovery(rng: &mut SimRng) -> Result<(bool, String)> {
    let mut misses = 0;
    for _ in 0..5 {
        // keep the known side away from the unidentifiable angles 0, pi/4, pi/2
        let ta = if rng.random_bool(0.5) {
            rng.random_range(PI / 12.0..PI / 6.0)
        } else {
            rng.random_range(PI / 3.0..5.0 * PI / 12.0)
        };
        let a = MessageAngles::new(ta, rng.random_range(0.0..TAU))?;
        let b = MessageAngles::new(rng.random_range(PI / 12.0..5.0 * PI / 12.0), rng.random_range(0.0..TAU))?;
        let obs = Observables::new(
            ObservableKind::TwoParty,
            two_party_probs(&a.amplitudes(), &b.amplitudes()).to_vec(),
            None,
        )?;
        let r = recover_qubit_partner(&a, &obs, None)?;
        let hit = r.candidates.iter().any(|c| match c.unknowns {
            crate::recovery::Unknowns::Partner { partner } => {
                let dphi = (partner.phi() - b.phi()).rem_euclid(TAU);
                (partner.theta() - b.theta()).abs() < 1e-6 && dphi.min(TAU - dphi) < 1e-6
            }
            _ => false,
        });
        if !hit {
            misses += 1;
        }
    }
    Ok((misses == 0, format!("{misses} of 5 instances missed")))
}

fn baseline_extremes(seed: u64) -> Result<(bool, String)> {
    let aligned = baseline_direction(AlignmentAngle::zero(), 1000, &mut seeded(seed))?;
    let crossed = baseline_direction(AlignmentAngle::new(FRAC_PI_2)?, 1000, &mut seeded(seed))?;
    Ok((aligned == 1.0 && crossed == 0.0, format!("aligned {aligned}, crossed {crossed}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_checks(3) {
            assert!(c.passed, "{c:?}");
        }
    }
}

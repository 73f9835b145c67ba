use std::f64::consts::{FRAC_PI_2, TAU};

use proptest::prelude::*;

use bellex_core::protocol::{
    apply_policy, baseline_direction, decode_message, encode_message, estimate, run_exchange,
    stat_bound, AnnouncementPolicy, MessageAngles, Scenario,
};
use bellex_core::qstate::{AlignmentAngle, JointOutcome};
use bellex_core::rng::seeded;

fn scenario(t1: f64, p1: f64, t2: f64, p2: f64) -> Scenario {
    Scenario::TwoParty {
        a: encode_message(&MessageAngles::new(t1, p1).unwrap()),
        b: encode_message(&MessageAngles::new(t2, p2).unwrap()),
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #[test]
    fn message_round_trip(theta in 0.01..FRAC_PI_2 - 0.01, phi in 0.0..TAU) {
        let m = MessageAngles::new(theta, phi).unwrap();
        let back = decode_message(&encode_message(&m)).unwrap();
        prop_assert!((back.theta() - m.theta()).abs() < 1e-12);
        prop_assert!(angle_gap(back.phi(), m.phi()) < 1e-9);
    }

    #[test]
    fn canonical_angles_describe_same_state(theta in -10.0..10.0f64, phi in -10.0..10.0f64) {
        let m = MessageAngles::new(theta, phi).unwrap();
        prop_assert!((0.0..=FRAC_PI_2).contains(&m.theta()));
        prop_assert!((0.0..TAU).contains(&m.phi()));
        let raw = [num_complex::Complex64::new(theta.cos(), 0.0), num_complex::Complex64::from_polar(theta.sin(), phi)];
        let got = m.amplitudes();
        let overlap: num_complex::Complex64 = raw.iter().zip(&got).map(|(x, y)| x.conj() * y).sum();
        prop_assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tallies_respect_policy(seed in any::<u64>(), rounds in 1u64..400) {
        let policy = AnnouncementPolicy::linear_optics(2);
        let tally = run_exchange(&scenario(0.4, 0.3, 1.1, 2.0), &policy, rounds, &mut seeded(seed)).unwrap();
        let recorded: u64 = tally.counts().values().sum();
        prop_assert_eq!(recorded + tally.discarded(), rounds);
        for o in tally.counts().keys() {
            prop_assert!(apply_policy(o, &policy).unwrap());
        }
        let est = estimate(&tally).unwrap();
        prop_assert!(est.values().sum::<f64>() <= 1.0 + 1e-12);
    }

    #[test]
    fn same_seed_same_tally(seed in any::<u64>()) {
        let policy = AnnouncementPolicy::linear_optics(2);
        let s = scenario(0.7, 1.0, 0.2, 4.0);
        let x = run_exchange(&s, &policy, 300, &mut seeded(seed)).unwrap();
        let y = run_exchange(&s, &policy, 300, &mut seeded(seed)).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn bound_shrinks_with_rounds(p in 0.01..0.99f64, n in 1u64..100_000) {
        let small = stat_bound(p, n).unwrap();
        let large = stat_bound(p, 4 * n).unwrap();
        prop_assert!((small.half_width / large.half_width - 2.0).abs() < 1e-9);
        prop_assert!(small.half_width <= small.coarse * std::f64::consts::SQRT_2 / 2.0 + 1e-15);
    }
}

#[test]
fn linear_optics_records_only_phi1x() {
    let policy = AnnouncementPolicy::linear_optics(2);
    for idx in 0..16 {
        let o = JointOutcome::from_flat_index(2, 2, idx);
        let label = o.label();
        let want = label.split(',').all(|p| p.starts_with('1'));
        assert_eq!(apply_policy(&o, &policy).unwrap(), want, "{label}");
    }
}

#[test]
fn ghz_last_announcer_waits_for_others() {
    let policy = AnnouncementPolicy::ghz3_last_announcer();
    assert!(policy.records(&JointOutcome::parse("10,11,00", 2).unwrap()).unwrap());
    assert!(!policy.records(&JointOutcome::parse("00,11,10", 2).unwrap()).unwrap());
    assert!(!policy.records(&JointOutcome::parse("10,11,01", 2).unwrap()).unwrap());
}

#[test]
fn exchange_frequencies_concentrate() {
    let s = scenario(0.5, 0.0, 1.0, 0.0);
    let table = s.prob_table().unwrap();
    let policy = AnnouncementPolicy::linear_optics(2);
    let n = 20_000;
    let tally = run_exchange(&s, &policy, n, &mut seeded(11)).unwrap();
    for (o, p) in table.iter().filter(|(o, _)| policy.records(o).unwrap()) {
        let f = tally.count(&o) as f64 / n as f64;
        let b = stat_bound(p, n).unwrap();
        assert!((f - p).abs() <= 4.0 * b.half_width, "{o}: {f} vs {p}");
    }
}

#[test]
fn baseline_tracks_cos_squared() {
    let n = 20_000;
    for k in 0..=8 {
        let theta = k as f64 * FRAC_PI_2 / 8.0;
        let f = baseline_direction(AlignmentAngle::new(theta).unwrap(), n, &mut seeded(k)).unwrap();
        let p = theta.cos().powi(2);
        let hw = (p * (1.0 - p) / n as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * hw + 1e-12, "theta {theta}: {f} vs {p}");
    }
}

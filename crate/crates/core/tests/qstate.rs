mod support;

use num_complex::Complex64 as C;
use proptest::prelude::*;

use bellex_core::qstate::{
    bell_vector, ghz_coeffs, misaligned_coeffs, prob_table, two_party_coeffs, AlignmentAngle,
    JointOutcome, QuditState,
};

fn qudit(parts: &[(f64, f64)]) -> Option<QuditState> {
    let amps: Vec<C> = parts.iter().map(|&(re, im)| C::new(re, im)).collect();
    QuditState::new(&amps).ok()
}

fn amp_parts(d: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn bell_vectors_orthonormal() {
    for d in 2..=4 {
        let vs: Vec<Vec<C>> = (0..d * d).map(|k| bell_vector(d, k / d, k % d).unwrap()).collect();
        for (x, u) in vs.iter().enumerate() {
            for (y, v) in vs.iter().enumerate() {
                let ip: C = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((ip - C::new(want, 0.0)).norm() < 1e-12, "d={d} {x} {y}");
            }
        }
    }
    assert!(bell_vector(2, 2, 0).is_err());
}

#[test]
fn flat_index_round_trip() {
    for (d, n) in [(2usize, 2usize), (3, 2), (2, 3)] {
        for idx in 0..d.pow(2 * n as u32) {
            let o = JointOutcome::from_flat_index(d, n, idx);
            assert_eq!(o.flat_index(), idx);
            assert_eq!(JointOutcome::parse(&o.label(), d).unwrap(), o);
        }
    }
}

proptest! {
    #[test]
    fn two_party_matches_oracle(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = bellex_core::rng::seeded(seed);
        let a = support::random_qudit(&mut rng, d);
        let b = support::random_qudit(&mut rng, d);
        let table = prob_table(&two_party_coeffs(&a, &b).unwrap());
        prop_assert!(max_gap(table.entries(), &support::two_party(&a, &b)) < 1e-12);
        prop_assert!((table.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_matches_oracle(a in amp_parts(2), b in amp_parts(2), c in amp_parts(2)) {
        let states = [qudit(&a).unwrap(), qudit(&b).unwrap(), qudit(&c).unwrap()];
        let table = prob_table(&ghz_coeffs(&states).unwrap());
        prop_assert!(max_gap(table.entries(), &support::ghz3(&states)) < 1e-12);
    }

    #[test]
    fn misaligned_matches_oracle(a in amp_parts(2), b in amp_parts(2), t in -3.0..3.0f64) {
        let (a, b) = (qudit(&a).unwrap(), qudit(&b).unwrap());
        let table = prob_table(&misaligned_coeffs(&a, &b, AlignmentAngle::new(t).unwrap()).unwrap());
        prop_assert!(max_gap(table.entries(), &support::misaligned(&a, &b, t)) < 1e-12);
    }

    #[test]
    fn marginals_are_uniform(d in 2usize..=3, seed in any::<u64>()) {
        let mut rng = bellex_core::rng::seeded(seed);
        let a = support::random_qudit(&mut rng, d);
        let b = support::random_qudit(&mut rng, d);
        let table = prob_table(&two_party_coeffs(&a, &b).unwrap());
        for party in 0..2 {
            let m = table.marginal(party).unwrap();
            let u = 1.0 / (d * d) as f64;
            prop_assert!(m.iter().all(|p| (p - u).abs() < 1e-12));
        }
    }

    #[test]
    fn global_phase_is_invisible(a in amp_parts(2), b in amp_parts(2), g in 0.0..std::f64::consts::TAU) {
        let (qa, qb) = (qudit(&a).unwrap(), qudit(&b).unwrap());
        let turned: Vec<C> = qa.amps().iter().map(|x| x * C::from_polar(1.0, g)).collect();
        let qa2 = QuditState::new(&turned).unwrap();
        let p = prob_table(&two_party_coeffs(&qa, &qb).unwrap());
        let q = prob_table(&two_party_coeffs(&qa2, &qb).unwrap());
        prop_assert!(max_gap(p.entries(), q.entries()) < 1e-12);
    }
}

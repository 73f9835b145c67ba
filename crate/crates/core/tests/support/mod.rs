//! Test-side reference implementations, written from the definitions
//! without reusing the library's expansion code.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C;
use rand::Rng;

use bellex_core::protocol::MessageAngles;
use bellex_core::qstate::QuditState;
use bellex_core::rng::SimRng;

pub fn omega(d: usize, k: i64) -> C {
    C::from_polar(1.0, TAU * k.rem_euclid(d as i64) as f64 / d as f64)
}

fn kron(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `d^{-1/2} sum_q w^{jq} |e_q> |e_{q+i}>` over the local basis `e`.
fn bell(d: usize, i: usize, j: usize, e: &[Vec<C>]) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); d * d];
    for q in 0..d {
        let w = omega(d, (j * q) as i64) / (d as f64).sqrt();
        for (k, x) in kron(&e[q], &e[(q + i) % d]).into_iter().enumerate() {
            v[k] += w * x;
        }
    }
    v
}

pub fn standard_basis(d: usize) -> Vec<Vec<C>> {
    (0..d)
        .map(|q| (0..d).map(|k| C::new(if k == q { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

/// `|0'> = (cos t, -sin t)`, `|1'> = (sin t, cos t)`.
pub fn rotated_basis(t: f64) -> Vec<Vec<C>> {
    let (s, c) = t.sin_cos();
    vec![vec![C::new(c, 0.0), C::new(-s, 0.0)], vec![C::new(s, 0.0), C::new(c, 0.0)]]
}

/// Full joint-outcome probabilities, outcome digits `i1 j1 i2 j2 ...` with
/// the first party most significant. `prepared[k]` is party k's state in
/// global coordinates, `shared` an `N`-party state, qudit order
/// `(prep_1, shared_1, prep_2, shared_2, ...)`.
pub fn brute_force(d: usize, prepared: &[Vec<C>], shared: &[C], bases: &[Vec<Vec<C>>]) -> Vec<f64> {
    let n = prepared.len();
    let total = d.pow(2 * n as u32);
    let mut psi = vec![C::new(0.0, 0.0); total];
    for (idx, slot) in psi.iter_mut().enumerate() {
        // digits of idx: p1 s1 p2 s2 ...
        let mut rest = idx;
        let mut digits = vec![0; 2 * n];
        for k in (0..2 * n).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        let mut amp = C::new(1.0, 0.0);
        let mut shared_idx = 0;
        for k in 0..n {
            amp *= prepared[k][digits[2 * k]];
            shared_idx = shared_idx * d + digits[2 * k + 1];
        }
        *slot = amp * shared[shared_idx];
    }
    let outcomes = d.pow(2 * n as u32);
    (0..outcomes)
        .map(|o| {
            let mut rest = o;
            let mut ij = vec![0; 2 * n];
            for k in (0..2 * n).rev() {
                ij[k] = rest % d;
                rest /= d;
            }
            let mut v = vec![C::new(1.0, 0.0)];
            for k in 0..n {
                v = kron(&v, &bell(d, ij[2 * k], ij[2 * k + 1], &bases[k]));
            }
            v.iter().zip(&psi).map(|(b, p)| b.conj() * p).sum::<C>().norm_sqr()
        })
        .collect()
}

pub fn bell_pair(d: usize) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); d * d];
    for q in 0..d {
        v[q * d + q] = C::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    v
}

pub fn ghz(n: usize) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); 1 << n];
    v[0] = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[(1 << n) - 1] = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v
}

pub fn two_party(a: &QuditState, b: &QuditState) -> Vec<f64> {
    let d = a.dim();
    brute_force(d, &[a.amps().to_vec(), b.amps().to_vec()], &bell_pair(d), &[standard_basis(d), standard_basis(d)])
}

pub fn ghz3(states: &[QuditState; 3]) -> Vec<f64> {
    let prepared: Vec<Vec<C>> = states.iter().map(|s| s.amps().to_vec()).collect();
    brute_force(2, &prepared, &ghz(3), &vec![standard_basis(2); 3])
}

/// Bob's amplitudes are relative to his own rotated basis.
pub fn misaligned(a: &QuditState, b: &QuditState, t: f64) -> Vec<f64> {
    let e = rotated_basis(t);
    let b_global: Vec<C> = (0..2).map(|k| b.amps()[0] * e[0][k] + b.amps()[1] * e[1][k]).collect();
    brute_force(2, &[a.amps().to_vec(), b_global], &bell_pair(2), &[standard_basis(2), e])
}

pub fn random_qudit(rng: &mut SimRng, d: usize) -> QuditState {
    let amps: Vec<C> = (0..d).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    QuditState::new(&amps).unwrap()
}

pub fn random_angles(rng: &mut SimRng) -> MessageAngles {
    MessageAngles::new(rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..TAU)).unwrap()
}

/// Polar angle away from the poles.
pub fn interior_theta(rng: &mut SimRng) -> f64 {
    rng.random_range(PI / 12.0..5.0 * PI / 12.0)
}

/// Known-side polar angle that keeps the partner identifiable: away from
/// `0`, `pi/2` and the balanced point `pi/4`.
pub fn identifying_theta(rng: &mut SimRng) -> f64 {
    if rng.random_bool(0.5) {
        rng.random_range(PI / 12.0..PI / 6.0)
    } else {
        rng.random_range(PI / 3.0..5.0 * PI / 12.0)
    }
}

pub fn wrapped(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

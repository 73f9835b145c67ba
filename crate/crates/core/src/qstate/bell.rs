use std::f64::consts::TAU;

use num_complex::Complex64;

use super::Amplitude;
use crate::error::{Error, Result};

/// `omega^k` with `omega = exp(2 pi i / d)`. Quarter-turn multiples are
/// returned exactly.
pub fn omega_pow(d: usize, k: i64) -> Amplitude {
    let d = d as i64;
    let k = k.rem_euclid(d);
    if (4 * k) % d == 0 {
        return match 4 * k / d {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * k as f64 / d as f64)
}

/// Coefficients of `|Phi_ij> = d^{-1/2} sum_q omega^{jq} |q>|q+i>` in the
/// two-qudit product basis (index `q1 * d + q2`).
pub fn bell_vector(d: usize, i: usize, j: usize) -> Result<Vec<Amplitude>> {
    if d < 2 {
        return Err(Error::DomainError(format!("dimension must be at least 2, got {d}")));
    }
    for index in [i, j] {
        if index >= d {
            return Err(Error::IndexOutOfRange { index, dim: d });
        }
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for q in 0..d {
        v[q * d + (q + i) % d] = omega_pow(d, (j * q) as i64) * norm;
    }
    Ok(v)
}

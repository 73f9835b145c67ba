use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensionless complex amplitude.
pub type Amplitude = Complex64;

/// Amplitudes whose modulus falls below this are treated as zero when fixing
/// the global phase.
const PHASE_ZERO_TOL: f64 = 1e-12;

/// A normalized pure state of one qudit with its global phase removed: the
/// first nonzero amplitude is real and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditState {
    amps: Vec<Amplitude>,
}

impl QuditState {
    pub fn new(amps: &[Amplitude]) -> Result<Self> {
        make_state(amps)
    }

    pub fn qubit(a0: Amplitude, a1: Amplitude) -> Result<Self> {
        make_state(&[a0, a1])
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        let amps: Vec<Amplitude> = amps.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        make_state(&amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    /// Amplitude with the index taken modulo the dimension.
    pub fn amp(&self, k: i64) -> Amplitude {
        let d = self.amps.len() as i64;
        self.amps[k.rem_euclid(d) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Normalizes `amps` and removes the global phase.
pub fn make_state(amps: &[Amplitude]) -> Result<QuditState> {
    if amps.len() < 2 {
        return Err(Error::DomainError(format!(
            "a state needs at least two amplitudes, got {}",
            amps.len()
        )));
    }
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-150 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut out: Vec<Amplitude> = amps.iter().map(|a| a / norm).collect();
    if let Some(lead) = out.iter().position(|a| a.norm() > PHASE_ZERO_TOL) {
        let r = out[lead].norm();
        let rot = out[lead].conj() / r;
        for a in out.iter_mut() {
            *a *= rot;
        }
        out[lead] = Complex64::new(r, 0.0);
    }
    Ok(QuditState { amps: out })
}

/// One generalized Bell state `|Phi_ij>` of a pair of `dim`-level systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BellOutcome {
    pub i: usize,
    pub j: usize,
    pub dim: usize,
}

impl BellOutcome {
    pub fn new(dim: usize, i: usize, j: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DomainError(format!("dimension must be at least 2, got {dim}")));
        }
        for index in [i, j] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        Ok(BellOutcome { i, j, dim })
    }

    /// Position of this outcome among the `dim^2` outcomes of one party.
    pub fn local_index(&self) -> usize {
        self.i * self.dim + self.j
    }

    /// Parses `"ij"`, e.g. `"10"`.
    pub fn parse(label: &str, dim: usize) -> Result<Self> {
        let digits: Vec<u32> = label.chars().filter_map(|c| c.to_digit(10)).collect();
        if digits.len() != 2 || label.chars().count() != 2 {
            return Err(Error::InvalidArgument(format!("bad Bell outcome label {label:?}")));
        }
        BellOutcome::new(dim, digits[0] as usize, digits[1] as usize)
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

/// One Bell outcome per measuring party, in party order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JointOutcome {
    pub parties: Vec<BellOutcome>,
}

impl JointOutcome {
    pub fn new(parties: Vec<BellOutcome>) -> Result<Self> {
        let Some(first) = parties.first() else {
            return Err(Error::TooFewParties { min: 1, found: 0 });
        };
        if let Some(bad) = parties.iter().find(|p| p.dim != first.dim) {
            return Err(Error::DimensionMismatch { expected: first.dim, found: bad.dim });
        }
        Ok(JointOutcome { parties })
    }

    /// Builds an outcome from `(i, j)` pairs.
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let parties = pairs
            .iter()
            .map(|&(i, j)| BellOutcome::new(dim, i, j))
            .collect::<Result<Vec<_>>>()?;
        JointOutcome::new(parties)
    }

    /// Parses labels such as `"10,11"` or `"10,11,00"`.
    pub fn parse(label: &str, dim: usize) -> Result<Self> {
        let parties = label
            .split(',')
            .map(|s| BellOutcome::parse(s.trim(), dim))
            .collect::<Result<Vec<_>>>()?;
        JointOutcome::new(parties)
    }

    pub fn dim(&self) -> usize {
        self.parties[0].dim
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Flat index into a dense table (digits `i1 j1 i2 j2 ...`, first party
    /// most significant).
    pub fn flat_index(&self) -> usize {
        let d2 = self.dim() * self.dim();
        self.parties.iter().fold(0, |acc, p| acc * d2 + p.local_index())
    }

    pub fn from_flat_index(dim: usize, parties: usize, mut index: usize) -> Self {
        let d2 = dim * dim;
        let mut out = vec![BellOutcome { i: 0, j: 0, dim }; parties];
        for slot in out.iter_mut().rev() {
            let local = index % d2;
            index /= d2;
            *slot = BellOutcome { i: local / dim, j: local % dim, dim };
        }
        JointOutcome { parties: out }
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.parties.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Angle between two parties' reference axes, reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AlignmentAngle(f64);

impl AlignmentAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        Ok(AlignmentAngle(t))
    }

    pub fn zero() -> Self {
        AlignmentAngle(0.0)
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Amplitude {
        Complex64::new(re, im)
    }

    #[test]
    fn make_state_examples() {
        let s = make_state(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amps(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let s = make_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((s.amps()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amps()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);

        assert_eq!(make_state(&[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroVector));
        assert_eq!(make_state(&[c(f64::NAN, 0.0), c(1.0, 0.0)]), Err(Error::NonFinite));
        assert!(make_state(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn global_phase_is_removed() {
        let s = make_state(&[c(0.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(s.amps()[1], c(2.0 / 5f64.sqrt(), 0.0));
        assert!((s.amps()[2] - c(0.0, -1.0 / 5f64.sqrt())).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_outcome_bounds() {
        assert!(BellOutcome::new(2, 1, 1).is_ok());
        assert_eq!(BellOutcome::new(2, 2, 0), Err(Error::IndexOutOfRange { index: 2, dim: 2 }));
    }

    #[test]
    fn joint_outcome_labels_and_indices() {
        let o = JointOutcome::parse("10,11", 2).unwrap();
        assert_eq!(o.label(), "10,11");
        assert_eq!(o.flat_index(), 2 * 4 + 3);
        assert_eq!(JointOutcome::from_flat_index(2, 2, 11), o);
        for idx in 0..81 {
            assert_eq!(JointOutcome::from_flat_index(3, 2, idx).flat_index(), idx);
        }
        let mixed = JointOutcome::new(vec![
            BellOutcome::new(2, 0, 0).unwrap(),
            BellOutcome::new(3, 0, 0).unwrap(),
        ]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn alignment_reduced() {
        let a = AlignmentAngle::new(-std::f64::consts::FRAC_PI_2).unwrap();
        assert!((a.radians() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(AlignmentAngle::new(TAU).unwrap().radians(), 0.0);
    }
}

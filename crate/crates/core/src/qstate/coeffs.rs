use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use super::bell::omega_pow;
use super::state::{AlignmentAngle, Amplitude, JointOutcome, QuditState};
use crate::error::{Error, Result};

/// Dense expansion coefficients `V`, one per joint Bell outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffTable {
    dim: usize,
    parties: usize,
    entries: Vec<Amplitude>,
}

/// Joint outcome probabilities `|V|^2`, same indexing as [`CoeffTable`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityTable {
    dim: usize,
    parties: usize,
    entries: Vec<f64>,
}

fn table_len(dim: usize, parties: usize) -> usize {
    (dim * dim).pow(parties as u32)
}

impl CoeffTable {
    pub(crate) fn from_entries(dim: usize, parties: usize, entries: Vec<Amplitude>) -> Result<Self> {
        let expected = table_len(dim, parties);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: entries.len() });
        }
        Ok(CoeffTable { dim, parties, entries })
    }

    fn build(dim: usize, parties: usize, f: impl Fn(&JointOutcome) -> Amplitude) -> Self {
        let entries = (0..table_len(dim, parties))
            .map(|idx| f(&JointOutcome::from_flat_index(dim, parties, idx)))
            .collect();
        CoeffTable { dim, parties, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn get(&self, outcome: &JointOutcome) -> Result<Amplitude> {
        check_shape(self.dim, self.parties, outcome)?;
        Ok(self.entries[outcome.flat_index()])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }
}

impl ProbabilityTable {
    /// Wraps raw probabilities. Entries must be nonnegative and sum to one
    /// within `1e-9`.
    pub fn from_entries(dim: usize, parties: usize, entries: Vec<f64>) -> Result<Self> {
        let expected = table_len(dim, parties);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: entries.len() });
        }
        if entries.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::DomainError("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::DomainError(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ProbabilityTable { dim, parties, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, outcome: &JointOutcome) -> Result<f64> {
        check_shape(self.dim, self.parties, outcome)?;
        Ok(self.entries[outcome.flat_index()])
    }

    /// Shorthand for `get` with a label such as `"10,11"`; panics on a bad label.
    pub fn at(&self, label: &str) -> f64 {
        let outcome = JointOutcome::parse(label, self.dim).expect("valid outcome label");
        self.get(&outcome).expect("outcome matches table shape")
    }

    pub fn iter(&self) -> impl Iterator<Item = (JointOutcome, f64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(idx, &p)| (JointOutcome::from_flat_index(self.dim, self.parties, idx), p))
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Distribution of one party's outcome, indexed by `i * d + j`.
    pub fn marginal(&self, party: usize) -> Result<Vec<f64>> {
        if party >= self.parties {
            return Err(Error::IndexOutOfRange { index: party, dim: self.parties });
        }
        let mut out = vec![0.0; self.dim * self.dim];
        for (outcome, p) in self.iter() {
            out[outcome.parties[party].local_index()] += p;
        }
        Ok(out)
    }
}

fn check_shape(dim: usize, parties: usize, outcome: &JointOutcome) -> Result<()> {
    if outcome.parties.len() != parties {
        return Err(Error::DimensionMismatch { expected: parties, found: outcome.parties.len() });
    }
    if outcome.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: outcome.dim() });
    }
    Ok(())
}

fn require_dim(state: &QuditState, dim: usize) -> Result<()> {
    if state.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: state.dim() });
    }
    Ok(())
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Two parties sharing `|Phi_00>`, each measuring their prepared qudit
/// together with their half of the pair:
///
/// `V = d^{-3/2} w^{i1 j1 + i2 j2} sum_m w^{-(j1+j2) m} a_{m-i1} b_{m-i2}`
pub fn two_party_coeffs(a: &QuditState, b: &QuditState) -> Result<CoeffTable> {
    let d = a.dim();
    require_dim(b, d)?;
    let scale = 1.0 / (d as f64 * (d as f64).sqrt());
    Ok(CoeffTable::build(d, 2, |o| {
        let (i1, j1) = (o.parties[0].i as i64, o.parties[0].j as i64);
        let (i2, j2) = (o.parties[1].i as i64, o.parties[1].j as i64);
        let sum: Amplitude = (0..d as i64)
            .map(|m| omega_pow(d, -(j1 + j2) * m) * a.amp(m - i1) * b.amp(m - i2))
            .sum();
        omega_pow(d, i1 * j1 + i2 * j2) * sum * scale
    }))
}

/// `N` qubit parties sharing `(|0...0> + |1...1>)/sqrt 2`:
///
/// `V = 2^{-(N+1)/2} (-1)^{sum i_k j_k} [prod s_k[i_k] + (-1)^{sum j_k} prod s_k[i_k + 1]]`
pub fn ghz_coeffs(states: &[QuditState]) -> Result<CoeffTable> {
    if states.len() < 2 {
        return Err(Error::TooFewParties { min: 2, found: states.len() });
    }
    for s in states {
        require_dim(s, 2)?;
    }
    let n = states.len();
    let scale = SQRT_2.powi(-(n as i32 + 1));
    Ok(CoeffTable::build(2, n, |o| {
        let mut direct = Complex64::new(1.0, 0.0);
        let mut flipped = Complex64::new(1.0, 0.0);
        let mut ij = 0;
        let mut jsum = 0;
        for (s, p) in states.iter().zip(&o.parties) {
            direct *= s.amp(p.i as i64);
            flipped *= s.amp(p.i as i64 + 1);
            ij += p.i * p.j;
            jsum += p.j;
        }
        (direct + flipped * sign(jsum)) * sign(ij) * scale
    }))
}

/// Two qubit parties whose axes differ by `theta`. Alice's basis is the
/// reference; Bob prepares and measures in
/// `|0'> = cos t |0> - sin t |1>`, `|1'> = sin t |0> + cos t |1>`.
///
/// Re-expressing the shared pair in Bob's basis gives
/// `V = 2^{-3/2} sum_{q1,q2} (-1)^{j1 q1 + j2 q2} a_{q1} b_{q2} R[q1+i1][q2+i2]`
/// with `R = [[cos t, sin t], [-sin t, cos t]]`.
pub fn misaligned_coeffs(
    a: &QuditState,
    b: &QuditState,
    theta: AlignmentAngle,
) -> Result<CoeffTable> {
    require_dim(a, 2)?;
    require_dim(b, 2)?;
    let (s, c) = theta.radians().sin_cos();
    let r = [[c, s], [-s, c]];
    let scale = 1.0 / (2.0 * SQRT_2);
    Ok(CoeffTable::build(2, 2, |o| {
        let (i1, j1) = (o.parties[0].i, o.parties[0].j);
        let (i2, j2) = (o.parties[1].i, o.parties[1].j);
        let mut v = Complex64::new(0.0, 0.0);
        for q1 in 0..2 {
            for q2 in 0..2 {
                let w = sign(j1 * q1 + j2 * q2) * r[(q1 + i1) % 2][(q2 + i2) % 2];
                v += a.amps()[q1] * b.amps()[q2] * w;
            }
        }
        v * scale
    }))
}

pub fn prob_table(coeffs: &CoeffTable) -> ProbabilityTable {
    ProbabilityTable {
        dim: coeffs.dim,
        parties: coeffs.parties,
        entries: coeffs.entries.iter().map(|v| v.norm_sqr()).collect(),
    }
}

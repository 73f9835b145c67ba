//! Brute-force expansion of a full product state in products of Bell bases.
//!
//! Nothing here uses the closed forms: every coefficient is the explicit sum
//! `sum_x conj(prod_k Phi_k[x_k]) psi[x]` over the whole `d^(2n)` product
//! basis, which makes it an independent check on [`super::coeffs`].

use num_complex::Complex64;

use super::bell::bell_vector;
use super::coeffs::CoeffTable;
use super::state::{AlignmentAngle, Amplitude, QuditState};
use crate::error::{Error, Result};

/// The basis one party measures in. `frame` holds the party's local basis
/// vectors as columns of a row-major `d x d` matrix expressed in the global
/// frame; `None` is the global frame itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyBasis {
    dim: usize,
    frame: Option<Vec<Amplitude>>,
}

impl PartyBasis {
    pub fn standard(dim: usize) -> Self {
        PartyBasis { dim, frame: None }
    }

    pub fn with_frame(dim: usize, frame: Vec<Amplitude>) -> Result<Self> {
        if frame.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: frame.len() });
        }
        Ok(PartyBasis { dim, frame: Some(frame) })
    }

    /// Qubit frame turned by `theta` relative to the global one:
    /// `|0'> = (cos t, -sin t)`, `|1'> = (sin t, cos t)`.
    pub fn rotated_qubit(theta: AlignmentAngle) -> Self {
        PartyBasis { dim: 2, frame: Some(rotation_frame(theta)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Expresses a vector given in this party's local basis in the global one.
    pub fn to_global(&self, local: &[Amplitude]) -> Vec<Amplitude> {
        match &self.frame {
            None => local.to_vec(),
            Some(u) => (0..self.dim)
                .map(|row| (0..self.dim).map(|col| u[row * self.dim + col] * local[col]).sum())
                .collect(),
        }
    }

    /// All `d^2` Bell vectors of this party, in the global product basis.
    fn bell_vectors(&self) -> Result<Vec<Vec<Amplitude>>> {
        let d = self.dim;
        (0..d * d)
            .map(|k| {
                let v = bell_vector(d, k / d, k % d)?;
                Ok(match &self.frame {
                    None => v,
                    Some(_) => self.pair_to_global(&v),
                })
            })
            .collect()
    }

    fn pair_to_global(&self, v: &[Amplitude]) -> Vec<Amplitude> {
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for (x, &amp) in v.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let e1 = self.to_global(&unit(d, x / d));
            let e2 = self.to_global(&unit(d, x % d));
            for (p, u) in e1.iter().enumerate() {
                for (q, w) in e2.iter().enumerate() {
                    out[p * d + q] += amp * u * w;
                }
            }
        }
        out
    }
}

fn unit(d: usize, k: usize) -> Vec<Amplitude> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Columns `|0'>, |1'>` of a qubit frame turned by `theta`.
pub fn rotation_frame(theta: AlignmentAngle) -> Vec<Amplitude> {
    let (s, c) = theta.radians().sin_cos();
    [c, s, -s, c].iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `|Phi_00>` of two `d`-level systems.
pub fn shared_bell_pair(d: usize) -> Vec<Amplitude> {
    bell_vector(d, 0, 0).expect("Phi_00 exists for every d >= 2")
}

/// `(|0...0> + |1...1>)/sqrt 2` on `n` qubits.
pub fn shared_ghz(n: usize) -> Vec<Amplitude> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = Complex64::new(h, 0.0);
    v[(1 << n) - 1] = Complex64::new(h, 0.0);
    v
}

/// Full state ordered `(prepared_1, shared_1, prepared_2, shared_2, ...)`,
/// where `prepared[k]` is given in the global frame and `shared` is the
/// `d^n` joint state of the shared systems.
pub fn product_initial(prepared: &[Vec<Amplitude>], shared: &[Amplitude]) -> Result<Vec<Amplitude>> {
    let n = prepared.len();
    let Some(first) = prepared.first() else {
        return Err(Error::TooFewParties { min: 1, found: 0 });
    };
    let d = first.len();
    if let Some(bad) = prepared.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    let expected = d.pow(n as u32);
    if shared.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: shared.len() });
    }
    let total = d.pow(2 * n as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    for (x, slot) in out.iter_mut().enumerate() {
        let digits = digits_of(x, d, 2 * n);
        let mut amp = Complex64::new(1.0, 0.0);
        let mut shared_idx = 0;
        for k in 0..n {
            amp *= prepared[k][digits[2 * k]];
            shared_idx = shared_idx * d + digits[2 * k + 1];
        }
        *slot = amp * shared[shared_idx];
    }
    Ok(out)
}

/// Initial state for two parties sharing `|Phi_00>`.
pub fn two_party_initial(a: &QuditState, b: &QuditState) -> Result<Vec<Amplitude>> {
    product_initial(&[a.amps().to_vec(), b.amps().to_vec()], &shared_bell_pair(a.dim()))
}

pub fn ghz_initial(states: &[QuditState]) -> Result<Vec<Amplitude>> {
    let prepared: Vec<Vec<Amplitude>> = states.iter().map(|s| s.amps().to_vec()).collect();
    product_initial(&prepared, &shared_ghz(states.len()))
}

/// Alice prepares `a` in the global frame; Bob prepares `b` in his own frame,
/// turned by `theta`. The shared pair is `|Phi_00>` in Alice's frame.
pub fn misaligned_initial(a: &QuditState, b: &QuditState, theta: AlignmentAngle) -> Result<Vec<Amplitude>> {
    let bob = PartyBasis::rotated_qubit(theta);
    product_initial(&[a.amps().to_vec(), bob.to_global(b.amps())], &shared_bell_pair(2))
}

fn digits_of(mut x: usize, d: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = x % d;
        x /= d;
    }
    out
}

/// Expands `initial` in the product of each party's Bell basis.
pub fn oracle_coeffs(initial: &[Amplitude], bases: &[PartyBasis]) -> Result<CoeffTable> {
    let Some(first) = bases.first() else {
        return Err(Error::TooFewParties { min: 1, found: 0 });
    };
    let d = first.dim;
    if let Some(bad) = bases.iter().find(|b| b.dim != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim });
    }
    let n = bases.len();
    let total = d.pow(2 * n as u32);
    if initial.len() != total {
        return Err(Error::DimensionMismatch { expected: total, found: initial.len() });
    }
    let norm: f64 = initial.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::DomainError(format!("initial state has norm^2 {norm}")));
    }

    let vectors = bases.iter().map(PartyBasis::bell_vectors).collect::<Result<Vec<_>>>()?;
    // pair index of every party for every basis element
    let pairs: Vec<Vec<usize>> = (0..total)
        .map(|x| {
            let digits = digits_of(x, d, 2 * n);
            (0..n).map(|k| digits[2 * k] * d + digits[2 * k + 1]).collect()
        })
        .collect();

    let outcomes = (d * d).pow(n as u32);
    let mut entries = Vec::with_capacity(outcomes);
    for o in 0..outcomes {
        let local = digits_of(o, d * d, n);
        let mut v = Complex64::new(0.0, 0.0);
        for (x, psi) in initial.iter().enumerate() {
            if psi.re == 0.0 && psi.im == 0.0 {
                continue;
            }
            let mut bra = Complex64::new(1.0, 0.0);
            for k in 0..n {
                bra *= vectors[k][local[k]][pairs[x][k]];
            }
            v += bra.conj() * psi;
        }
        entries.push(v);
    }
    CoeffTable::from_entries(d, n, entries)
}

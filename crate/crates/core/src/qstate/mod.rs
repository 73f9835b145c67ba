//! Exact linear algebra of generalized Bell states.
//!
//! Product-basis vectors are stored densely with the first subsystem as the
//! most significant digit. A two-qudit vector has index `q1 * d + q2`; the
//! full state of `n` measuring parties is ordered
//! `(prepared_1, shared_1, prepared_2, shared_2, ...)` so that each party's
//! measured pair occupies two adjacent digits.
//!
//! Expansion coefficients are the overlaps `V = <Phi...|psi>` with the
//! conjugate taken on the Bell side. Closed forms in [`coeffs`] and the
//! brute-force expansion in [`oracle`] use this one convention, so they
//! agree at the amplitude level and not only in modulus.

mod bell;
mod coeffs;
pub mod oracle;
mod state;

pub use bell::{bell_vector, omega_pow};
pub use coeffs::{
    ghz_coeffs, misaligned_coeffs, prob_table, two_party_coeffs, CoeffTable, ProbabilityTable,
};
pub use oracle::{oracle_coeffs, PartyBasis};
pub use state::{make_state, AlignmentAngle, Amplitude, BellOutcome, JointOutcome, QuditState};

/// Absolute tolerance for identities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-12;

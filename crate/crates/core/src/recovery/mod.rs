//! Inverting announced statistics back to the unknown prepared states.
//!
//! Each scenario is a fit of a few angles to a handful of class
//! probabilities: an exhaustive scan of the angle grid, Levenberg-Marquardt
//! refinement from every promising grid minimum, then acceptance against a
//! per-observable tolerance and deduplication.

mod models;
mod observables;
mod recover;
pub(crate) mod solver;

pub use models::{ghz3_probs, misaligned_probs, qudit3_probs, qutrit_state, two_party_probs};
pub use observables::{ObservableClass, ObservableKind, Observables};
pub use recover::{
    recover_ghz3, recover_ghz3_linear_optics, recover_misaligned, recover_qubit_partner, recover_qudit3,
    underdetermination_witness, Ambiguity, Candidate, RecoveryResult, Unknowns, Witness, MERGE_TOL,
};

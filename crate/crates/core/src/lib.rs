//! Two-way secret message exchange through shared entanglement and
//! Bell-state measurements.
//!
//! Each party prepares a private state, performs a Bell-state measurement on
//! it together with their half of a shared entangled state, and publicly
//! announces a restricted subset of outcomes. The joint outcome statistics
//! depend on every party's private amplitudes, so a party who knows their
//! own state can solve for the others' while an outsider faces an
//! underdetermined system.
//!
//! The crate is organised as:
//!
//! - [`qstate`]: generalized Bell bases, closed-form expansion coefficients
//!   for two-party qubits and qudits, GHZ sharing and misaligned frames, plus
//!   a brute-force oracle that expands the full product state directly.
//! - [`protocol`]: message encoding, seeded round sampling, announcement
//!   policies, tallies, frequency estimates and binomial bounds, and the
//!   direction-sharing baseline.
//! - [`recovery`]: grid-plus-refinement solvers that recover the unknown
//!   constants from estimated probabilities.
//! - [`cli`]: the `bellex` command-line driver and its report format.

pub mod cli;
pub mod error;
pub mod protocol;
pub mod qstate;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};

//! Running the exchange: message encoding, seeded measurement rounds,
//! announcement filtering, tallies and frequency estimates.
//!
//! Every round consumes exactly one uniform `f64` from the stream (see
//! [`sample_round`]); the direction-sharing baseline consumes two per round.
//! Identical seeds therefore reproduce identical tallies.

mod baseline;
mod exchange;
mod message;
mod policy;
mod stats;

pub use baseline::{baseline_direction, baseline_same_count};
pub use exchange::{run_exchange, sample_round, OutcomeSampler, Scenario, TallyTable};
pub use message::{decode_message, encode_message, MessageAngles};
pub use policy::{apply_policy, AnnouncementPolicy};
pub use stats::{estimate, stat_bound, StatBound};

//! Seeded random streams.
//!
//! Every simulation takes an explicit `u64` seed. Independent trials derive
//! their own child seeds through a SplitMix64 finalizer so that trial `k` of
//! a batch is reproducible on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream type used by every sampler in the crate.
pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic child seed for trial `index` of a batch rooted at `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child(seed: u64, index: u64) -> SimRng {
    seeded(child_seed(seed, index))
}

//! Reproducible random streams for trajectory-parallel Monte Carlo.
//!
//! Every trajectory owns its own generator. Trajectory `k` of a run with
//! master seed `s` is seeded with [`trajectory_seed`]`(s, k)`, a SplitMix64
//! mix of the pair, and drives a ChaCha8 stream. Results therefore do not
//! depend on thread count or scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of trajectory `index` from a master seed.
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// A generator seeded directly from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The generator for trajectory `index` under `master`.
pub fn trajectory_rng(master: u64, index: u64) -> SimRng {
    rng_from_seed(trajectory_seed(master, index))
}

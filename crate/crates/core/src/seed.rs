//! Seed derivation and the crate-wide random number generator.
//!
//! Every stochastic routine takes a `u64` master seed. Independent work
//! items (samples, trials, trajectories) draw from streams derived from
//! `(master, index)`, so aggregate results never depend on how the work was
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate. ChaCha is portable and its
/// output is fixed for a given seed across platforms and releases.
pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash `(master, stream)` into a child seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(stream.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Generator for the `stream`-th independent work item under `master`.
pub fn stream_rng(master: u64, stream: u64) -> SimRng {
    rng_from_seed(derive_seed(master, stream))
}

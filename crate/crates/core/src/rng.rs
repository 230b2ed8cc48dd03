//! Deterministic random streams.
//!
//! Every sampling stage draws from its own ChaCha8 stream derived from a
//! 64-bit master seed, so results do not depend on the order in which
//! stages (or parallel workers) run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent sampling stages. The discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Parent = 1,
    ChildPi = 2,
    ChildPrime = 3,
    Permutation = 4,
    IndexSet = 5,
    Cleanup = 6,
    Selection = 7,
    Resample = 8,
}

/// Generator for `stage` under `seed`.
pub fn stream(seed: u64, stage: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage as u64);
    rng
}

/// SplitMix64 finalizer, used to derive child seeds from a master seed.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for item `index` of a family keyed by `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(mix(master) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

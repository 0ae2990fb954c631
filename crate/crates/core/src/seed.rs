//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded with a
//! 64-bit value. Streams for sub-tasks (disorder realization `r`, sample `k`)
//! are derived from the experiment seed with [`derive_seed`], so results do
//! not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for task `index` of a run seeded with `seed`:
/// `mix64(seed ^ mix64(index ^ 0xD1B5_4A32_D192_ED03))`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index ^ 0xD1B5_4A32_D192_ED03))
}

/// Seed for a task addressed by a path of indices, e.g. `(model, L, realization)`.
pub fn derive_seed_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &i| derive_seed(s, i))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

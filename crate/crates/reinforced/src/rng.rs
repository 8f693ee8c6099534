//! Deterministic random-stream derivation.
//!
//! Every random decision in the crate draws from a stream derived from a
//! master seed and a fixed tag path. Exploration derives one stream per
//! (seed, epoch, state index), so results do not depend on worker count or
//! call interleaving.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The crate-wide pseudorandom generator.
pub type Prng = ChaCha8Rng;

/// Tags separating the independent stream families.
pub mod tag {
    pub const POLICY_INIT: u64 = 1;
    pub const VALUE_INIT: u64 = 2;
    pub const VISIT_ORDER: u64 = 3;
    pub const EXPLORE: u64 = 4;
    pub const UPDATE: u64 = 5;
    pub const DATASET: u64 = 6;
    pub const SPLIT: u64 = 7;
    pub const PERMUTATION: u64 = 8;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a seed from a master seed and a tag path.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix(seed);
    for &t in tags {
        state = splitmix(state ^ splitmix(t));
    }
    state
}

/// Derive an independent generator from a master seed and a tag path.
pub fn stream(seed: u64, tags: &[u64]) -> Prng {
    Prng::seed_from_u64(derive_seed(seed, tags))
}

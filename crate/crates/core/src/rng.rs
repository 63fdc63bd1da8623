//! Per-trial random number streams.
//!
//! Every parallel trial owns a generator derived from `(master_seed,
//! trial_index)`, so results do not depend on how trials are scheduled
//! across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Master seed for a named sub-experiment (splitmix64 of `master ^ tag`).
pub fn sub_seed(master_seed: u64, tag: u64) -> u64 {
    let mut z = (master_seed ^ tag).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

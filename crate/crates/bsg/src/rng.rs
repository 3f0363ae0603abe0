//! Deterministic random-stream derivation.
//!
//! Every random decision during training draws from a ChaCha8 stream keyed by
//! (master seed, global iteration, phase, unit index). The unit is the
//! sentence for subsampling and window draws, and the target word id for
//! negative sampling, so batches are identical no matter how sentences or
//! targets are sharded across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Factor-bank initialization (iteration 0, unit 0).
pub const PHASE_INIT: u64 = 1;
/// Per-sentence subsampling and window-size draws.
pub const PHASE_SENTENCE: u64 = 2;
/// Per-target negative rejection sampling.
pub const PHASE_NEGATIVE: u64 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The ChaCha8 stream for one (iteration, phase, unit) cell of the run keyed
/// by `seed`.
pub fn stream(seed: u64, iteration: u64, phase: u64, unit: u64) -> ChaCha8Rng {
    let mut state = splitmix64(seed);
    for part in [iteration, phase, unit] {
        state = splitmix64(state ^ part.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    ChaCha8Rng::seed_from_u64(state)
}

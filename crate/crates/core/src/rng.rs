//! Counter-based random streams.
//!
//! Every replicate (or Monte Carlo chunk) gets its own ChaCha stream keyed by
//! the master seed and selected by the replicate index, so results do not
//! depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent stream number `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Streams used by the limit estimators live in a separate key space from
/// the replicate streams so the two never overlap.
pub fn limit_stream(master_seed: u64, index: u64) -> StreamRng {
    stream(master_seed ^ 0x9e37_79b9_7f4a_7c15, index)
}

//! Per-sample random streams.
//!
//! Sample `i` of a run with seed `s` draws from `ChaCha8Rng` seeded with
//! `splitmix64(s ^ splitmix64(i))`. Every sample owns its stream, so an
//! estimate depends only on `(seed, N, parameters)` and never on how the
//! indices are spread across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The splitmix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn stream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn stream(seed: u64, index: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, index))
}

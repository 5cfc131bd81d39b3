//! Randomness sources.
//!
//! Every estimate consumes exactly one [`McRng`] stream. Streams for
//! independent repetitions are derived from a master seed and the repetition
//! index, so repetition `i` sees the same random numbers no matter which
//! worker thread ends up running it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type McRng = ChaCha8Rng;

/// Stream `stream` of the generator family keyed by `seed`.
///
/// ChaCha has a 64-bit stream id alongside the key, so distinct
/// `(seed, stream)` pairs give non-overlapping sequences.
pub fn stream_rng(seed: u64, stream: u64) -> McRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a master seed with a tag into a fresh seed (SplitMix64 finalizer).
///
/// Used to give each experiment cell (budget point, sweep cell, ...) its own
/// family of streams.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Reproducible random source shared by every generator.
//!
//! Algorithm: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), keyed by
//! `SeedableRng::seed_from_u64(seed)` (the seed is expanded with PCG32 as
//! `rand_core` specifies). Independent sub-streams are obtained by setting the
//! ChaCha stream id, which splits one seed into 2^64 non-overlapping
//! sequences. Uniform floats use `rand`'s standard `[0, 1)` conversion.
//!
//! Any implementation that reproduces these three steps reproduces every
//! fixture in this repository bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for the primary value draws of a generator.
pub const STREAM_VALUES: u64 = 0;
/// Stream for auxiliary coin flips (atom selection, sampling misses).
pub const STREAM_AUX: u64 = 1;
/// First stream used for per-ego sub-generators in synthetic graphs.
pub const STREAM_EGO_BASE: u64 = 1 << 32;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer, used to derive per-id pseudo-random values without
/// materializing a whole id space.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Maps 64 random bits to a float in `[0, 1)` using the top 53 bits.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

//! Seeded random streams.
//!
//! Every random draw in the crate comes from [`Rng`], a xoshiro256++
//! generator whose 256-bit state is expanded from a 64-bit seed with
//! SplitMix64. Both algorithms are fully specified integer recurrences, so a
//! given seed yields the same stream on every platform. Normal deviates use
//! the ziggurat sampler of `rand_distr::StandardNormal`.

use rand::{Rng as _, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Rng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Derives an independent sub-seed for a named purpose (matrix entries,
/// solution vector, null-space draw) from one user-facing seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // SplitMix64 finalizer over the combined input.
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) const STREAM_MATRIX: u64 = 1;
pub(crate) const STREAM_SOLUTION: u64 = 2;
pub(crate) const STREAM_NULL_SPACE: u64 = 3;

/// Uniform draw in `[0, 1)`.
pub fn uniform(rng: &mut Rng) -> f64 {
    rng.gen::<f64>()
}

pub fn standard_normal(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec(rng: &mut Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| standard_normal(rng)).collect()
}

//! Seeded random streams.
//!
//! Each sketch is drawn from its own ChaCha stream keyed by a root seed and
//! a tuple of tags (column, round, purpose, ...), so any sketch can be
//! regenerated without replaying the others.

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Purpose tags separating the streams used by different sketches.
pub mod purpose {
    pub const SPARSE_RECOVERY: u64 = 0x5350_5253;
    pub const NORM_ESTIMATE: u64 = 0x4e4f_524d;
    pub const SUPPORT_SIZE: u64 = 0x4c30_4c30;
    pub const INSTANCE: u64 = 0x494e_5354;
    pub const SCHEME: u64 = 0x5343_484d;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a root seed with tags into a 64-bit stream key.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

/// Standard Cauchy variate as `tan(π(u - ½))` with `u` uniform on `(0, 1)`.
pub fn cauchy<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    (PI * (u - 0.5)).tan()
}

pub fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

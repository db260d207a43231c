//! Seed derivation for reproducible Monte Carlo runs.
//!
//! Every stochastic operation takes an explicit `u64` seed. Sweeps derive
//! those seeds from `(base_seed, drop_index, stream)` so that each drop and
//! each random quantity within a drop gets an independent ChaCha stream,
//! regardless of scheme order or thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

/// Random quantities drawn within one drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Geometry = 1,
    Snr = 2,
    Channel = 3,
    Csit = 4,
    RbfBeams = 5,
}

/// Drop index used for quantities that stay fixed across drops.
pub const FIXED_DROP: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `stream` of drop `drop_index` under `base_seed`.
pub fn substream(base_seed: u64, drop_index: u64, stream: Stream) -> u64 {
    let a = splitmix64(base_seed);
    let b = splitmix64(a ^ drop_index);
    splitmix64(b ^ (stream as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard circular complex Gaussian sample, `CN(0, 1)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

//! Deterministic random streams and circularly-symmetric Gaussian draws.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha8Rng;

/// Independent stream `index` inside `domain` for a master `seed`.
///
/// Every (seed, domain, index) triple yields its own ChaCha stream, so work
/// split by index (Monte-Carlo trial, dataset original) can be generated in
/// any order and still reproduce bit-identically.
pub fn substream(seed: u64, domain: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(domain)));
    rng.set_stream(index);
    rng
}

/// A child seed for sub-task `index` of `domain` (model init, shuffling, ...).
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(domain)) ^ index)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// One CN(0, variance) sample: real and imaginary parts are independent
/// N(0, variance / 2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = libm::sqrt(variance / 2.0);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Uniform phase in [0, 2π) as a unit phasor.
pub fn unit_phasor<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let phase = rng.random::<f64>() * core::f64::consts::TAU;
    Complex64::from_polar(1.0, phase)
}

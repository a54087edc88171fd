//! Seeded synthetic processes used as fixtures.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::ingest::TimeSeries;
use crate::scalar::Float;

const BURN_IN: usize = 500;

/// Gaussian AR(1) `x_t = phi * x_{t-1} + e_t` after a burn-in of 500 steps.
pub fn ar1<T: Float>(name: &str, phi: f64, len: usize, seed: u64) -> Result<TimeSeries<T>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut x = 0.0f64;
    let mut out = Vec::with_capacity(len);
    for t in 0..BURN_IN + len {
        let e: f64 = StandardNormal.sample(&mut rng);
        x = phi * x + e;
        if t >= BURN_IN {
            out.push(T::of(x));
        }
    }
    TimeSeries::new(name, out)
}

/// Independent standard normal draws.
pub fn white_noise<T: Float>(name: &str, len: usize, seed: u64) -> Result<TimeSeries<T>> {
    ar1(name, 0.0, len, seed)
}

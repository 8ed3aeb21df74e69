//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symroot_core::{CoefficientSet2D, CoefficientSet3D};

pub const SEED: u64 = 0x5eed;

/// Uniform draws from `[-10, 10]^3`.
pub fn coefficients_2d(count: usize) -> Vec<CoefficientSet2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            CoefficientSet2D::new(
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            )
        })
        .collect()
}

pub fn coefficients_3d(count: usize) -> Vec<CoefficientSet3D> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            let mut d = || rng.random_range(-10.0..10.0);
            CoefficientSet3D::new(d(), d(), d(), d())
        })
        .collect()
}

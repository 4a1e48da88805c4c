//! Shared fixtures for the criterion benchmarks.

use gilbert_core::bell::BlochVectors;
use gilbert_core::rng::seeded;
use gilbert_core::steering::{buckyball_directions, steering_point};
use gilbert_core::Point;
use rand_distr::{Distribution, StandardNormal};

/// Gaussian functional of length `len`, reproducible from `seed`.
pub fn random_functional(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Werner correlation point for `n` random settings per party.
pub fn werner_target(n: usize, v: f64, seed: u64) -> Point {
    gilbert_core::bell::werner_point(&BlochVectors::random(n, seed), v)
        .expect("valid directions")
        .values
}

/// The 30-direction buckyball steering point at visibility `v`.
pub fn buckyball_target(v: f64) -> Point {
    steering_point(&buckyball_directions(), v)
        .expect("unit directions")
        .values
}

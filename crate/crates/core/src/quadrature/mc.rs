//! Seeded Monte-Carlo oracle. Independent of the product rules above and
//! used to cross-check them.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use super::{ErrorEstimate, EstimateMethod};
use crate::error::{domain, Result};
use crate::units::GasEnvironment;

/// Seed used whenever the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_0fde_c0de;
/// Smallest sample count accepted by [`mc_oracle`].
pub const MIN_SAMPLES: usize = 10_000;

/// Draws points together with the inverse density, so that
/// `E[weight * f(point)]` equals the integral of `f`.
pub trait Sampler {
    type Point;
    fn sample<R: Rng>(&self, rng: &mut R) -> (Self::Point, f64);
}

pub fn uniform_unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    Vector3::new(s * phi.cos(), s * phi.sin(), z)
}

/// Uniform directions on the unit sphere (integral measure d^2n).
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSphere;

impl Sampler for UniformSphere {
    type Point = Vector3<f64>;
    fn sample<R: Rng>(&self, rng: &mut R) -> (Vector3<f64>, f64) {
        (uniform_unit_vector(rng), 4.0 * PI)
    }
}

/// Independent uniform pairs (integral measure d^2n d^2n').
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSpherePair;

impl Sampler for UniformSpherePair {
    type Point = (Vector3<f64>, Vector3<f64>);
    fn sample<R: Rng>(&self, rng: &mut R) -> ((Vector3<f64>, Vector3<f64>), f64) {
        let a = uniform_unit_vector(rng);
        let b = uniform_unit_vector(rng);
        ((a, b), 16.0 * PI * PI)
    }
}

/// Momentum vectors drawn from the thermal distribution of `gas`
/// (expectation values over d^3p mu(p)).
#[derive(Debug, Clone, Copy)]
pub struct MaxwellBoltzmannMomentum {
    pub gas: GasEnvironment,
}

impl Sampler for MaxwellBoltzmannMomentum {
    type Point = Vector3<f64>;
    fn sample<R: Rng>(&self, rng: &mut R) -> (Vector3<f64>, f64) {
        let sigma = self.gas.thermal_momentum();
        let mut draw = || -> f64 { StandardNormal.sample(rng) };
        (Vector3::new(draw(), draw(), draw()) * sigma, 1.0)
    }
}

/// Plain Monte-Carlo estimate of the integral of `f` with its standard error.
pub fn mc_oracle<S: Sampler>(
    sampler: &S,
    f: impl Fn(&S::Point) -> Complex64,
    n_samples: usize,
    seed: u64,
) -> Result<ErrorEstimate<Complex64>> {
    if n_samples < MIN_SAMPLES {
        return Err(domain(
            "n_samples",
            format!("need at least {MIN_SAMPLES} samples, got {n_samples}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = Complex64::new(0.0, 0.0);
    let mut m2_re = 0.0;
    let mut m2_im = 0.0;
    for i in 0..n_samples {
        let (x, w) = sampler.sample(&mut rng);
        let v = f(&x) * w;
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        let delta2 = v - mean;
        m2_re += delta.re * delta2.re;
        m2_im += delta.im * delta2.im;
    }
    let n = n_samples as f64;
    let var = (m2_re + m2_im) / (n - 1.0);
    Ok(ErrorEstimate {
        value: mean,
        abs_error: (var / n).sqrt(),
        method: EstimateMethod::McStderr,
    })
}

//! Deterministic quadrature over the unit sphere, pairs of spheres and the
//! radial momentum axis.
//!
//! Every integral comes back as an [`ErrorEstimate`]. For the deterministic
//! rules the error is the difference to the same rule at roughly half the
//! order; for the Monte-Carlo oracle in [`mc`] it is the standard error.

use nalgebra::{Rotation3, Unit, Vector3};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, require_positive, Error, Result};
use crate::units::{BlackBodyEnvironment, GasEnvironment};

pub mod mc;

/// Default sphere order: 30 Gauss-Legendre nodes in cos(theta) times 60 in phi.
pub const DEFAULT_SPHERE_ORDER: usize = 29;
/// Default number of radial Gauss-Legendre nodes.
pub const DEFAULT_RADIAL_NODES: usize = 64;
/// Maxwell-Boltzmann cutoff in units of sqrt(m k_B T).
pub const MB_CUTOFF: f64 = 9.0;
/// Planck cutoff in units of k_B T / (hbar c).
pub const PLANCK_CUTOFF: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    RefinementDifference,
    McStderr,
}

/// A value with an absolute error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEstimate<T> {
    pub value: T,
    pub abs_error: f64,
    pub method: EstimateMethod,
}

impl<T> ErrorEstimate<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> ErrorEstimate<U> {
        ErrorEstimate {
            value: f(self.value),
            abs_error: self.abs_error,
            method: self.method,
        }
    }
}

impl ErrorEstimate<f64> {
    /// Scales value and error by a constant factor.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error: self.abs_error * factor.abs(),
            method: self.method,
        }
    }
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence; ascending order.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights affinely mapped to [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on [0, 1] with panels graded geometrically
/// toward t = 0, so integrands with a boundary layer of width down to `t_min`
/// are resolved.
pub fn graded_toward_zero(t_min: f64, ratio: f64, points_per_panel: usize) -> Vec<(f64, f64)> {
    graded_with(&GaussLegendre::new(points_per_panel), t_min, ratio)
}

/// [`graded_toward_zero`] with a prebuilt panel rule.
pub fn graded_with(rule: &GaussLegendre, t_min: f64, ratio: f64) -> Vec<(f64, f64)> {
    let points_per_panel = rule.nodes.len();
    let mut breaks = vec![1.0];
    let mut t = 1.0;
    while t > t_min {
        t /= ratio;
        breaks.push(t);
    }
    breaks.push(0.0);
    let mut out = Vec::with_capacity((breaks.len() - 1) * points_per_panel);
    for pair in breaks.windows(2).rev() {
        out.extend(rule.on_interval(pair[1], pair[0]));
    }
    out
}

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta), trapezoid in phi.
///
/// A grid of order L has L+1 polar and 2(L+1) azimuthal nodes and integrates
/// every spherical harmonic of degree <= L exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    order: usize,
    nodes: Vec<Vector3<f64>>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn product(order: usize) -> Self {
        let n_theta = order + 1;
        let n_phi = 2 * n_theta;
        let gl = GaussLegendre::new(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let st = (1.0 - x * x).sqrt();
            for k in 0..n_phi {
                let phi = (k as f64 + 0.5) * dphi;
                nodes.push(Vector3::new(st * phi.cos(), st * phi.sin(), *x));
                weights.push(w * dphi);
            }
        }
        Self {
            order,
            nodes,
            weights,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Vector3<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vector3<f64>, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    /// The same rule at roughly half the order, used for error estimates.
    pub fn coarsened(&self) -> Self {
        Self::product((self.order.saturating_sub(1) / 2).max(1))
    }

    /// Rigidly rotated copy whose polar axis points along `pole`.
    pub fn aligned_to(&self, pole: &Vector3<f64>) -> Self {
        let rot = Rotation3::rotation_between(&Vector3::z(), pole).unwrap_or_else(|| {
            Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::x()), PI)
        });
        Self {
            order: self.order,
            nodes: self.nodes.iter().map(|n| rot * n).collect(),
            weights: self.weights.clone(),
        }
    }

    fn sum(&self, f: &impl Fn(&Vector3<f64>) -> Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (n, w)) in self.iter().enumerate() {
            let v = f(n);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            acc += v * w;
        }
        Ok(acc)
    }
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self::product(DEFAULT_SPHERE_ORDER)
    }
}

/// Integral of `f` over the unit sphere.
pub fn integrate_sphere(
    grid: &SphereGrid,
    f: impl Fn(&Vector3<f64>) -> Complex64,
) -> Result<ErrorEstimate<Complex64>> {
    let fine = grid.sum(&f)?;
    let coarse = grid.coarsened().sum(&f)?;
    Ok(ErrorEstimate {
        value: fine,
        abs_error: (fine - coarse).norm(),
        method: EstimateMethod::RefinementDifference,
    })
}

/// Integral of `g(n, n')` over the product of two unit spheres.
pub fn integrate_double_sphere(
    grid: &SphereGrid,
    g: impl Fn(&Vector3<f64>, &Vector3<f64>) -> Complex64,
) -> Result<ErrorEstimate<Complex64>> {
    let run = |grid: &SphereGrid| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (n, w)) in grid.iter().enumerate() {
            let inner = grid.sum(&|np: &Vector3<f64>| g(n, np)).map_err(|e| match e {
                Error::NonFinite { node } => Error::NonFinite {
                    node: i * grid.len() + node,
                },
                other => other,
            })?;
            acc += inner * w;
        }
        Ok(acc)
    };
    let fine = run(grid)?;
    let coarse = run(&grid.coarsened())?;
    Ok(ErrorEstimate {
        value: fine,
        abs_error: (fine - coarse).norm(),
        method: EstimateMethod::RefinementDifference,
    })
}

/// What a radial grid was laid out for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialWeight {
    /// exp(-p^2 / 2 sigma^2) with the given sigma.
    Gaussian { sigma: f64 },
    /// Maxwell-Boltzmann momentum with sigma = sqrt(m k_B T).
    MaxwellBoltzmann { sigma: f64 },
    /// Planck wavenumber distribution with scale k_B T / (hbar c).
    Planck { scale: f64 },
    /// Plain interval.
    Uniform,
}

/// Gauss-Legendre rule on [0, cutoff] for radial integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    cutoff: f64,
    n_nodes: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    weight_function: RadialWeight,
}

impl RadialGrid {
    pub fn on_interval(cutoff: f64, n_nodes: usize, weight_function: RadialWeight) -> Result<Self> {
        require_positive("cutoff", cutoff)?;
        if n_nodes < 2 {
            return Err(domain("radial_nodes", "need at least 2 radial nodes"));
        }
        let (nodes, weights) = GaussLegendre::new(n_nodes).on_interval(0.0, cutoff).unzip();
        Ok(Self {
            cutoff,
            n_nodes,
            nodes,
            weights,
            weight_function,
        })
    }

    pub fn gaussian(sigma: f64, n_nodes: usize) -> Result<Self> {
        require_positive("sigma", sigma)?;
        Self::on_interval(MB_CUTOFF * sigma, n_nodes, RadialWeight::Gaussian { sigma })
    }

    pub fn maxwell_boltzmann(gas: &GasEnvironment, n_nodes: usize) -> Result<Self> {
        let sigma = gas.thermal_momentum();
        Self::on_interval(
            MB_CUTOFF * sigma,
            n_nodes,
            RadialWeight::MaxwellBoltzmann { sigma },
        )
    }

    pub fn planck(env: &BlackBodyEnvironment, n_nodes: usize) -> Result<Self> {
        let scale = env.thermal_wavenumber();
        Self::planck_with_cutoff(env, n_nodes, PLANCK_CUTOFF * scale)
    }

    pub fn planck_with_cutoff(env: &BlackBodyEnvironment, n_nodes: usize, cutoff: f64) -> Result<Self> {
        let scale = env.thermal_wavenumber();
        Self::on_interval(cutoff, n_nodes, RadialWeight::Planck { scale })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.n_nodes == 0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_function(&self) -> RadialWeight {
        self.weight_function
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// The same interval with half the nodes.
    pub fn coarsened(&self) -> Self {
        Self::on_interval(self.cutoff, (self.n_nodes / 2).max(2), self.weight_function)
            .expect("coarsening a valid grid")
    }
}

/// Integral of `h(p)` over [0, cutoff].
pub fn integrate_radial(
    grid: &RadialGrid,
    h: impl Fn(f64) -> Complex64,
) -> Result<ErrorEstimate<Complex64>> {
    let run = |g: &RadialGrid| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (p, w)) in g.iter().enumerate() {
            let v = h(p);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            acc += v * w;
        }
        Ok(acc)
    };
    let fine = run(grid)?;
    let coarse = run(&grid.coarsened())?;
    Ok(ErrorEstimate {
        value: fine,
        abs_error: (fine - coarse).norm(),
        method: EstimateMethod::RefinementDifference,
    })
}

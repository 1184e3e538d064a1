//! Angular momentum diffusion.
//!
//! For weak orientational localization the master equation reduces to a
//! diffusion in angular momentum with coefficient D, and the orientational
//! localization rate becomes F = (D/ħ²)|m × m'|². This module provides D for
//! gas collisions, a single laser mode and thermal radiation, and the
//! resulting angular momentum populations
//!
//! ```text
//! p_t(j) = (2j+1)/2 ∫₀^π dθ sinθ P_j(cosθ) exp(-(Dt/ħ²) sin²θ)
//! ```
//!
//! together with their large-time Gaussian asymptote.

use nalgebra::Vector3;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, require_positive, Error, Result};
use crate::quadrature::{graded_with, ErrorEstimate, EstimateMethod, GaussLegendre, RadialGrid};
use crate::quadrature::DEFAULT_RADIAL_NODES;
use crate::rgs::{scattering_rate_gamma0, DielectricRod};
use crate::special::{legendre_table, ZETA_11, ZETA_7};
use crate::units::{BlackBodyEnvironment, GasEnvironment, PhotonMode, C, HBAR};
use crate::vdw::{AnisotropicPotential, EikonalScattering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionSource {
    Gas,
    RayleighGans,
    Blackbody,
}

/// Diffusion coefficient D in (J s)²/s with its numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffusionCoefficient {
    pub value: f64,
    /// Quadrature error; zero for closed forms.
    pub error: f64,
    pub source: DiffusionSource,
}

impl DiffusionCoefficient {
    /// D/ħ² in 1/s.
    pub fn rate(&self) -> f64 {
        self.value / (HBAR * HBAR)
    }
}

/// Points per graded ξ-panel in the collision-rate quadrature.
const GAMMA_PANEL_POINTS: usize = 12;

/// Collision rate γ entering the gas diffusion coefficient, evaluated by
/// Gauss-Legendre quadrature in p and graded quadrature in ξ.
pub fn collision_rate_gamma(pot: &AnisotropicPotential, gas: &GasEnvironment) -> Result<ErrorEstimate<f64>> {
    collision_rate_gamma_with(pot, gas, DEFAULT_RADIAL_NODES)
}

pub fn collision_rate_gamma_with(
    pot: &AnisotropicPotential,
    gas: &GasEnvironment,
    radial_nodes: usize,
) -> Result<ErrorEstimate<f64>> {
    let fine = gamma_sum(pot, gas, radial_nodes, GAMMA_PANEL_POINTS)?;
    let coarse = gamma_sum(pot, gas, radial_nodes / 2, GAMMA_PANEL_POINTS / 2)?;
    Ok(ErrorEstimate {
        value: fine,
        abs_error: (fine - coarse).abs(),
        method: EstimateMethod::RefinementDifference,
    })
}

/// Momentum-independent factor of γ; the remaining double integral runs over
/// μ(p) p⁵ σ₀² exp(-2x Re χ₀) |x χ₀ - 1|² with x = 1 - ξ².
pub(crate) fn gamma_prefactor(pot: &AnisotropicPotential, gas: &GasEnvironment) -> f64 {
    let s = pot.exponent() as f64;
    let shape = (s - 3.0) / (s * (s - 1.0));
    gas.number_density() * shape * shape
        / (2.0 * gas.particle_mass() * HBAR * HBAR * (PI / (s - 1.0)).cos().powi(2))
}

fn gamma_sum(
    pot: &AnisotropicPotential,
    gas: &GasEnvironment,
    radial_nodes: usize,
    panel_points: usize,
) -> Result<f64> {
    let isotropic = EikonalScattering::new(pot.isotropic(), gas.particle_mass())?;
    isotropic.require_amplitudes()?;
    let grid = RadialGrid::maxwell_boltzmann(gas, radial_nodes)?;
    let panel = GaussLegendre::new(panel_points);
    let mut total = 0.0;
    for (p, wp) in grid.iter() {
        let sigma = isotropic.total_cross_section(p, 0.0)?;
        let chi = isotropic.chi(p, 0.0)?;
        let rule = graded_with(&panel, 0.01 / (1.0 + 4.0 * chi.re), 2.0);
        // ∫_{-1}^{1} dξ = 2 ∫_0^1 dt with ξ = 1 - t
        let inner: f64 = rule
            .iter()
            .map(|&(t, w)| {
                let x = t * (2.0 - t);
                w * (-2.0 * x * chi.re).exp() * (chi * x - 1.0).norm_sqr()
            })
            .sum::<f64>()
            * 2.0;
        total += wp * gas.maxwell_boltzmann_pdf(p) * p.powi(5) * sigma * sigma * inner;
    }
    let value = gamma_prefactor(pot, gas) * total;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { node: 0 })
    }
}

/// D = 2γ(ħa)²/15 for gas collisions.
pub fn diffusion_coefficient_gas(pot: &AnisotropicPotential, gas: &GasEnvironment) -> Result<DiffusionCoefficient> {
    let gamma = collision_rate_gamma(pot, gas)?;
    let scale = 2.0 * (HBAR * pot.anisotropy()).powi(2) / 15.0;
    Ok(DiffusionCoefficient {
        value: scale * gamma.value,
        error: scale * gamma.abs_error,
        source: DiffusionSource::Gas,
    })
}

/// γ₀|b|²ħ²[(Δχ/χ∥)²/3 + (kl)⁴/540] for a single laser mode.
pub fn diffusion_coefficient_rg(rod: &DielectricRod, mode: &PhotonMode) -> DiffusionCoefficient {
    let kl = mode.wavenumber() * rod.length();
    let eta = rod.anisotropy_ratio();
    DiffusionCoefficient {
        value: scattering_rate_gamma0(rod, mode) * HBAR * HBAR * (eta * eta / 3.0 + kl.powi(4) / 540.0),
        error: 0.0,
        source: DiffusionSource::RayleighGans,
    }
}

/// Closed-form thermal-radiation coefficient with ζ(7) and ζ(11) terms.
pub fn diffusion_coefficient_blackbody(rod: &DielectricRod, env: &BlackBodyEnvironment) -> DiffusionCoefficient {
    let kt = env.thermal_wavenumber();
    let eta = rod.anisotropy_ratio();
    let lt = kt * rod.length();
    let value = 40.0 * C * (HBAR * rod.chi_parallel() * rod.volume()).powi(2) / PI.powi(3)
        * kt.powi(7)
        * (ZETA_7 * eta * eta + 28.0 * ZETA_11 * lt.powi(4));
    DiffusionCoefficient {
        value,
        error: 0.0,
        source: DiffusionSource::Blackbody,
    }
}

/// Cutoff, in units of k_B T/ħc, of the Planck average below.
pub const BLACKBODY_QUADRATURE_CUTOFF: f64 = 60.0;

/// Planck average of the single-mode coefficient by radial quadrature.
pub fn diffusion_coefficient_blackbody_quadrature(
    rod: &DielectricRod,
    env: &BlackBodyEnvironment,
    nodes: usize,
) -> Result<DiffusionCoefficient> {
    let kt = env.thermal_wavenumber();
    let eta = rod.anisotropy_ratio();
    let pref = HBAR * HBAR * C * (rod.volume() * rod.chi_parallel()).powi(2) / (6.0 * PI.powi(3));
    let run = |n: usize| -> Result<f64> {
        let grid = RadialGrid::planck_with_cutoff(env, n, BLACKBODY_QUADRATURE_CUTOFF * kt)?;
        Ok(grid
            .iter()
            .map(|(k, w)| {
                let bracket = eta * eta / 3.0 + (k * rod.length()).powi(4) / 540.0;
                w * pref * k.powi(6) / (k / kt).exp_m1() * bracket
            })
            .sum())
    };
    let fine = run(nodes)?;
    let coarse = run((nodes / 2).max(2))?;
    Ok(DiffusionCoefficient {
        value: fine,
        error: (fine - coarse).abs(),
        source: DiffusionSource::Blackbody,
    })
}

/// F = (D/ħ²)|m1 × m2|².
pub fn small_anisotropy_rate(d: &DiffusionCoefficient, m1: &Vector3<f64>, m2: &Vector3<f64>) -> Result<f64> {
    for (field, m) in [("m1", m1), ("m2", m2)] {
        if (m.norm() - 1.0).abs() > 1e-10 {
            return Err(domain(field, "orientation must be a unit vector"));
        }
    }
    Ok(d.rate() * m1.cross(m2).norm_squared())
}

// ---------------------------------------------------------------------------
// Populations

/// Tail mass tolerated beyond j_max.
pub const POPULATION_TAIL: f64 = 1e-8;
/// Largest j_max the automatic extension may reach.
pub const J_MAX_CAP: usize = 8192;
const POPULATION_NODES: usize = 512;

/// Angular momentum populations p_t(j), j = 0..=j_max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationVector {
    pub probabilities: Vec<f64>,
    pub time: f64,
    pub diffusion: f64,
}

impl PopulationVector {
    /// Dt/ħ².
    pub fn tau(&self) -> f64 {
        self.diffusion * self.time / (HBAR * HBAR)
    }

    pub fn j_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Σ j(j+1) p(j), i.e. ⟨J²⟩/ħ².
    pub fn second_moment(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, p)| (j * (j + 1)) as f64 * p)
            .sum()
    }

    /// [p(j-1) + 2p(j) + p(j+1)]/4. Odd j are unpopulated from a j = 0 start,
    /// and this smoothing maps the even-j comb onto a density comparable with
    /// the continuum asymptote.
    pub fn parity_averaged(&self) -> Vec<f64> {
        let p = &self.probabilities;
        (0..p.len())
            .map(|j| {
                let left = if j > 0 { p[j - 1] } else { 0.0 };
                let right = p.get(j + 1).copied().unwrap_or(0.0);
                0.25 * (left + 2.0 * p[j] + right)
            })
            .collect()
    }
}

/// Default j_max: ceil(6√τ) + 32.
pub fn default_j_max(tau: f64) -> usize {
    (6.0 * tau.sqrt()).ceil() as usize + 32
}

/// Even-j populations on a precomputed x-rule of [0, 1].
fn population_values(tau: f64, j_max: usize, rule: &[(f64, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; j_max + 1];
    for &(x, w) in rule {
        let weight = w * (-tau * (1.0 - x * x)).exp();
        if weight == 0.0 {
            continue;
        }
        let table = legendre_table(j_max, x);
        for j in (0..=j_max).step_by(2) {
            out[j] += weight * table[j];
        }
    }
    for (j, p) in out.iter_mut().enumerate() {
        *p *= (2 * j + 1) as f64;
    }
    out
}

fn population_rule(tau: f64) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(POPULATION_NODES);
    let split = if tau > 0.0 {
        (10.0 / tau.sqrt()).min(0.5 * PI).cos()
    } else {
        0.0
    };
    let mut rule: Vec<(f64, f64)> = Vec::with_capacity(2 * POPULATION_NODES);
    if split > 0.0 {
        rule.extend(gl.on_interval(0.0, split));
    }
    rule.extend(gl.on_interval(split, 1.0));
    rule
}

/// Populations at time `t` for diffusion coefficient `d`, starting from j = 0.
/// `j_max` defaults to [`default_j_max`] and is extended until the tail
/// mass drops below [`POPULATION_TAIL`].
pub fn populations(d: f64, t: f64, j_max: Option<usize>) -> Result<PopulationVector> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(domain("D", format!("must be finite and >= 0, got {d}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain("t", format!("must be finite and >= 0, got {t}")));
    }
    let tau = d * t / (HBAR * HBAR);
    let rule = population_rule(tau);
    let mut j_max = j_max.unwrap_or_else(|| default_j_max(tau)).clamp(1, J_MAX_CAP);
    loop {
        let probabilities = population_values(tau, j_max, &rule);
        let tail = 1.0 - probabilities.iter().sum::<f64>();
        if tail.abs() < POPULATION_TAIL {
            return Ok(PopulationVector {
                probabilities,
                time: t,
                diffusion: d,
            });
        }
        if j_max >= J_MAX_CAP {
            return Err(Error::Truncation { j_max, tail });
        }
        j_max = (j_max + j_max / 2 + 16).min(J_MAX_CAP);
    }
}

/// (2j+1)(ħ²/4Dt) exp[-(ħ²/4Dt)(j+½)²].
pub fn gaussian_asymptote(d: f64, t: f64, j: usize) -> Result<f64> {
    require_positive("D", d)?;
    require_positive("t", t)?;
    let lambda = HBAR * HBAR / (4.0 * d * t);
    let jh = j as f64 + 0.5;
    Ok((2 * j + 1) as f64 * lambda * (-lambda * jh * jh).exp())
}

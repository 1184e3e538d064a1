//! Spatio-orientational localization rates F and phase frequencies G.
//!
//! Gas scattering (power-law potential, eikonal amplitudes):
//!
//! ```text
//! F = (n_g / 2m) ∫dp p³ μ(p) ∫d²n ∫d²n' |f(n', n; Ω) e^{ip R·(n-n')/ħ} - f(n', n; Ω')|²
//! G = (n_g /  m) ∫dp p³ μ(p) ∫d²n ∫d²n' Im[f(n', n; Ω) f*(n', n; Ω') e^{ip R·(n-n')/ħ}]
//! ```
//!
//! with μ the three-dimensional Maxwell-Boltzmann density evaluated at |p|.
//! Photon scattering (Rayleigh-Gans rod):
//!
//! ```text
//! F = (γ₀|b|² / 2) Σ_s ∫ d²n'/4π |B_{n's}(R, Ω) - B_{n's}(0, Ω')|²
//! ```
//!
//! The eikonal amplitude is sharply peaked around n' = ±n once |χ| is
//! large, so outgoing directions are laid out in a frame aligned with each
//! incoming direction: ξ = n·n' on panels graded toward ξ = ±1 and an
//! azimuthal trapezoid rule. For R = 0 the azimuth is trivial and the
//! ξ-integral of products of two Gaussians in |n × n'|² has the closed form
//! [`overlap`]. Every result carries the difference to a rule of about half
//! the order as its error estimate.

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::quadrature::{graded_with, GaussLegendre, RadialGrid, SphereGrid};
use crate::quadrature::{DEFAULT_RADIAL_NODES, DEFAULT_SPHERE_ORDER};
use crate::rgs::{scattering_rate_gamma0, transverse_basis, DielectricRod};
use crate::special::sinc;
use crate::units::{BlackBodyEnvironment, GasEnvironment, PhotonMode, C, HBAR};
use crate::vdw::{AnisotropicPotential, EikonalScattering};

/// Relative quadrature error above which a result is flagged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.05;
/// Default number of points on the θ-grid of a curve.
pub const DEFAULT_CURVE_POINTS: usize = 181;

/// Displacement R - R' and the two symmetry axes m(Ω), m(Ω').
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairConfiguration {
    pub displacement: Vector3<f64>,
    pub m1: Vector3<f64>,
    pub m2: Vector3<f64>,
}

impl PairConfiguration {
    pub fn new(displacement: Vector3<f64>, m1: Vector3<f64>, m2: Vector3<f64>) -> Result<Self> {
        for (field, m) in [("m1", &m1), ("m2", &m2)] {
            if (m.norm() - 1.0).abs() > 1e-10 {
                return Err(domain(field, "orientation must be a unit vector"));
            }
        }
        if !displacement.iter().all(|x| x.is_finite()) {
            return Err(domain("displacement", "must be finite"));
        }
        Ok(Self {
            displacement,
            m1,
            m2,
        })
    }

    /// Purely orientational pair: m1 = z, m2 in the x-z plane at angle `theta`.
    pub fn at_angle(theta: f64) -> Self {
        Self {
            displacement: Vector3::zeros(),
            m1: Vector3::z(),
            m2: Vector3::new(theta.sin(), 0.0, theta.cos()),
        }
    }

    pub fn is_orientational(&self) -> bool {
        self.displacement == Vector3::zeros()
    }

    /// Angle between the two symmetry axes.
    pub fn angle(&self) -> f64 {
        self.m1.dot(&self.m2).clamp(-1.0, 1.0).acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateWarning {
    /// Error estimate above [`CONVERGENCE_TOLERANCE`] of the value.
    NotConverged { relative_error: f64 },
    /// k² a0² (ε - 1) >= 1 for the given wavenumber.
    ThinRodViolated { parameter: f64 },
}

/// Grid sizes actually used.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GridReport {
    /// Order of the product rule over incoming directions.
    pub sphere_order: usize,
    /// Order of the rule over outgoing directions (photon paths).
    pub outgoing_order: Option<usize>,
    pub radial_nodes: Option<usize>,
    /// Points per graded ξ-panel (gas, R ≠ 0).
    pub panel_points: Option<usize>,
    /// Largest azimuthal rule (gas, R ≠ 0).
    pub azimuth_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    /// F (or G for the phase frequency) in 1/s.
    pub rate: f64,
    pub quadrature_error: f64,
    /// Rate in units of the natural reference rate of the channel, if it has one.
    pub rate_over_gamma: Option<f64>,
    pub inputs: Vec<(String, f64)>,
    pub warnings: Vec<RateWarning>,
    pub grid: GridReport,
}

impl RateResult {
    pub fn is_converged(&self) -> bool {
        !self
            .warnings
            .iter()
            .any(|w| matches!(w, RateWarning::NotConverged { .. }))
    }

    /// Fails with the quadrature error wrapped as a domain error if not converged.
    pub fn require_converged(self) -> Result<Self> {
        if self.is_converged() {
            Ok(self)
        } else {
            Err(domain(
                "quadrature",
                format!(
                    "error {:e} exceeds {}% of rate {:e}",
                    self.quadrature_error,
                    CONVERGENCE_TOLERANCE * 100.0,
                    self.rate
                ),
            ))
        }
    }
}

/// Flags non-convergence, measuring the error against `max(|value|, 1e-9 scale)`.
fn convergence_warning(value: f64, error: f64, scale: f64) -> Option<RateWarning> {
    let reference = value.abs().max(1e-9 * scale.abs());
    if error > CONVERGENCE_TOLERANCE * reference {
        Some(RateWarning::NotConverged {
            relative_error: if reference > 0.0 { error / reference } else { f64::INFINITY },
        })
    } else {
        None
    }
}

fn config_inputs(cfg: &PairConfiguration) -> Vec<(String, f64)> {
    let mut out = Vec::with_capacity(9);
    for (name, v) in [("R", cfg.displacement), ("m1", cfg.m1), ("m2", cfg.m2)] {
        for (axis, x) in ["x", "y", "z"].iter().zip(v.iter()) {
            out.push((format!("{name}_{axis}"), *x));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// ξ-overlap kernel

const OVERLAP_ASYMPTOTIC_MIN: f64 = 50.0;

fn overlap_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| graded_with(&GaussLegendre::new(16), 1e-4, 2.0))
}

/// ∫₀¹ dξ exp(-z (1 - ξ²)) for Re z >= 0.
pub fn overlap(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r >= OVERLAP_ASYMPTOTIC_MIN {
        // (1/2z) Σ_k (2k-1)!! / (2z)^k
        let inv = 0.5 / z;
        let mut term = inv;
        let mut sum = term;
        let mut k = 1.0;
        loop {
            let next = term * ((2.0 * k - 1.0) * inv);
            if next.norm() > term.norm() || next.norm() <= 1e-17 * sum.norm() {
                break;
            }
            sum += next;
            term = next;
            k += 1.0;
        }
        sum
    } else {
        overlap_rule()
            .iter()
            .map(|&(t, w)| (-z * (t * (2.0 - t))).exp() * w)
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Gas

/// Grid parameters for the gas rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasQuadrature {
    /// Order of the product rule over incoming directions.
    pub sphere_order: usize,
    pub radial_nodes: usize,
    /// Gauss-Legendre points per graded ξ-panel (R ≠ 0 only).
    pub panel_points: usize,
}

impl Default for GasQuadrature {
    fn default() -> Self {
        Self {
            sphere_order: DEFAULT_SPHERE_ORDER,
            radial_nodes: DEFAULT_RADIAL_NODES,
            panel_points: 12,
        }
    }
}

impl GasQuadrature {
    fn validate(&self) -> Result<()> {
        if self.sphere_order < 3 {
            return Err(domain("sphere_order", "must be at least 3"));
        }
        if self.radial_nodes < 4 {
            return Err(domain("radial_nodes", "must be at least 4"));
        }
        if self.panel_points < 6 {
            return Err(domain("panel_points", "must be at least 6"));
        }
        Ok(())
    }

    fn coarsened(&self) -> Self {
        Self {
            sphere_order: (self.sphere_order.saturating_sub(1) / 2).max(2),
            radial_nodes: (self.radial_nodes / 2).max(2),
            panel_points: self.panel_points.saturating_sub(4).max(4),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct GasSums {
    rate: f64,
    phase: f64,
    /// Sum of the two single-configuration rates, used as a convergence scale.
    scale: f64,
}

/// Incoming directions in one hemisphere with doubled weights.
fn half_sphere(order: usize) -> Vec<(Vector3<f64>, f64)> {
    SphereGrid::product(order)
        .iter()
        .filter_map(|(n, w)| {
            if n.z > 0.0 {
                Some((*n, 2.0 * w))
            } else if n.z == 0.0 {
                Some((*n, w))
            } else {
                None
            }
        })
        .collect()
}

/// Precomputed radial and angular nodes for the R = 0 gas integrals.
struct OrientationalGas {
    scattering: EikonalScattering,
    /// (p, w_p p³ μ(p) · 4π) pairs.
    radial: Vec<(f64, f64)>,
    incoming: Vec<(Vector3<f64>, f64)>,
}

impl OrientationalGas {
    fn new(scattering: EikonalScattering, gas: &GasEnvironment, quad: &GasQuadrature) -> Result<Self> {
        let grid = RadialGrid::maxwell_boltzmann(gas, quad.radial_nodes)?;
        let radial = grid
            .iter()
            .map(|(p, w)| (p, w * p.powi(3) * gas.maxwell_boltzmann_pdf(p) * 4.0 * PI))
            .collect();
        Ok(Self {
            scattering,
            radial,
            incoming: half_sphere(quad.sphere_order),
        })
    }

    /// Unnormalized sums; multiply `rate` by n_g/2m and `phase` by n_g/m.
    fn sums(&self, m1: &Vector3<f64>, m2: &Vector3<f64>) -> GasSums {
        let mut out = GasSums::default();
        for &(p, wp) in &self.radial {
            let mut rate = 0.0;
            let mut phase = 0.0;
            let mut scale = 0.0;
            for (n, wn) in &self.incoming {
                let a1 = self.scattering.eikonal_unchecked(p, n.dot(m1));
                let a2 = self.scattering.eikonal_unchecked(p, n.dot(m2));
                let d11 = a1.forward.norm_sqr() * overlap(Complex64::new(2.0 * a1.width.re, 0.0)).re;
                let d22 = a2.forward.norm_sqr() * overlap(Complex64::new(2.0 * a2.width.re, 0.0)).re;
                let cross = a1.forward * a2.forward.conj() * overlap(a1.width + a2.width.conj());
                rate += wn * (d11 + d22 - 2.0 * cross.re);
                phase += wn * cross.im;
                scale += wn * (d11 + d22);
            }
            out.rate += wp * rate;
            out.phase += wp * phase;
            out.scale += wp * scale;
        }
        out
    }
}

/// Midpoint nodes (cos ψ, sin ψ) of an n-point azimuthal rule, cached by n.
struct AzimuthTables(Vec<Vec<(f64, f64)>>);

impl AzimuthTables {
    fn get(&mut self, n: usize) -> &[(f64, f64)] {
        if self.0.len() <= n {
            self.0.resize(n + 1, Vec::new());
        }
        if self.0[n].is_empty() {
            let d = 2.0 * PI / n as f64;
            self.0[n] = (0..n)
                .map(|j| {
                    let (s, c) = ((j as f64 + 0.5) * d).sin_cos();
                    (c, s)
                })
                .collect();
        }
        &self.0[n]
    }
}

/// Direct quadrature for arbitrary displacement. `phase_margin` is the
/// number of sphere orders added on top of what the phase e^{ip·R/ħ} needs.
fn general_gas_sums(
    scattering: &EikonalScattering,
    gas: &GasEnvironment,
    cfg: &PairConfiguration,
    quad: &GasQuadrature,
    phase_margin: usize,
) -> Result<(GasSums, GridReport)> {
    let grid = RadialGrid::maxwell_boltzmann(gas, quad.radial_nodes)?;
    let r = cfg.displacement;
    let beta_max = grid.cutoff() * r.norm() / HBAR;
    if beta_max > 400.0 {
        return Err(domain(
            "displacement",
            format!("p|R|/ħ reaches {beta_max:.0} on the momentum grid; at most 400 is supported"),
        ));
    }
    let order = quad.sphere_order.max((1.5 * beta_max).ceil() as usize + phase_margin);
    let sphere = SphereGrid::product(order);
    let panel = GaussLegendre::new(quad.panel_points);
    let mut tables = AzimuthTables(Vec::new());
    let mut sums = GasSums::default();
    let mut azimuth_max = 0;
    for (p, wp) in grid.iter() {
        let weight_p = wp * p.powi(3) * gas.maxwell_boltzmann_pdf(p);
        let chi_max = scattering
            .eikonal_unchecked(p, 0.0)
            .width
            .norm()
            .max(scattering.eikonal_unchecked(p, 1.0).width.norm());
        let rule = graded_with(&panel, 0.02 / (1.0 + 2.0 * chi_max), 4.0);
        let k = p / HBAR;
        for (n, wn) in sphere.iter() {
            let a1 = scattering.eikonal_unchecked(p, n.dot(&cfg.m1));
            let a2 = scattering.eikonal_unchecked(p, n.dot(&cfg.m2));
            let (e1, e2) = transverse_basis(n);
            let rn = k * r.dot(n);
            let r1 = k * r.dot(&e1);
            let r2 = k * r.dot(&e2);
            let r_perp = r1.hypot(r2);
            let mut rate = 0.0;
            let mut phase = 0.0;
            let mut scale = 0.0;
            for &(t, wt) in &rule {
                let x = t * (2.0 - t);
                let f1 = a1.at(x);
                let f2 = a2.at(x);
                let diag = f1.norm_sqr() + f2.norm_sqr();
                let cross = f1 * f2.conj();
                let root = x.sqrt();
                let n_psi = 12 + (2.0 * r_perp * root).ceil() as usize;
                azimuth_max = azimuth_max.max(n_psi);
                let dpsi = 2.0 * PI / n_psi as f64;
                let nodes = tables.get(n_psi);
                // forward (ξ = 1 - t) and backward (ξ = t - 1) hemispheres
                for xi in [1.0 - t, t - 1.0] {
                    let along = rn * (1.0 - xi);
                    let twiddle: Complex64 = nodes
                        .iter()
                        .map(|&(c, s)| Complex64::from_polar(1.0, along - root * (c * r1 + s * r2)))
                        .sum();
                    let z = cross * twiddle * dpsi;
                    rate += wt * (diag * 2.0 * PI - 2.0 * z.re);
                    phase += wt * z.im;
                    scale += wt * diag * 2.0 * PI;
                }
            }
            sums.rate += weight_p * wn * rate;
            sums.phase += weight_p * wn * phase;
            sums.scale += weight_p * wn * scale;
        }
    }
    let report = GridReport {
        sphere_order: order,
        outgoing_order: None,
        radial_nodes: Some(quad.radial_nodes),
        panel_points: Some(quad.panel_points),
        azimuth_nodes: Some(azimuth_max),
    };
    Ok((sums, report))
}

fn gas_inputs(pot: &AnisotropicPotential, gas: &GasEnvironment, cfg: &PairConfiguration) -> Vec<(String, f64)> {
    let mut inputs = vec![
        ("C_Jm^s".to_string(), pot.strength()),
        ("s".to_string(), pot.exponent() as f64),
        ("a".to_string(), pot.anisotropy()),
        ("temperature_K".to_string(), gas.temperature()),
        ("gas_mass_kg".to_string(), gas.particle_mass()),
        ("gas_density_m^-3".to_string(), gas.number_density()),
        (
            "thermal_pR_over_hbar".to_string(),
            gas.thermal_momentum() * cfg.displacement.norm() / HBAR,
        ),
    ];
    inputs.extend(config_inputs(cfg));
    inputs
}

/// Both gas observables (F, G) with their error estimates.
pub fn gas_rates(
    pot: &AnisotropicPotential,
    gas: &GasEnvironment,
    cfg: &PairConfiguration,
    quad: &GasQuadrature,
) -> Result<(RateResult, RateResult)> {
    quad.validate()?;
    let scattering = EikonalScattering::new(*pot, gas.particle_mass())?;
    scattering.require_amplitudes()?;
    let (fine, coarse, grid) = if cfg.is_orientational() {
        let f = OrientationalGas::new(scattering, gas, quad)?.sums(&cfg.m1, &cfg.m2);
        let c = OrientationalGas::new(scattering, gas, &quad.coarsened())?.sums(&cfg.m1, &cfg.m2);
        let grid = GridReport {
            sphere_order: quad.sphere_order,
            radial_nodes: Some(quad.radial_nodes),
            ..GridReport::default()
        };
        (f, c, grid)
    } else {
        let (f, grid) = general_gas_sums(&scattering, gas, cfg, quad, 16)?;
        let (c, _) = general_gas_sums(&scattering, gas, cfg, &quad.coarsened(), 8)?;
        (f, c, grid)
    };
    let pref = gas.number_density() / (2.0 * gas.particle_mass());
    let build = |value: f64, coarse: f64, scale: f64| -> Result<RateResult> {
        if !value.is_finite() {
            return Err(Error::NonFinite { node: 0 });
        }
        let error = (value - coarse).abs();
        Ok(RateResult {
            rate: value,
            quadrature_error: error,
            rate_over_gamma: None,
            inputs: gas_inputs(pot, gas, cfg),
            warnings: convergence_warning(value, error, scale).into_iter().collect(),
            grid,
        })
    };
    let rate = build(pref * fine.rate, pref * coarse.rate, pref * fine.scale)?;
    let phase = build(
        2.0 * pref * fine.phase,
        2.0 * pref * coarse.phase,
        2.0 * pref * fine.scale,
    )?;
    Ok((rate, phase))
}

/// Gas localization rate F in 1/s.
pub fn localization_rate_gas(
    pot: &AnisotropicPotential,
    gas: &GasEnvironment,
    cfg: &PairConfiguration,
) -> Result<RateResult> {
    gas_rates(pot, gas, cfg, &GasQuadrature::default()).map(|(f, _)| f)
}

/// Gas phase frequency G in 1/s (stored in the `rate` field).
pub fn phase_frequency_gas(
    pot: &AnisotropicPotential,
    gas: &GasEnvironment,
    cfg: &PairConfiguration,
) -> Result<RateResult> {
    gas_rates(pot, gas, cfg, &GasQuadrature::default()).map(|(_, g)| g)
}

/// One point of an orientational curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub theta: f64,
    pub rate: f64,
    pub quadrature_error: f64,
    /// Present only if the channel has a reference rate.
    pub rate_over_gamma: Option<f64>,
    pub converged: bool,
}

/// Uniform grid of `n` angles on [0, π].
pub fn theta_grid(n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(domain("theta_points", "theta grid is empty")),
        1 => Ok(vec![0.0]),
        _ => Ok((0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()),
    }
}

fn check_thetas(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(domain("theta", "theta grid is empty"));
    }
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(domain("theta", "angles must be finite"));
    }
    Ok(())
}

/// Orientational gas curve F(θ) for m1 = z and m2 at angle θ in the x-z plane.
pub fn gas_rate_curve(
    pot: &AnisotropicPotential,
    gas: &GasEnvironment,
    thetas: &[f64],
    quad: &GasQuadrature,
) -> Result<Vec<CurvePoint>> {
    check_thetas(thetas)?;
    quad.validate()?;
    let scattering = EikonalScattering::new(*pot, gas.particle_mass())?;
    scattering.require_amplitudes()?;
    let fine = OrientationalGas::new(scattering, gas, quad)?;
    let coarse = OrientationalGas::new(scattering, gas, &quad.coarsened())?;
    let pref = gas.number_density() / (2.0 * gas.particle_mass());
    thetas
        .par_iter()
        .map(|&theta| {
            let cfg = PairConfiguration::at_angle(theta);
            let f = fine.sums(&cfg.m1, &cfg.m2);
            let c = coarse.sums(&cfg.m1, &cfg.m2);
            let rate = pref * f.rate;
            if !rate.is_finite() {
                return Err(Error::NonFinite { node: 0 });
            }
            let error = pref * (f.rate - c.rate).abs();
            Ok(CurvePoint {
                theta,
                rate,
                quadrature_error: error,
                rate_over_gamma: None,
                converged: convergence_warning(rate, error, pref * f.scale).is_none(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Photons

/// Grid parameters for the photon rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonQuadrature {
    /// Order of the rule over outgoing directions n'.
    pub outgoing_order: usize,
    /// Order of the rule over incoming directions (isotropic average only).
    pub incoming_order: usize,
    /// Wavenumber nodes for thermal radiation.
    pub wavenumber_nodes: usize,
}

impl Default for PhotonQuadrature {
    fn default() -> Self {
        Self {
            outgoing_order: DEFAULT_SPHERE_ORDER,
            incoming_order: DEFAULT_SPHERE_ORDER,
            wavenumber_nodes: 24,
        }
    }
}

impl PhotonQuadrature {
    fn validate(&self) -> Result<()> {
        if self.outgoing_order < 3 || self.incoming_order < 3 {
            return Err(domain("sphere_order", "must be at least 3"));
        }
        if self.wavenumber_nodes < 4 {
            return Err(domain("wavenumber_nodes", "must be at least 4"));
        }
        Ok(())
    }

    fn coarsened(&self) -> Self {
        Self {
            outgoing_order: (self.outgoing_order.saturating_sub(1) / 2).max(2),
            incoming_order: (self.incoming_order.saturating_sub(1) / 2).max(2),
            wavenumber_nodes: (self.wavenumber_nodes / 2).max(2),
        }
    }
}

/// (3/16π) ∫d²n' [|v|² - |n'·v|²] with v = u1 s1 e^{iφ} - u2 s2, i.e. F / γ₀|b|².
fn photon_normalized(
    rod: &DielectricRod,
    mode: &PhotonMode,
    cfg: &PairConfiguration,
    order: usize,
) -> f64 {
    let k = mode.wavenumber();
    let n = mode.direction();
    let eps = mode.polarization();
    let kappa = 0.5 * k * rod.length();
    let u1 = rod.polarization_direction(&cfg.m1, &eps);
    let u2 = rod.polarization_direction(&cfg.m2, &eps);
    let uu11 = u1.norm_squared();
    let uu22 = u2.norm_squared();
    let uu12 = u1.dot(&u2);
    let kr = cfg.displacement * k;
    let c1 = kappa * cfg.m1.dot(&n);
    let c2 = kappa * cfg.m2.dot(&n);
    let kr_n = kr.dot(&n);
    let mut acc = 0.0;
    for (np, w) in SphereGrid::product(order).iter() {
        let s1 = sinc(c1 - kappa * cfg.m1.dot(np));
        let s2 = sinc(c2 - kappa * cfg.m2.dot(np));
        let p1 = np.dot(&u1);
        let p2 = np.dot(&u2);
        let phase = kr_n - kr.dot(np);
        let q = s1 * s1 * (uu11 - p1 * p1) + s2 * s2 * (uu22 - p2 * p2)
            - 2.0 * s1 * s2 * phase.cos() * (uu12 - p1 * p2);
        acc += w * q;
    }
    3.0 / (16.0 * PI) * acc
}

fn photon_inputs(rod: &DielectricRod, cfg: &PairConfiguration) -> Vec<(String, f64)> {
    let mut inputs = vec![
        ("length_m".to_string(), rod.length()),
        ("radius_m".to_string(), rod.radius()),
        ("permittivity".to_string(), rod.permittivity()),
    ];
    inputs.extend(config_inputs(cfg));
    inputs
}

/// Photon localization rate F in 1/s for a single running-wave mode.
pub fn localization_rate_photon(
    rod: &DielectricRod,
    mode: &PhotonMode,
    cfg: &PairConfiguration,
) -> Result<RateResult> {
    localization_rate_photon_with(rod, mode, cfg, &PhotonQuadrature::default())
}

pub fn localization_rate_photon_with(
    rod: &DielectricRod,
    mode: &PhotonMode,
    cfg: &PairConfiguration,
    quad: &PhotonQuadrature,
) -> Result<RateResult> {
    quad.validate()?;
    let k = mode.wavenumber();
    let bandwidth = k * cfg.displacement.norm() + 0.5 * k * rod.length();
    if bandwidth > 400.0 {
        return Err(domain(
            "displacement",
            format!("k(|R| + l/2) = {bandwidth:.0}; at most 400 is supported"),
        ));
    }
    let order = quad.outgoing_order.max((2.0 * bandwidth).ceil() as usize + 16);
    let coarse_order = (order.saturating_sub(1) / 2).max(2);
    let fine = photon_normalized(rod, mode, cfg, order);
    let coarse = photon_normalized(rod, mode, cfg, coarse_order);
    let gamma0 = scattering_rate_gamma0(rod, mode);
    let rate = gamma0 * fine;
    let error = gamma0 * (fine - coarse).abs();
    let mut warnings: Vec<RateWarning> =
        convergence_warning(fine, (fine - coarse).abs(), 1.0).into_iter().collect();
    if !rod.thin_rod_valid(k) {
        warnings.push(RateWarning::ThinRodViolated {
            parameter: rod.thin_rod_parameter(k),
        });
    }
    let mut inputs = photon_inputs(rod, cfg);
    inputs.push(("wavenumber_m^-1".to_string(), k));
    inputs.push(("field_amplitude_V/m".to_string(), mode.field_amplitude()));
    Ok(RateResult {
        rate,
        quadrature_error: error,
        rate_over_gamma: Some(fine),
        inputs,
        warnings,
        grid: GridReport {
            sphere_order: order,
            outgoing_order: Some(order),
            ..GridReport::default()
        },
    })
}

/// Spectrum of the isotropic, unpolarized illumination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WavenumberDistribution {
    /// Single wavenumber with field amplitude E0 (V/m).
    Monochromatic { wavenumber: f64, field_amplitude: f64 },
    /// Thermal radiation.
    BlackBody(BlackBodyEnvironment),
}

/// Coefficients of α², αβ, β² in the isotropically averaged F / γ₀|b|²,
/// where α = χ⊥/χ∥ and β = Δχ/χ∥.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments([f64; 3]);

impl Moments {
    fn combine(&self, rod: &DielectricRod) -> f64 {
        let a = rod.perpendicular_ratio();
        let b = rod.anisotropy_ratio();
        a * a * self.0[0] + a * b * self.0[1] + b * b * self.0[2]
    }

    fn add_scaled(&mut self, other: &Moments, w: f64) {
        for i in 0..3 {
            self.0[i] += w * other.0[i];
        }
    }
}

struct IsotropicGrid {
    incoming: Vec<(Vector3<f64>, f64)>,
    outgoing: SphereGrid,
}

impl IsotropicGrid {
    fn new(quad: &PhotonQuadrature) -> Self {
        Self {
            incoming: half_sphere(quad.incoming_order),
            outgoing: SphereGrid::product(quad.outgoing_order),
        }
    }

    /// Moments of the averaged normalized rate for sinc scale κ = kl/2.
    fn moments(&self, kappa: f64, m1: &Vector3<f64>, m2: &Vector3<f64>) -> Moments {
        let mut acc = [0.0; 3];
        for (n, wn) in &self.incoming {
            let (ea, eb) = transverse_basis(n);
            let c1 = kappa * m1.dot(n);
            let c2 = kappa * m2.dot(n);
            let m12 = m1.dot(m2);
            for eps in [ea, eb] {
                let e1 = m1.dot(&eps);
                let e2 = m2.dot(&eps);
                let mut local = [0.0; 3];
                for (np, w) in self.outgoing.iter() {
                    let pm1 = np.dot(m1);
                    let pm2 = np.dot(m2);
                    let pe = np.dot(&eps);
                    let s1 = sinc(c1 - kappa * pm1);
                    let s2 = sinc(c2 - kappa * pm2);
                    let ds = s1 - s2;
                    let q1 = e1 - pe * pm1;
                    let q2 = e2 - pe * pm2;
                    local[0] += w * ds * ds * (1.0 - pe * pe);
                    local[1] += w
                        * 2.0
                        * (e1 * q1 * s1 * ds - e2 * q2 * s2 * ds);
                    local[2] += w
                        * (s1 * s1 * e1 * e1 * (1.0 - pm1 * pm1)
                            + s2 * s2 * e2 * e2 * (1.0 - pm2 * pm2)
                            - 2.0 * s1 * s2 * e1 * e2 * (m12 - pm1 * pm2));
                }
                for i in 0..3 {
                    acc[i] += wn * local[i];
                }
            }
        }
        // (3/4) (1/4π)² (1/2)
        let pref = 3.0 / (128.0 * PI * PI);
        Moments(acc.map(|x| pref * x))
    }
}

/// Per-wavenumber weights of the isotropic average: (κ, weight) with the
/// weight multiplying F/γ₀|b|², plus the reference rate Σ weight.
fn spectrum_nodes(
    rod: &DielectricRod,
    dist: &WavenumberDistribution,
    nodes: usize,
) -> Result<(Vec<(f64, f64)>, f64)> {
    match *dist {
        WavenumberDistribution::Monochromatic {
            wavenumber,
            field_amplitude,
        } => {
            let mode = PhotonMode::new(wavenumber, Vector3::z(), Vector3::x(), field_amplitude)?;
            let g = scattering_rate_gamma0(rod, &mode);
            Ok((vec![(0.5 * wavenumber * rod.length(), g)], g))
        }
        WavenumberDistribution::BlackBody(env) => {
            // n_g μ(k) γ₀(k)|b|² dk = k²/(π²(e^x - 1)) c V0² χ∥² k⁴/(6π) dk
            let grid = RadialGrid::planck(&env, nodes)?;
            let scale = env.thermal_wavenumber();
            let pref = C * (rod.volume() * rod.chi_parallel()).powi(2) / (6.0 * PI.powi(3));
            let mut total = 0.0;
            let mut out = Vec::with_capacity(grid.len());
            for (k, w) in grid.iter() {
                let weight = w * pref * k.powi(6) / (k / scale).exp_m1();
                total += weight;
                out.push((0.5 * k * rod.length(), weight));
            }
            Ok((out, total))
        }
    }
}

/// Normalized (reference rate = 1) spectral weights.
fn spectral_shape(
    rod: &DielectricRod,
    dist: &WavenumberDistribution,
    nodes: usize,
) -> Result<Vec<(f64, f64)>> {
    // the shape does not depend on ε, so evaluate it for a non-transparent copy
    let probe = rod.with_permittivity(2.0)?;
    let (nodes, total) = spectrum_nodes(&probe, dist, nodes)?;
    Ok(nodes.into_iter().map(|(kappa, w)| (kappa, w / total)).collect())
}

fn thin_rod_warning(rod: &DielectricRod, dist: &WavenumberDistribution) -> Option<RateWarning> {
    let k = match *dist {
        WavenumberDistribution::Monochromatic { wavenumber, .. } => wavenumber,
        WavenumberDistribution::BlackBody(env) => 10.0 * env.thermal_wavenumber(),
    };
    (!rod.thin_rod_valid(k)).then(|| RateWarning::ThinRodViolated {
        parameter: rod.thin_rod_parameter(k),
    })
}

fn isotropic_moments(
    grid: &IsotropicGrid,
    shape: &[(f64, f64)],
    m1: &Vector3<f64>,
    m2: &Vector3<f64>,
) -> Moments {
    let mut total = Moments::default();
    for &(kappa, w) in shape {
        total.add_scaled(&grid.moments(kappa, m1, m2), w);
    }
    total
}

/// Photon localization rate averaged over incoming direction and
/// polarization, for a purely orientational configuration (R = 0).
pub fn photon_rate_isotropic_average(
    rod: &DielectricRod,
    dist: &WavenumberDistribution,
    cfg: &PairConfiguration,
    quad: &PhotonQuadrature,
) -> Result<RateResult> {
    if !cfg.is_orientational() {
        return Err(domain("displacement", "isotropic average requires R = 0"));
    }
    let curves = photon_isotropic_curves(
        std::slice::from_ref(rod),
        dist,
        &[(cfg.m1, cfg.m2)],
        quad,
    )?;
    let point = curves[0][0];
    let mut inputs = photon_inputs(rod, cfg);
    match *dist {
        WavenumberDistribution::Monochromatic {
            wavenumber,
            field_amplitude,
        } => {
            inputs.push(("wavenumber_m^-1".to_string(), wavenumber));
            inputs.push(("field_amplitude_V/m".to_string(), field_amplitude));
        }
        WavenumberDistribution::BlackBody(env) => {
            inputs.push(("temperature_K".to_string(), env.temperature()));
        }
    }
    let mut warnings: Vec<RateWarning> = Vec::new();
    if !point.converged {
        let reference = point.rate.abs().max(f64::MIN_POSITIVE);
        warnings.push(RateWarning::NotConverged {
            relative_error: point.quadrature_error / reference,
        });
    }
    warnings.extend(thin_rod_warning(rod, dist));
    Ok(RateResult {
        rate: point.rate,
        quadrature_error: point.quadrature_error,
        rate_over_gamma: point.rate_over_gamma,
        inputs,
        warnings,
        grid: GridReport {
            sphere_order: quad.incoming_order,
            outgoing_order: Some(quad.outgoing_order),
            radial_nodes: matches!(dist, WavenumberDistribution::BlackBody(_))
                .then_some(quad.wavenumber_nodes),
            ..GridReport::default()
        },
    })
}

/// Isotropically averaged photon curves for several rods of equal geometry
/// (differing only in permittivity) over a list of orientation pairs.
/// Returns one curve per rod; `rate_over_gamma` is F divided by the
/// spectrally averaged γ₀|b|² and stays finite at ε = 1.
pub fn photon_isotropic_curves(
    rods: &[DielectricRod],
    dist: &WavenumberDistribution,
    pairs: &[(Vector3<f64>, Vector3<f64>)],
    quad: &PhotonQuadrature,
) -> Result<Vec<Vec<CurvePoint>>> {
    quad.validate()?;
    let Some(first) = rods.first() else {
        return Err(domain("permittivity", "no rods given"));
    };
    if rods
        .iter()
        .any(|r| r.length() != first.length() || r.radius() != first.radius())
    {
        return Err(domain("rods", "all rods must share length and radius"));
    }
    if pairs.is_empty() {
        return Err(domain("theta", "theta grid is empty"));
    }
    for (m1, m2) in pairs {
        for (field, m) in [("m1", m1), ("m2", m2)] {
            if (m.norm() - 1.0).abs() > 1e-10 {
                return Err(domain(field, "orientation must be a unit vector"));
            }
        }
    }
    let coarse_quad = quad.coarsened();
    let shape = spectral_shape(first, dist, quad.wavenumber_nodes)?;
    let coarse_shape = spectral_shape(first, dist, coarse_quad.wavenumber_nodes)?;
    let fine_grid = IsotropicGrid::new(quad);
    let coarse_grid = IsotropicGrid::new(&coarse_quad);
    let moments: Vec<(Moments, Moments)> = pairs
        .par_iter()
        .map(|(m1, m2)| {
            (
                isotropic_moments(&fine_grid, &shape, m1, m2),
                isotropic_moments(&coarse_grid, &coarse_shape, m1, m2),
            )
        })
        .collect();
    rods.iter()
        .map(|rod| {
            let (_, reference) = spectrum_nodes(rod, dist, quad.wavenumber_nodes)?;
            moments
                .iter()
                .zip(pairs)
                .map(|((fine, coarse), (m1, m2))| {
                    let ratio = fine.combine(rod);
                    let ratio_error = (ratio - coarse.combine(rod)).abs();
                    let rate = reference * ratio;
                    if !rate.is_finite() {
                        return Err(Error::NonFinite { node: 0 });
                    }
                    Ok(CurvePoint {
                        theta: m1.dot(m2).clamp(-1.0, 1.0).acos(),
                        rate,
                        quadrature_error: reference * ratio_error,
                        rate_over_gamma: Some(ratio),
                        converged: convergence_warning(ratio, ratio_error, single_rate_scale(rod))
                            .is_none(),
                    })
                })
                .collect()
        })
        .collect()
}

/// Order of magnitude of a normalized single-orientation scattering rate.
fn single_rate_scale(rod: &DielectricRod) -> f64 {
    rod.perpendicular_ratio().powi(2) + rod.anisotropy_ratio().powi(2)
}

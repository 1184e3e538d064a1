//! Eikonal scattering off the homogeneous anisotropic potential
//!
//! ```text
//! V(r, cos T) = -C / r^s * (1 + a cos^2 T),   cos T = m . r / r
//! ```
//!
//! Total cross sections follow from Schiff's eikonal formula and the optical
//! theorem and are valid for s >= 4. The closed-form amplitude is the
//! small-angle (Gaussian in |n x n'|) form and needs s >= 6 because the width
//! function has a Gamma pole at s = 5.
//!
//! The small-angle amplitude is used at *all* scattering angles, hard
//! collisions included. Refining the quadrature grids does not remove this
//! model approximation.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, require_positive, Error, Result};
use crate::special::gamma;
use crate::units::{EPS0, HBAR};

/// Parameters (C, s, a) of the cos^2-anisotropic power-law potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnisotropicPotential {
    strength: f64,
    exponent: u32,
    anisotropy: f64,
}

impl AnisotropicPotential {
    pub fn new(strength: f64, exponent: u32, anisotropy: f64) -> Result<Self> {
        require_positive("strength", strength)?;
        if exponent < 4 {
            return Err(domain(
                "exponent",
                format!("cross sections need s >= 4, got {exponent}"),
            ));
        }
        if !(anisotropy.is_finite() && anisotropy > -1.0) {
            return Err(domain(
                "anisotropy",
                format!("need a > -1 so the potential stays attractive, got {anisotropy}"),
            ));
        }
        Ok(Self {
            strength,
            exponent,
            anisotropy,
        })
    }

    /// Permanent dipole `d0` interacting with the dipole it induces in a gas
    /// particle of polarizability `alpha0`: s = 6, a = 3 and
    /// C = alpha0 d0^2 / (32 pi^2 eps0^2).
    pub fn dipole_induced_dipole(alpha0: f64, d0: f64) -> Result<Self> {
        require_positive("alpha0", alpha0)?;
        require_positive("d0", d0)?;
        let c = alpha0 * d0 * d0 / (32.0 * PI * PI * EPS0 * EPS0);
        Self::new(c, 6, 3.0)
    }

    pub fn with_anisotropy(&self, anisotropy: f64) -> Result<Self> {
        Self::new(self.strength, self.exponent, anisotropy)
    }

    pub fn isotropic(&self) -> Self {
        Self {
            anisotropy: 0.0,
            ..*self
        }
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }
}

/// Forward amplitude and Gaussian width of the small-angle amplitude
/// f = forward * exp(-|n x n'|^2 * width).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EikonalAmplitude {
    pub forward: Complex64,
    pub width: Complex64,
}

impl EikonalAmplitude {
    /// Amplitude at squared cross product |n x n'|^2.
    #[inline]
    pub fn at(&self, cross_sq: f64) -> Complex64 {
        self.forward * (-self.width * cross_sq).exp()
    }
}

/// Scattering of gas particles of mass `mass` off an [`AnisotropicPotential`],
/// with all p- and orientation-independent factors precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EikonalScattering {
    potential: AnisotropicPotential,
    mass: f64,
    power: f64,
    sigma_prefactor: f64,
    aniso_const: f64,
    aniso_slope: f64,
    forward_factor: Complex64,
    width_factor: Option<Complex64>,
}

impl EikonalScattering {
    pub fn new(potential: AnisotropicPotential, mass: f64) -> Result<Self> {
        require_positive("mass", mass)?;
        let s = potential.exponent as f64;
        let a = potential.anisotropy;
        let power = 2.0 / (s - 1.0);
        let g3 = gamma((s - 3.0) / (s - 1.0));
        let base = PI.sqrt() * mass * potential.strength / HBAR * gamma((s - 1.0) / 2.0)
            / gamma(s / 2.0);
        let sigma_prefactor =
            2.0 * PI * (0.5 * PI * (s - 3.0) / (s - 1.0)).sin() * g3 * base.powf(power);
        let cos_pole = (PI / (s - 1.0)).cos();
        let forward_factor = Complex64::from_polar(
            1.0 / (4.0 * PI * HBAR * cos_pole),
            0.5 * PI * (s - 3.0) / (s - 1.0),
        );
        let width_factor = (potential.exponent >= 6).then(|| {
            let modulus = 1.0 / (8.0 * HBAR * HBAR) / (2.0 * PI * cos_pole)
                * gamma((s - 5.0) / (s - 1.0))
                / (g3 * g3);
            Complex64::from_polar(modulus, -PI / (s - 1.0))
        });
        Ok(Self {
            potential,
            mass,
            power,
            sigma_prefactor,
            aniso_const: 1.0 + a * (s - 1.0) / (2.0 * s),
            aniso_slope: a * (s - 3.0) / (2.0 * s),
            forward_factor,
            width_factor,
        })
    }

    pub fn potential(&self) -> &AnisotropicPotential {
        &self.potential
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Orientation-dependent total cross section sigma_a(p n; Omega), with
    /// `cos_theta` = n . m(Omega).
    pub fn total_cross_section(&self, p: f64, cos_theta: f64) -> Result<f64> {
        check_momentum(p)?;
        check_cosine(cos_theta)?;
        Ok(self.sigma_unchecked(p, cos_theta))
    }

    #[inline]
    pub(crate) fn sigma_unchecked(&self, p: f64, cos_theta: f64) -> f64 {
        let bracket = self.aniso_const - self.aniso_slope * cos_theta * cos_theta;
        self.sigma_prefactor * (bracket / p).powf(self.power)
    }

    fn width_factor(&self) -> Result<Complex64> {
        self.width_factor.ok_or(Error::UnsupportedExponent {
            exponent: self.potential.exponent,
        })
    }

    /// Forward amplitude f_fwd(p n; Omega) in metres.
    pub fn forward_amplitude(&self, p: f64, cos_theta: f64) -> Result<Complex64> {
        self.width_factor()?;
        Ok(self.forward_factor * p * self.total_cross_section(p, cos_theta)?)
    }

    /// Dimensionless width function chi_a(p n; Omega).
    pub fn chi(&self, p: f64, cos_theta: f64) -> Result<Complex64> {
        let w = self.width_factor()?;
        Ok(w * p * p * self.total_cross_section(p, cos_theta)?)
    }

    pub fn eikonal(&self, p: f64, cos_theta: f64) -> Result<EikonalAmplitude> {
        let w = self.width_factor()?;
        let sigma = self.total_cross_section(p, cos_theta)?;
        Ok(EikonalAmplitude {
            forward: self.forward_factor * (p * sigma),
            width: w * (p * p * sigma),
        })
    }

    /// Caller guarantees s >= 6 (checked once by [`Self::require_amplitudes`]).
    #[inline]
    pub(crate) fn eikonal_unchecked(&self, p: f64, cos_theta: f64) -> EikonalAmplitude {
        let sigma = self.sigma_unchecked(p, cos_theta);
        EikonalAmplitude {
            forward: self.forward_factor * (p * sigma),
            width: self.width_factor.unwrap_or_default() * (p * p * sigma),
        }
    }

    pub(crate) fn require_amplitudes(&self) -> Result<()> {
        self.width_factor().map(|_| ())
    }

    /// Small-angle amplitude f(p n', p n; Omega) for a body with symmetry axis
    /// `orientation`.
    pub fn amplitude(
        &self,
        p: f64,
        incoming: &Vector3<f64>,
        outgoing: &Vector3<f64>,
        orientation: &Vector3<f64>,
    ) -> Result<Complex64> {
        for (field, v) in [
            ("incoming", incoming),
            ("outgoing", outgoing),
            ("orientation", orientation),
        ] {
            if (v.norm() - 1.0).abs() > 1e-10 {
                return Err(domain(field, "must be a unit vector"));
            }
        }
        let amp = self.eikonal(p, incoming.dot(orientation).clamp(-1.0, 1.0))?;
        Ok(amp.at(incoming.cross(outgoing).norm_squared()))
    }
}

fn check_momentum(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(domain("p", format!("momentum must be > 0, got {p}")))
    }
}

fn check_cosine(c: f64) -> Result<()> {
    if c.is_finite() && c.abs() <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(domain("cos_theta", format!("|cos| must be <= 1, got {c}")))
    }
}

/// Free-function form of [`EikonalScattering::total_cross_section`].
pub fn total_cross_section(pot: &AnisotropicPotential, mass: f64, p: f64, cos_theta: f64) -> Result<f64> {
    EikonalScattering::new(*pot, mass)?.total_cross_section(p, cos_theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{convert_debye, convert_polarizability_volume, AMU};
    use proptest::prelude::*;

    fn he_mass() -> f64 {
        4.002602 * AMU
    }

    fn fig1_potential() -> AnisotropicPotential {
        AnisotropicPotential::dipole_induced_dipole(
            convert_polarizability_volume(0.2),
            convert_debye(5.0),
        )
        .unwrap()
    }

    #[test]
    fn dipole_induced_dipole_constants() {
        let pot = fig1_potential();
        assert_eq!(pot.exponent(), 6);
        assert_eq!(pot.anisotropy(), 3.0);
        // 30-digit re-evaluation of alpha0 d0^2 / (32 pi^2 eps0^2)
        assert!((pot.strength() / 2.500_000_001_361_048e-79 - 1.0).abs() < 1e-13);
        assert!(AnisotropicPotential::dipole_induced_dipole(1e-40, 0.0).is_err());
    }

    #[test]
    fn isotropic_cross_section_ignores_orientation() {
        let sc = EikonalScattering::new(fig1_potential().isotropic(), he_mass()).unwrap();
        let p = 5e-24;
        let reference = sc.total_cross_section(p, 0.0).unwrap();
        for i in 0..100 {
            let c = -1.0 + 2.0 * (i as f64 + 0.5) / 100.0;
            assert_eq!(sc.total_cross_section(p, c).unwrap(), reference);
        }
    }

    #[test]
    fn cross_section_momentum_scaling() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        let p = 3e-24;
        let ratio = sc.total_cross_section(2.0 * p, 0.4).unwrap() / sc.total_cross_section(p, 0.4).unwrap();
        assert!((ratio / 2f64.powf(-0.4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_section_anisotropy_ratio() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        let p = 3e-24;
        let ratio = sc.total_cross_section(p, 1.0).unwrap() / sc.total_cross_section(p, 0.0).unwrap();
        // [(1 + 5a/12 - a/4)/(1 + 5a/12)]^(2/5) at a = 3, 30-digit evaluation
        assert!((ratio - 0.850_283_000_417_193_9).abs() < 1e-14);
    }

    #[test]
    fn cross_section_rejects_bad_momentum() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        assert!(sc.total_cross_section(0.0, 0.1).is_err());
        assert!(sc.total_cross_section(1e-24, 1.5).is_err());
    }

    #[test]
    fn amplitudes_need_s_at_least_six() {
        let pot = AnisotropicPotential::new(1e-60, 5, 0.5).unwrap();
        let sc = EikonalScattering::new(pot, he_mass()).unwrap();
        assert!(sc.total_cross_section(1e-24, 0.3).is_ok());
        assert_eq!(
            sc.chi(1e-24, 0.3),
            Err(Error::UnsupportedExponent { exponent: 5 })
        );
        assert!(AnisotropicPotential::new(1e-60, 3, 0.5).is_err());
        assert!(AnisotropicPotential::new(1e-60, 6, -1.0).is_err());
    }

    #[test]
    fn phases_of_forward_amplitude_and_width() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        for (p, c) in [(1e-25, 0.0), (5e-24, 0.7), (4e-23, -1.0)] {
            let f = sc.forward_amplitude(p, c).unwrap();
            assert!((f.arg() - 0.3 * PI).abs() < 1e-14);
            let chi = sc.chi(p, c).unwrap();
            assert!((chi.arg() + PI / 5.0).abs() < 1e-14);
        }
    }

    #[test]
    fn width_scales_with_p_squared_sigma() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        let p = 2e-24;
        let c = 0.3;
        let chi_ratio = sc.chi(2.0 * p, c).unwrap().norm() / sc.chi(p, c).unwrap().norm();
        let sigma_ratio =
            sc.total_cross_section(2.0 * p, c).unwrap() / sc.total_cross_section(p, c).unwrap();
        assert!((chi_ratio / (4.0 * sigma_ratio) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_forward_limit_and_decay() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        let p = 1e-24;
        let n = Vector3::new(0.0, 0.6, 0.8);
        let m = Vector3::new(1.0, 0.0, 0.0);
        let fwd = sc.forward_amplitude(p, n.dot(&m)).unwrap();
        assert!((sc.amplitude(p, &n, &n, &m).unwrap() - fwd).norm() <= 1e-15 * fwd.norm());
        // Along a great circle through n the modulus never grows.
        let axis = n.cross(&Vector3::new(1.0, 0.0, 0.0)).normalize();
        let mut last = f64::INFINITY;
        for k in 0..=90 {
            let ang = k as f64 * PI / 180.0;
            let np = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), ang) * n;
            let v = sc.amplitude(p, &n, &np, &m).unwrap().norm();
            assert!(v <= last * (1.0 + 1e-15));
            last = v;
        }
    }

    proptest! {
        #[test]
        fn optical_theorem(
            logp in -26.0f64..-22.0,
            c in -1.0f64..1.0,
            a in -0.9f64..5.0,
            s in 6u32..9,
        ) {
            let pot = AnisotropicPotential::new(1e-78, s, a).unwrap();
            let sc = EikonalScattering::new(pot, 6.6e-27).unwrap();
            let p = 10f64.powf(logp);
            let f = sc.forward_amplitude(p, c).unwrap();
            let sigma = sc.total_cross_section(p, c).unwrap();
            prop_assert!((4.0 * PI * HBAR * f.im / p / sigma - 1.0).abs() < 1e-12);
        }

        #[test]
        fn orientation_flip_invariance(
            p in 1e-25f64..1e-23,
            theta in 0.0f64..PI,
            phi in 0.0f64..(2.0 * PI),
            a in 0.0f64..3.0,
        ) {
            let sc = EikonalScattering::new(fig1_potential().with_anisotropy(a).unwrap(), he_mass()).unwrap();
            let m = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let n = Vector3::new(0.0, 0.0, 1.0);
            let np = Vector3::new(0.1, 0.2, (1.0f64 - 0.05).sqrt());
            let f1 = sc.amplitude(p, &n, &np, &m).unwrap();
            let f2 = sc.amplitude(p, &n, &np, &(-m)).unwrap();
            prop_assert!((f1 - f2).norm() <= 1e-15 * f1.norm());
        }
    }

    #[test]
    fn width_has_positive_real_part() {
        let sc = EikonalScattering::new(fig1_potential(), he_mass()).unwrap();
        assert!(sc.chi(3e-24, 0.2).unwrap().re > 0.0);
    }
}

//! Rayleigh-Gans scattering off a thin dielectric rod illuminated by a
//! linearly polarized plane wave.
//!
//! The mode volume never appears in the public API: rates and potentials
//! are expressed through the field amplitude E0 of the incoming wave.
//!
//! The optical theorem does not hold for the Rayleigh-Gans amplitude, so
//! total scattering rates are always obtained by integrating |F|^2 (or the
//! jump functions) over outgoing directions, never from Im F.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, require_positive, Result};
use crate::special::sinc;
use crate::units::{PhotonMode, EPS0, HBAR};

/// Thin rod of length `length`, radius `radius` and relative permittivity
/// `permittivity` (>= 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DielectricRod {
    length: f64,
    radius: f64,
    permittivity: f64,
}

impl DielectricRod {
    pub fn new(length: f64, radius: f64, permittivity: f64) -> Result<Self> {
        require_positive("length", length)?;
        require_positive("radius", radius)?;
        if !(permittivity.is_finite() && permittivity >= 1.0) {
            return Err(domain(
                "permittivity",
                format!("must be >= 1, got {permittivity}"),
            ));
        }
        Ok(Self {
            length,
            radius,
            permittivity,
        })
    }

    pub fn with_permittivity(&self, permittivity: f64) -> Result<Self> {
        Self::new(self.length, self.radius, permittivity)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn permittivity(&self) -> f64 {
        self.permittivity
    }

    /// V0 = pi l a0^2
    pub fn volume(&self) -> f64 {
        PI * self.length * self.radius * self.radius
    }

    /// Susceptibility along the symmetry axis.
    pub fn chi_parallel(&self) -> f64 {
        self.permittivity - 1.0
    }

    /// Susceptibility perpendicular to the symmetry axis.
    pub fn chi_perpendicular(&self) -> f64 {
        2.0 * (self.permittivity - 1.0) / (self.permittivity + 1.0)
    }

    /// Delta chi = chi_par - chi_perp = (eps - 1)^2 / (eps + 1) >= 0.
    pub fn delta_chi(&self) -> f64 {
        (self.permittivity - 1.0).powi(2) / (self.permittivity + 1.0)
    }

    /// chi_perp / chi_par, finite at eps = 1.
    pub fn perpendicular_ratio(&self) -> f64 {
        2.0 / (self.permittivity + 1.0)
    }

    /// Relative anisotropy Delta chi / chi_par, finite at eps = 1.
    pub fn anisotropy_ratio(&self) -> f64 {
        (self.permittivity - 1.0) / (self.permittivity + 1.0)
    }

    pub fn is_transparent(&self) -> bool {
        self.permittivity == 1.0
    }

    /// k^2 a0^2 (eps - 1); the thin-rod approximation wants this below one.
    pub fn thin_rod_parameter(&self, k: f64) -> f64 {
        k * k * self.radius * self.radius * (self.permittivity - 1.0)
    }

    pub fn thin_rod_valid(&self, k: f64) -> bool {
        self.thin_rod_parameter(k) < 1.0
    }

    /// u(Omega) via the finite ratios; equals the incoming polarization at eps = 1.
    #[inline]
    pub(crate) fn polarization_direction(&self, m: &Vector3<f64>, eps_p: &Vector3<f64>) -> Vector3<f64> {
        eps_p * self.perpendicular_ratio() + m * (self.anisotropy_ratio() * m.dot(eps_p))
    }
}

/// Direction of the internal polarization field,
/// u = (chi_perp/chi_par) eps_p + (Delta chi/chi_par)(m . eps_p) m. Not a unit vector.
pub fn internal_polarization(
    rod: &DielectricRod,
    m: &Vector3<f64>,
    eps_p: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    if rod.is_transparent() {
        return Err(domain(
            "permittivity",
            "chi_par vanishes for a transparent rod (eps = 1)",
        ));
    }
    Ok(rod.polarization_direction(m, eps_p))
}

/// Vector scattering amplitude (metres) with the thin-rod validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorAmplitude {
    pub value: Vector3<f64>,
    pub thin_rod_valid: bool,
}

/// Rayleigh-Gans vector amplitude F(p n', p n; Omega) for scattering the
/// mode into direction `outgoing`. The amplitude is real.
pub fn vector_amplitude(
    rod: &DielectricRod,
    mode: &PhotonMode,
    outgoing: &Vector3<f64>,
    m: &Vector3<f64>,
) -> Result<VectorAmplitude> {
    check_unit("outgoing", outgoing)?;
    check_unit("orientation", m)?;
    let k = mode.wavenumber();
    let eps = mode.polarization();
    // chi_par * u, well defined for every eps >= 1
    let chi_u = eps * rod.chi_perpendicular() + m * (rod.delta_chi() * m.dot(&eps));
    let transverse = outgoing.cross(&outgoing.cross(&chi_u));
    let shape = sinc(0.5 * k * rod.length() * m.dot(&(mode.direction() - outgoing)));
    Ok(VectorAmplitude {
        value: transverse * (-rod.volume() * k * k / (4.0 * PI) * shape),
        thin_rod_valid: rod.thin_rod_valid(k),
    })
}

/// gamma_0 |b|^2 = eps0 E0^2 chi_par^2 V0^2 k^3 / (12 pi hbar), in 1/s.
pub fn scattering_rate_gamma0(rod: &DielectricRod, mode: &PhotonMode) -> f64 {
    let e0 = mode.field_amplitude();
    let k = mode.wavenumber();
    EPS0 * e0 * e0 * (rod.chi_parallel() * rod.volume()).powi(2) * k.powi(3) / (12.0 * PI * HBAR)
}

/// Two transverse polarization vectors for a propagation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarizationBasis {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
}

impl PolarizationBasis {
    /// Gram-Schmidt of the coordinate axis with the smallest overlap with `n`.
    pub fn for_direction(n: &Vector3<f64>) -> Self {
        let (e1, e2) = transverse_basis(n);
        Self { e1, e2 }
    }

    pub fn get(&self, index: usize) -> Vector3<f64> {
        match index {
            0 => self.e1,
            _ => self.e2,
        }
    }

    /// The basis rotated by `angle` about the propagation direction.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            e1: self.e1 * c + self.e2 * s,
            e2: self.e2 * c - self.e1 * s,
        }
    }
}

/// Orthonormal pair (e1, e2) with e1 x e2 = n.
pub(crate) fn transverse_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let abs = n.abs();
    let axis = if abs.x <= abs.y && abs.x <= abs.z {
        Vector3::x()
    } else if abs.y <= abs.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e1 = (axis - n * n.dot(&axis)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Jump function B_{n's}(R, Omega) for scattering into `outgoing` with
/// polarization `basis.get(pol)`.
pub fn jump_function(
    rod: &DielectricRod,
    mode: &PhotonMode,
    outgoing: &Vector3<f64>,
    basis: &PolarizationBasis,
    pol: usize,
    position: &Vector3<f64>,
    m: &Vector3<f64>,
) -> Result<Complex64> {
    if pol > 1 {
        return Err(domain("pol", "polarization index must be 0 or 1"));
    }
    check_unit("outgoing", outgoing)?;
    let u = internal_polarization(rod, m, &mode.polarization())?;
    let k = mode.wavenumber();
    let q = mode.direction() - outgoing;
    let shape = sinc(0.5 * k * rod.length() * m.dot(&q));
    let value = 1.5f64.sqrt() * basis.get(pol).dot(&u) * shape;
    Ok(Complex64::from_polar(value, k * q.dot(position)))
}

/// Orientational laser potential H_L(Omega) in joules. Most negative for
/// m parallel to the polarization.
pub fn laser_potential(rod: &DielectricRod, mode: &PhotonMode, m: &Vector3<f64>) -> f64 {
    let e0 = mode.field_amplitude();
    let proj = m.dot(&mode.polarization());
    -EPS0 * rod.volume() * e0 * e0 / 4.0
        * (rod.chi_perpendicular() + rod.delta_chi() * proj * proj)
}

fn check_unit(field: &'static str, v: &Vector3<f64>) -> Result<()> {
    if (v.norm() - 1.0).abs() > 1e-10 {
        Err(domain(field, "must be a unit vector"))
    } else {
        Ok(())
    }
}

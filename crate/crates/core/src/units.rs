//! Physical constants, unit conversions and the momentum distributions of the
//! environments (thermal gas, laser mode, black body).
//!
//! Everything is SI. Values are CODATA 2018 and never change at run time, so
//! outputs are bit-reproducible across builds.

use nalgebra::Vector3;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, require_positive, Result};
use crate::special::ZETA_3;

/// Tag written into output headers.
pub const CONSTANTS_VERSION: &str = "CODATA-2018";

/// Reduced Planck constant (J s)
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K)
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light (m/s)
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m)
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Atomic mass constant (kg)
pub const AMU: f64 = 1.660_539_066_60e-27;
/// One debye in C m (10^-21 / c).
pub const DEBYE: f64 = 1e-21 / C;
/// One cubic angstrom in m^3.
pub const ANGSTROM3: f64 = 1e-30;

/// Bundle of the compiled-in constants, for echoing into output headers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub eps0: f64,
}

impl Constants {
    pub const CODATA_2018: Constants = Constants {
        hbar: HBAR,
        k_b: K_B,
        c: C,
        eps0: EPS0,
    };
}

/// Dipole moment in debye to C m.
pub fn convert_debye(d: f64) -> f64 {
    d * DEBYE
}

/// Inverse of [`convert_debye`].
pub fn to_debye(d_si: f64) -> f64 {
    d_si / DEBYE
}

/// Polarizability volume alpha/(4 pi eps0) in cubic angstrom to the SI
/// polarizability in C m^2/V.
pub fn convert_polarizability_volume(a: f64) -> f64 {
    4.0 * PI * EPS0 * a * ANGSTROM3
}

/// Inverse of [`convert_polarizability_volume`].
pub fn to_polarizability_volume(alpha_si: f64) -> f64 {
    alpha_si / (4.0 * PI * EPS0 * ANGSTROM3)
}

/// Homogeneous ideal gas in thermal equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasEnvironment {
    temperature: f64,
    particle_mass: f64,
    number_density: f64,
}

impl GasEnvironment {
    pub fn new(temperature: f64, particle_mass: f64, number_density: f64) -> Result<Self> {
        require_positive("temperature", temperature)?;
        require_positive("particle_mass", particle_mass)?;
        require_positive("number_density", number_density)?;
        Ok(Self {
            temperature,
            particle_mass,
            number_density,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn particle_mass(&self) -> f64 {
        self.particle_mass
    }

    pub fn number_density(&self) -> f64 {
        self.number_density
    }

    /// sqrt(m k_B T), the standard deviation of one momentum component.
    pub fn thermal_momentum(&self) -> f64 {
        (self.particle_mass * K_B * self.temperature).sqrt()
    }

    /// Isotropic three-dimensional Maxwell-Boltzmann density evaluated at
    /// |p| = `p`. Normalized so that the integral over d^3p is one.
    pub fn maxwell_boltzmann_pdf(&self, p: f64) -> f64 {
        let mkt = self.particle_mass * K_B * self.temperature;
        (2.0 * PI * mkt).powf(-1.5) * (-p * p / (2.0 * mkt)).exp()
    }
}

/// Free function form of [`GasEnvironment::maxwell_boltzmann_pdf`].
pub fn maxwell_boltzmann_pdf(gas: &GasEnvironment, p: f64) -> f64 {
    gas.maxwell_boltzmann_pdf(p)
}

const UNIT_TOLERANCE: f64 = 1e-10;

/// A linearly polarized running plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonMode {
    wavenumber: f64,
    direction: Vector3<f64>,
    polarization: Vector3<f64>,
    field_amplitude: f64,
}

impl PhotonMode {
    pub fn new(
        wavenumber: f64,
        direction: Vector3<f64>,
        polarization: Vector3<f64>,
        field_amplitude: f64,
    ) -> Result<Self> {
        require_positive("wavenumber", wavenumber)?;
        if !(field_amplitude.is_finite() && field_amplitude >= 0.0) {
            return Err(domain("field_amplitude", "must be finite and >= 0"));
        }
        if (direction.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(domain("direction", "must be a unit vector"));
        }
        if (polarization.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(domain("polarization", "must be a unit vector"));
        }
        if direction.dot(&polarization).abs() > UNIT_TOLERANCE {
            return Err(domain(
                "polarization",
                "must be orthogonal to the propagation direction",
            ));
        }
        Ok(Self {
            wavenumber,
            direction,
            polarization,
            field_amplitude,
        })
    }

    pub fn from_wavelength(
        wavelength: f64,
        direction: Vector3<f64>,
        polarization: Vector3<f64>,
        field_amplitude: f64,
    ) -> Result<Self> {
        require_positive("wavelength", wavelength)?;
        Self::new(2.0 * PI / wavelength, direction, polarization, field_amplitude)
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.direction
    }

    pub fn polarization(&self) -> Vector3<f64> {
        self.polarization
    }

    pub fn field_amplitude(&self) -> f64 {
        self.field_amplitude
    }

    /// Angular frequency, omega = c k.
    pub fn angular_frequency(&self) -> f64 {
        C * self.wavenumber
    }
}

/// Isotropic thermal radiation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlackBodyEnvironment {
    temperature: f64,
}

impl BlackBodyEnvironment {
    pub fn new(temperature: f64) -> Result<Self> {
        require_positive("temperature", temperature)?;
        Ok(Self { temperature })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Thermal wavenumber k_B T / (hbar c).
    pub fn thermal_wavenumber(&self) -> f64 {
        K_B * self.temperature / (HBAR * C)
    }

    /// Photon number density 2 zeta(3) (k_B T / hbar c)^3 / pi^2.
    pub fn photon_density(&self) -> f64 {
        2.0 * ZETA_3 * self.thermal_wavenumber().powi(3) / (PI * PI)
    }

    /// Normalized Planck wavenumber density mu(k) together with the photon
    /// density n_g it was normalized by.
    pub fn planck_wavenumber_pdf(&self, k: f64) -> Result<(f64, f64)> {
        if !(k.is_finite() && k > 0.0) {
            return Err(domain("k", format!("wavenumber must be > 0, got {k}")));
        }
        let n_g = self.photon_density();
        let x = k / self.thermal_wavenumber();
        let density = k * k / (n_g * PI * PI * x.exp_m1());
        Ok((density, n_g))
    }
}

/// Free function form of [`BlackBodyEnvironment::planck_wavenumber_pdf`].
pub fn planck_wavenumber_pdf(env: &BlackBodyEnvironment, k: f64) -> Result<(f64, f64)> {
    env.planck_wavenumber_pdf(k)
}

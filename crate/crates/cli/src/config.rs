//! Run configuration. Every physical input carries its unit in the key name.
#![allow(non_snake_case)]

use serde::Deserialize;
use std::path::PathBuf;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    RateGas,
    RatePhoton,
    RatePhotonIsotropic,
    Diffusion,
    Populations,
    ClassicalSim,
    Fig1,
    Fig2a,
    Fig2b,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::RateGas => "rate-gas",
            Scenario::RatePhoton => "rate-photon",
            Scenario::RatePhotonIsotropic => "rate-photon-isotropic",
            Scenario::Diffusion => "diffusion",
            Scenario::Populations => "populations",
            Scenario::ClassicalSim => "classical-sim",
            Scenario::Fig1 => "fig1",
            Scenario::Fig2a => "fig2a",
            Scenario::Fig2b => "fig2b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: Scenario,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    pub gas: Option<GasSection>,
    pub potential: Option<PotentialSection>,
    pub rod: Option<RodSection>,
    pub laser: Option<LaserSection>,
    pub spectrum: Option<SpectrumSection>,
    pub diffusion: Option<DiffusionSection>,
    pub populations: Option<PopulationsSection>,
    pub rotor: Option<RotorSection>,
    #[serde(default)]
    pub quadrature: QuadratureSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Orientation pairs are m1 = z and m2 at angle θ in the x-z plane.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Uniform grid on [0, π].
    pub theta_points: Option<usize>,
    /// Explicit angles; overrides `theta_points`.
    pub theta_rad: Option<Vec<f64>>,
    pub displacement_m: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub temperature_K: f64,
    pub mass_amu: f64,
    pub density_m3: f64,
}

/// Either `alpha0_A3` with `d0_debye` (s = 6), or `strength_J_m_s` with `exponent`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub alpha0_A3: Option<f64>,
    pub d0_debye: Option<f64>,
    pub strength_J_m_s: Option<f64>,
    pub exponent: Option<u32>,
    pub anisotropy: Option<f64>,
    pub anisotropies: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodSection {
    pub length_m: f64,
    pub radius_m: f64,
    pub permittivity: Option<f64>,
    pub permittivities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub wavelength_m: f64,
    pub field_V_per_m: f64,
    pub direction: Option<[f64; 3]>,
    pub polarization: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpectrumSection {
    Monochromatic { wavelength_m: f64, field_V_per_m: f64 },
    Blackbody { temperature_K: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionSourceKey {
    Gas,
    RayleighGans,
    Blackbody,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionSection {
    pub source: DiffusionSourceKey,
    /// Required for the blackbody source.
    pub temperature_K: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationsSection {
    pub diffusion_J2_per_s: f64,
    pub time_s: f64,
    pub j_max: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotorSection {
    pub inertia_kg_m2: f64,
    pub diffusion_J2_per_s: f64,
    /// Zero disables friction.
    #[serde(default)]
    pub temperature_K: f64,
    pub dt_s: f64,
    pub t_final_s: f64,
    pub n_traj: usize,
    pub seed: u64,
    #[serde(default = "default_records")]
    pub records: usize,
    pub initial_axis: Option<[f64; 3]>,
    pub initial_J_kg_m2_per_s: Option<[f64; 3]>,
}

fn default_records() -> usize {
    20
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub sphere_order: Option<usize>,
    pub radial_nodes: Option<usize>,
    pub panel_points: Option<usize>,
    pub incoming_order: Option<usize>,
    pub wavenumber_nodes: Option<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Config for a built-in figure scenario with all defaults.
    pub fn preset(scenario: Scenario) -> Self {
        Self {
            scenario,
            output: OutputSection::default(),
            geometry: GeometrySection::default(),
            gas: None,
            potential: None,
            rod: None,
            laser: None,
            spectrum: None,
            diffusion: None,
            populations: None,
            rotor: None,
            quadrature: QuadratureSection::default(),
        }
    }
}

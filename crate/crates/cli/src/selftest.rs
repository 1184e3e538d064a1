//! Invariant battery run by `orientdecoh selftest`.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

use orientdecoh::angdiff::populations;
use orientdecoh::locrate::{gas_rates, GasQuadrature, PairConfiguration};
use orientdecoh::quadrature::mc::uniform_unit_vector;
use orientdecoh::rotorsim::{evolve_ensemble, ks_statistic_exponential, RotorState, SimulationConfig};
use orientdecoh::units::{convert_debye, convert_polarizability_volume, GasEnvironment, AMU, HBAR, K_B};
use orientdecoh::vdw::{AnisotropicPotential, EikonalScattering};

use crate::report::fmt_number;

/// Options for [`selftest`]. `hbar_factor` rescales ħ inside the
/// optical-theorem check only and exists to exercise failure reporting.
#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub hbar_factor: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            hbar_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<28} measured={} tolerance={}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                fmt_number(c.measured),
                fmt_number(c.tolerance)
            );
        }
        let _ = writeln!(out, "{}", if self.passed() { "selftest: all checks passed" } else { "selftest: FAILED" });
        out
    }
}

fn check(name: &'static str, measured: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        measured,
        tolerance,
        passed: measured.is_finite() && measured <= tolerance,
    }
}

fn helium() -> GasEnvironment {
    GasEnvironment::new(300.0, 4.002602 * AMU, 1e20).expect("valid gas")
}

fn reference_potential() -> AnisotropicPotential {
    AnisotropicPotential::dipole_induced_dipole(convert_polarizability_volume(0.2), convert_debye(5.0))
        .expect("valid potential")
}

/// Largest relative violation of 4πħ Im f(forward)/p = σ over random inputs.
fn optical_theorem(rng: &mut ChaCha8Rng, hbar: f64) -> f64 {
    let gas = helium();
    let c6 = reference_potential().strength();
    let r0: f64 = 3e-10;
    let p_th = gas.thermal_momentum();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = rng.gen_range(6..=8u32);
        let a = rng.gen_range(-0.5..3.0);
        let pot = AnisotropicPotential::new(c6 * r0.powi(s as i32 - 6), s, a).expect("valid potential");
        let sc = EikonalScattering::new(pot, gas.particle_mass()).expect("valid scattering");
        let p = p_th * rng.gen_range(0.05..9.0);
        let cos = rng.gen_range(-1.0..1.0);
        let f = sc.forward_amplitude(p, cos).expect("amplitude");
        let sigma = sc.total_cross_section(p, cos).expect("cross section");
        worst = worst.max((4.0 * std::f64::consts::PI * hbar * f.im / p / sigma - 1.0).abs());
    }
    worst
}

fn population_norm_and_moment() -> (f64, f64) {
    let d = HBAR * HBAR;
    let mut norm: f64 = 0.0;
    let mut moment: f64 = 0.0;
    for tau in [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0] {
        match populations(d, tau, None) {
            Ok(p) => {
                norm = norm.max((p.norm() - 1.0).abs());
                moment = moment.max((p.second_moment() / (4.0 * tau) - 1.0).abs());
            }
            Err(_) => return (f64::INFINITY, f64::INFINITY),
        }
    }
    (norm, moment)
}

fn diagonal_gas(rng: &mut ChaCha8Rng) -> f64 {
    let gas = helium();
    let quad = GasQuadrature {
        sphere_order: 11,
        radial_nodes: 16,
        panel_points: 8,
    };
    let mut worst: f64 = 0.0;
    for a in [0.5, 2.0] {
        let pot = reference_potential().with_anisotropy(a).expect("valid anisotropy");
        let m = uniform_unit_vector(rng);
        let cfg = PairConfiguration::new(Vector3::zeros(), m, m).expect("valid pair");
        match gas_rates(&pot, &gas, &cfg, &quad) {
            Ok((f, g)) => worst = worst.max(f.rate.abs()).max(g.rate.abs()),
            Err(_) => return f64::INFINITY,
        }
    }
    worst
}

fn rotor_checks(seed: u64) -> (f64, f64, f64) {
    let initial = RotorState::new(Vector3::z(), Vector3::zeros()).expect("valid state");
    let free = SimulationConfig {
        inertia: 1.0,
        diffusion: 1.0,
        temperature: 0.0,
        dt: 0.01,
        n_traj: 10_000,
        seed,
    };
    let slope = match evolve_ensemble(&free, &initial, 1.0, 10) {
        Ok(r) => (r.j2_slope() / 4.0 - 1.0).abs(),
        Err(_) => f64::INFINITY,
    };
    let inertia = 1e-40;
    let temperature = 300.0;
    let kt = K_B * temperature;
    let damped = SimulationConfig {
        inertia,
        diffusion: inertia * kt,
        temperature,
        dt: 0.01,
        n_traj: 10_000,
        seed: seed.wrapping_add(1),
    };
    match evolve_ensemble(&damped, &initial, 8.0, 1) {
        Ok(r) => {
            let mean = r.final_energies.iter().sum::<f64>() / r.final_energies.len() as f64;
            (slope, (mean / kt - 1.0).abs(), ks_statistic_exponential(&r.final_energies, kt))
        }
        Err(_) => (slope, f64::INFINITY, f64::INFINITY),
    }
}

pub fn selftest(opts: &SelftestOptions) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = vec![check("optical-theorem", optical_theorem(&mut rng, HBAR * opts.hbar_factor), 1e-12)];
    let (norm, moment) = population_norm_and_moment();
    checks.push(check("population-normalization", norm, 1e-8));
    checks.push(check("population-moment-4Dt", moment, 1e-3));
    checks.push(check("gas-diagonal-rate", diagonal_gas(&mut rng), 0.0));
    let (slope, energy, ks) = rotor_checks(opts.seed);
    checks.push(check("classical-J2-slope-4D", slope, 0.03));
    checks.push(check("classical-thermal-energy", energy, 0.03));
    checks.push(check("classical-energy-ks", ks, 0.02));
    SelftestReport { checks }
}

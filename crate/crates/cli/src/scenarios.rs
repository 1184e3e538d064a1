//! Scenario drivers: validate the config, compute, and fill a [`Report`].

use nalgebra::Vector3;
use rayon::prelude::*;
use std::f64::consts::PI;

use orientdecoh::angdiff::{
    collision_rate_gamma, diffusion_coefficient_blackbody, diffusion_coefficient_gas, diffusion_coefficient_rg,
    gaussian_asymptote, populations, DiffusionCoefficient,
};
use orientdecoh::locrate::{
    gas_rate_curve, gas_rates, localization_rate_photon_with, photon_isotropic_curves, theta_grid, CurvePoint,
    GasQuadrature, PairConfiguration, PhotonQuadrature, WavenumberDistribution, DEFAULT_CURVE_POINTS,
};
use orientdecoh::rgs::{scattering_rate_gamma0, DielectricRod};
use orientdecoh::rotorsim::{evolve_ensemble, ks_statistic_exponential, RotorState, SimulationConfig};
use orientdecoh::units::{
    convert_debye, convert_polarizability_volume, BlackBodyEnvironment, GasEnvironment, PhotonMode, AMU, HBAR, K_B,
};
use orientdecoh::vdw::AnisotropicPotential;

use crate::config::*;
use crate::error::{within, CliError};
use crate::report::{fmt_number, Block, Report, RATE_COLUMNS};

type Result<T> = std::result::Result<T, CliError>;

/// Computes the scenario described by `cfg`.
pub fn run(cfg: &Config) -> Result<Report> {
    match cfg.scenario {
        Scenario::RateGas => rate_gas(cfg),
        Scenario::RatePhoton => rate_photon(cfg),
        Scenario::RatePhotonIsotropic => rate_photon_isotropic(cfg),
        Scenario::Diffusion => diffusion(cfg),
        Scenario::Populations => population_dynamics(cfg),
        Scenario::ClassicalSim => classical_sim(cfg),
        Scenario::Fig1 => rate_gas(&with_fig1_defaults(cfg)),
        Scenario::Fig2a | Scenario::Fig2b => rate_photon_isotropic(&with_fig2_defaults(cfg)),
    }
}

// ---------------------------------------------------------------------------
// Presets

pub const FIG1_ANISOTROPIES: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const FIG2_PERMITTIVITIES: [f64; 4] = [1.0, 2.0, 4.0, 12.0];
pub const FIG2_WAVELENGTH_M: f64 = 1.56e-6;
const FIG2_FIELD_V_PER_M: f64 = 1e6;

fn with_fig1_defaults(cfg: &Config) -> Config {
    let mut c = cfg.clone();
    c.gas.get_or_insert(GasSection {
        temperature_K: 300.0,
        mass_amu: 4.002602,
        density_m3: 1e20,
    });
    let pot = c.potential.get_or_insert(PotentialSection {
        alpha0_A3: Some(0.2),
        d0_debye: Some(5.0),
        strength_J_m_s: None,
        exponent: None,
        anisotropy: None,
        anisotropies: None,
    });
    if pot.anisotropy.is_none() && pot.anisotropies.is_none() {
        pot.anisotropies = Some(FIG1_ANISOTROPIES.to_vec());
    }
    c
}

fn with_fig2_defaults(cfg: &Config) -> Config {
    let mut c = cfg.clone();
    let (length, radius) = if cfg.scenario == Scenario::Fig2a {
        (8e-9, 1e-9)
    } else {
        (0.8e-6, 25e-9)
    };
    let rod = c.rod.get_or_insert(RodSection {
        length_m: length,
        radius_m: radius,
        permittivity: None,
        permittivities: None,
    });
    if rod.permittivity.is_none() && rod.permittivities.is_none() {
        rod.permittivities = Some(FIG2_PERMITTIVITIES.to_vec());
    }
    c.spectrum.get_or_insert(SpectrumSection::Monochromatic {
        wavelength_m: FIG2_WAVELENGTH_M,
        field_V_per_m: FIG2_FIELD_V_PER_M,
    });
    c
}

// ---------------------------------------------------------------------------
// Builders

fn positive(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::precondition(field, format!("must be finite and > 0, got {value}")))
    }
}

fn thetas(cfg: &Config) -> Result<Vec<f64>> {
    match (&cfg.geometry.theta_rad, cfg.geometry.theta_points) {
        (Some(list), _) => {
            if list.is_empty() {
                return Err(CliError::precondition("geometry.theta_rad", "theta grid is empty"));
            }
            if list.iter().any(|t| !t.is_finite()) {
                return Err(CliError::precondition("geometry.theta_rad", "angles must be finite"));
            }
            Ok(list.clone())
        }
        (None, n) => theta_grid(n.unwrap_or(DEFAULT_CURVE_POINTS)).map_err(within("geometry")),
    }
}

fn displacement(cfg: &Config) -> Result<Vector3<f64>> {
    let r = Vector3::from(cfg.geometry.displacement_m.unwrap_or([0.0; 3]));
    if r.iter().any(|x| !x.is_finite()) {
        return Err(CliError::precondition("geometry.displacement_m", "must be finite"));
    }
    Ok(r)
}

fn pair_at(theta: f64) -> (Vector3<f64>, Vector3<f64>) {
    (Vector3::z(), Vector3::new(theta.sin(), 0.0, theta.cos()))
}

fn gas_env(cfg: &Config) -> Result<GasEnvironment> {
    let g = cfg.gas.as_ref().ok_or_else(|| CliError::missing("gas"))?;
    positive("gas.mass_amu", g.mass_amu)?;
    GasEnvironment::new(g.temperature_K, g.mass_amu * AMU, g.density_m3).map_err(within("gas"))
}

fn anisotropies(p: &PotentialSection) -> Result<Vec<f64>> {
    match (&p.anisotropies, p.anisotropy) {
        (Some(list), _) if list.is_empty() => Err(CliError::precondition("potential.anisotropies", "list is empty")),
        (Some(list), _) => Ok(list.clone()),
        (None, Some(a)) => Ok(vec![a]),
        (None, None) => Err(CliError::missing("potential.anisotropy")),
    }
}

fn potentials(cfg: &Config) -> Result<Vec<AnisotropicPotential>> {
    let p = cfg.potential.as_ref().ok_or_else(|| CliError::missing("potential"))?;
    let base = match (p.alpha0_A3, p.d0_debye, p.strength_J_m_s, p.exponent) {
        (Some(alpha), Some(d0), None, None) => AnisotropicPotential::dipole_induced_dipole(
            convert_polarizability_volume(positive("potential.alpha0_A3", alpha)?),
            convert_debye(positive("potential.d0_debye", d0)?),
        )
        .map_err(within("potential"))?,
        (None, None, Some(c), Some(s)) => AnisotropicPotential::new(c, s, 0.0).map_err(within("potential"))?,
        _ => {
            return Err(CliError::Schema(
                "potential needs either alpha0_A3 and d0_debye, or strength_J_m_s and exponent".into(),
            ))
        }
    };
    anisotropies(p)?
        .into_iter()
        .map(|a| base.with_anisotropy(a).map_err(within("potential")))
        .collect()
}

fn gas_quadrature(q: &QuadratureSection) -> GasQuadrature {
    let d = GasQuadrature::default();
    GasQuadrature {
        sphere_order: q.sphere_order.unwrap_or(d.sphere_order),
        radial_nodes: q.radial_nodes.unwrap_or(d.radial_nodes),
        panel_points: q.panel_points.unwrap_or(d.panel_points),
    }
}

fn photon_quadrature(q: &QuadratureSection) -> PhotonQuadrature {
    let d = PhotonQuadrature::default();
    PhotonQuadrature {
        outgoing_order: q.sphere_order.unwrap_or(d.outgoing_order),
        incoming_order: q.incoming_order.unwrap_or(d.incoming_order),
        wavenumber_nodes: q.wavenumber_nodes.unwrap_or(d.wavenumber_nodes),
    }
}

fn rods(cfg: &Config) -> Result<Vec<DielectricRod>> {
    let r = cfg.rod.as_ref().ok_or_else(|| CliError::missing("rod"))?;
    let eps = match (&r.permittivities, r.permittivity) {
        (Some(list), _) if list.is_empty() => {
            return Err(CliError::precondition("rod.permittivities", "list is empty"))
        }
        (Some(list), _) => list.clone(),
        (None, Some(e)) => vec![e],
        (None, None) => return Err(CliError::missing("rod.permittivity")),
    };
    eps.into_iter()
        .map(|e| DielectricRod::new(r.length_m, r.radius_m, e).map_err(within("rod")))
        .collect()
}

fn laser(cfg: &Config) -> Result<PhotonMode> {
    let l = cfg.laser.as_ref().ok_or_else(|| CliError::missing("laser"))?;
    PhotonMode::from_wavelength(
        l.wavelength_m,
        Vector3::from(l.direction.unwrap_or([0.0, 0.0, 1.0])),
        Vector3::from(l.polarization.unwrap_or([1.0, 0.0, 0.0])),
        l.field_V_per_m,
    )
    .map_err(within("laser"))
}

fn spectrum(cfg: &Config) -> Result<WavenumberDistribution> {
    match cfg.spectrum.as_ref().ok_or_else(|| CliError::missing("spectrum"))? {
        SpectrumSection::Monochromatic {
            wavelength_m,
            field_V_per_m,
        } => {
            let lambda = positive("spectrum.wavelength_m", *wavelength_m)?;
            if !(field_V_per_m.is_finite() && *field_V_per_m >= 0.0) {
                return Err(CliError::precondition("spectrum.field_V_per_m", "must be finite and >= 0"));
            }
            Ok(WavenumberDistribution::Monochromatic {
                wavenumber: 2.0 * PI / lambda,
                field_amplitude: *field_V_per_m,
            })
        }
        SpectrumSection::Blackbody { temperature_K } => Ok(WavenumberDistribution::BlackBody(
            BlackBodyEnvironment::new(*temperature_K).map_err(within("spectrum"))?,
        )),
    }
}

// ---------------------------------------------------------------------------
// Reporting helpers

fn curve_block(label: String, points: &[CurvePoint]) -> Block {
    Block {
        label,
        rows: points
            .iter()
            .map(|p| vec![Some(p.theta), Some(p.rate), p.rate_over_gamma, Some(p.quadrature_error)])
            .collect(),
    }
}

fn finish_curves(report: &mut Report, curves: &[(String, Vec<CurvePoint>)]) {
    let mut unconverged = 0;
    for (label, points) in curves {
        report.blocks.push(curve_block(label.clone(), points));
        unconverged += points.iter().filter(|p| !p.converged).count();
    }
    let max_err = curves
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.quadrature_error))
        .fold(0.0, f64::max);
    report.result("max_quad_error", fmt_number(max_err));
    report.result("unconverged_points", unconverged);
    if unconverged > 0 {
        report.warnings.push(format!("{unconverged} points did not reach the quadrature tolerance"));
    }
    report.unconverged = unconverged;
}

fn gas_inputs(report: &mut Report, cfg: &Config, gas: &GasEnvironment, pot: &AnisotropicPotential) {
    report.input("gas.temperature_K", fmt_number(gas.temperature()));
    report.input("gas.mass_amu", fmt_number(gas.particle_mass() / AMU));
    report.input("gas.density_m3", fmt_number(gas.number_density()));
    if let Some(p) = &cfg.potential {
        if let (Some(a), Some(d)) = (p.alpha0_A3, p.d0_debye) {
            report.input("potential.alpha0_A3", fmt_number(a));
            report.input("potential.d0_debye", fmt_number(d));
        }
    }
    report.input("potential.strength_J_m_s", fmt_number(pot.strength()));
    report.input("potential.exponent", pot.exponent());
}

fn geometry_inputs(report: &mut Report, thetas: &[f64], r: &Vector3<f64>) {
    report.input("geometry.theta_points", thetas.len());
    report.input(
        "geometry.displacement_m",
        format!("[{}, {}, {}]", fmt_number(r.x), fmt_number(r.y), fmt_number(r.z)),
    );
}

// ---------------------------------------------------------------------------
// Scenarios

fn rate_gas(cfg: &Config) -> Result<Report> {
    let gas = gas_env(cfg)?;
    let pots = potentials(cfg)?;
    let thetas = thetas(cfg)?;
    let r = displacement(cfg)?;
    let quad = gas_quadrature(&cfg.quadrature);
    if quad.panel_points < 6 {
        return Err(CliError::precondition("quadrature.panel_points", "must be at least 6"));
    }

    let mut report = Report::new(cfg.scenario.name(), &RATE_COLUMNS);
    gas_inputs(&mut report, cfg, &gas, &pots[0]);
    geometry_inputs(&mut report, &thetas, &r);
    report.grid("sphere_order", quad.sphere_order);
    report.grid("radial_nodes", quad.radial_nodes);
    report.grid("panel_points", quad.panel_points);

    let gamma = collision_rate_gamma(&pots[0], &gas).map_err(within("potential"))?;
    report.result("gamma_per_s", fmt_number(gamma.value));
    report.result("gamma_error_per_s", fmt_number(gamma.abs_error));

    let mut curves = Vec::with_capacity(pots.len());
    for pot in &pots {
        let mut points = if r.norm() == 0.0 {
            gas_rate_curve(pot, &gas, &thetas, &quad).map_err(within("potential"))?
        } else {
            thetas
                .par_iter()
                .map(|&theta| {
                    let (m1, m2) = pair_at(theta);
                    let pc = PairConfiguration::new(r, m1, m2).map_err(within("geometry"))?;
                    let (f, _) = gas_rates(pot, &gas, &pc, &quad).map_err(within("geometry"))?;
                    Ok(CurvePoint {
                        theta,
                        rate: f.rate,
                        quadrature_error: f.quadrature_error,
                        rate_over_gamma: None,
                        converged: f.is_converged(),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        };
        for p in &mut points {
            p.rate_over_gamma = Some(p.rate / gamma.value);
        }
        curves.push((format!("anisotropy={}", fmt_number(pot.anisotropy())), points));
    }
    finish_curves(&mut report, &curves);
    Ok(report)
}

fn rate_photon(cfg: &Config) -> Result<Report> {
    let rods = rods(cfg)?;
    let mode = laser(cfg)?;
    let thetas = thetas(cfg)?;
    let r = displacement(cfg)?;
    let quad = photon_quadrature(&cfg.quadrature);

    let mut report = Report::new(cfg.scenario.name(), &RATE_COLUMNS);
    report.input("rod.length_m", fmt_number(rods[0].length()));
    report.input("rod.radius_m", fmt_number(rods[0].radius()));
    report.input("laser.wavenumber_per_m", fmt_number(mode.wavenumber()));
    report.input("laser.field_V_per_m", fmt_number(mode.field_amplitude()));
    geometry_inputs(&mut report, &thetas, &r);
    report.grid("outgoing_order", quad.outgoing_order);

    let mut curves = Vec::with_capacity(rods.len());
    for rod in &rods {
        if !rod.thin_rod_valid(mode.wavenumber()) {
            report.warnings.push(format!(
                "thin-rod condition violated at permittivity {}: k^2 a0^2 (eps - 1) = {}",
                fmt_number(rod.permittivity()),
                fmt_number(rod.thin_rod_parameter(mode.wavenumber()))
            ));
        }
        let points = thetas
            .par_iter()
            .map(|&theta| {
                let (m1, m2) = pair_at(theta);
                let pc = PairConfiguration::new(r, m1, m2).map_err(within("geometry"))?;
                let f = localization_rate_photon_with(rod, &mode, &pc, &quad).map_err(within("geometry"))?;
                Ok(CurvePoint {
                    theta,
                    rate: f.rate,
                    quadrature_error: f.quadrature_error,
                    rate_over_gamma: f.rate_over_gamma,
                    converged: f.is_converged(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        report.result(
            &format!("gamma0_per_s[permittivity={}]", fmt_number(rod.permittivity())),
            fmt_number(scattering_rate_gamma0(rod, &mode)),
        );
        curves.push((format!("permittivity={}", fmt_number(rod.permittivity())), points));
    }
    finish_curves(&mut report, &curves);
    Ok(report)
}

fn rate_photon_isotropic(cfg: &Config) -> Result<Report> {
    let rods = rods(cfg)?;
    let dist = spectrum(cfg)?;
    let thetas = thetas(cfg)?;
    let r = displacement(cfg)?;
    if r.norm() != 0.0 {
        return Err(CliError::precondition(
            "geometry.displacement_m",
            "the isotropic average is computed for zero displacement",
        ));
    }
    let quad = photon_quadrature(&cfg.quadrature);

    let mut report = Report::new(cfg.scenario.name(), &RATE_COLUMNS);
    report.input("rod.length_m", fmt_number(rods[0].length()));
    report.input("rod.radius_m", fmt_number(rods[0].radius()));
    match dist {
        WavenumberDistribution::Monochromatic {
            wavenumber,
            field_amplitude,
        } => {
            report.input("spectrum.kind", "monochromatic");
            report.input("spectrum.wavenumber_per_m", fmt_number(wavenumber));
            report.input("spectrum.field_V_per_m", fmt_number(field_amplitude));
        }
        WavenumberDistribution::BlackBody(env) => {
            report.input("spectrum.kind", "blackbody");
            report.input("spectrum.temperature_K", fmt_number(env.temperature()));
        }
    }
    geometry_inputs(&mut report, &thetas, &r);
    report.grid("outgoing_order", quad.outgoing_order);
    report.grid("incoming_order", quad.incoming_order);
    if matches!(dist, WavenumberDistribution::BlackBody(_)) {
        report.grid("wavenumber_nodes", quad.wavenumber_nodes);
    }

    let pairs: Vec<_> = thetas.iter().map(|&t| pair_at(t)).collect();
    let curves = photon_isotropic_curves(&rods, &dist, &pairs, &quad).map_err(within("rod"))?;
    let labelled: Vec<(String, Vec<CurvePoint>)> = rods
        .iter()
        .zip(curves)
        .map(|(rod, mut pts)| {
            for (p, &t) in pts.iter_mut().zip(&thetas) {
                p.theta = t;
            }
            (format!("permittivity={}", fmt_number(rod.permittivity())), pts)
        })
        .collect();
    finish_curves(&mut report, &labelled);
    Ok(report)
}

fn diffusion(cfg: &Config) -> Result<Report> {
    let section = cfg.diffusion.as_ref().ok_or_else(|| CliError::missing("diffusion"))?;
    let thetas = thetas(cfg)?;
    let mut report = Report::new(cfg.scenario.name(), &RATE_COLUMNS);
    let (d, reference): (DiffusionCoefficient, Option<f64>) = match section.source {
        DiffusionSourceKey::Gas => {
            let gas = gas_env(cfg)?;
            let pots = potentials(cfg)?;
            if pots.len() != 1 {
                return Err(CliError::precondition("potential.anisotropies", "give a single anisotropy"));
            }
            gas_inputs(&mut report, cfg, &gas, &pots[0]);
            report.input("potential.anisotropy", fmt_number(pots[0].anisotropy()));
            let gamma = collision_rate_gamma(&pots[0], &gas).map_err(within("potential"))?;
            report.result("gamma_per_s", fmt_number(gamma.value));
            (diffusion_coefficient_gas(&pots[0], &gas).map_err(within("potential"))?, Some(gamma.value))
        }
        DiffusionSourceKey::RayleighGans => {
            let rod = single_rod(cfg)?;
            let mode = laser(cfg)?;
            report.input("laser.wavenumber_per_m", fmt_number(mode.wavenumber()));
            report.input("laser.field_V_per_m", fmt_number(mode.field_amplitude()));
            let gamma0 = scattering_rate_gamma0(&rod, &mode);
            report.result("gamma0_per_s", fmt_number(gamma0));
            (diffusion_coefficient_rg(&rod, &mode), (gamma0 > 0.0).then_some(gamma0))
        }
        DiffusionSourceKey::Blackbody => {
            let rod = single_rod(cfg)?;
            let t = section.temperature_K.ok_or_else(|| CliError::missing("diffusion.temperature_K"))?;
            let env = BlackBodyEnvironment::new(t).map_err(within("diffusion"))?;
            report.input("diffusion.temperature_K", fmt_number(t));
            (diffusion_coefficient_blackbody(&rod, &env), None)
        }
    };
    if let Some(rod) = cfg.rod.as_ref() {
        report.input("rod.length_m", fmt_number(rod.length_m));
        report.input("rod.radius_m", fmt_number(rod.radius_m));
    }
    report.input("geometry.theta_points", thetas.len());
    report.result("D_J2_per_s", fmt_number(d.value));
    report.result("D_error_J2_per_s", fmt_number(d.error));
    report.result("D_over_hbar2_per_s", fmt_number(d.rate()));
    let points: Vec<CurvePoint> = thetas
        .iter()
        .map(|&theta| {
            let s2 = theta.sin().powi(2);
            let rate = d.rate() * s2;
            CurvePoint {
                theta,
                rate,
                quadrature_error: d.error / (HBAR * HBAR) * s2,
                rate_over_gamma: reference.map(|g| rate / g),
                converged: true,
            }
        })
        .collect();
    finish_curves(&mut report, &[("small-anisotropy".to_string(), points)]);
    Ok(report)
}

fn single_rod(cfg: &Config) -> Result<DielectricRod> {
    let mut rods = rods(cfg)?;
    if rods.len() != 1 {
        return Err(CliError::precondition("rod.permittivities", "give a single permittivity"));
    }
    Ok(rods.remove(0))
}

fn population_dynamics(cfg: &Config) -> Result<Report> {
    let p = cfg.populations.as_ref().ok_or_else(|| CliError::missing("populations"))?;
    let pops = populations(p.diffusion_J2_per_s, p.time_s, p.j_max).map_err(|e| match e {
        orientdecoh::Error::Domain { field: "D", reason } => CliError::precondition("populations.diffusion_J2_per_s", reason),
        orientdecoh::Error::Domain { field: "t", reason } => CliError::precondition("populations.time_s", reason),
        other => within("populations")(other),
    })?;
    let mut report = Report::new(cfg.scenario.name(), &["j", "probability", "gaussian_asymptote"]);
    report.input("populations.diffusion_J2_per_s", fmt_number(p.diffusion_J2_per_s));
    report.input("populations.time_s", fmt_number(p.time_s));
    report.grid("j_max", pops.j_max());
    report.result("tau", fmt_number(pops.tau()));
    report.result("norm", fmt_number(pops.norm()));
    report.result("second_moment", fmt_number(pops.second_moment()));
    report.result("second_moment_law_4tau", fmt_number(4.0 * pops.tau()));
    let with_gauss = pops.tau() > 0.0;
    let rows = pops
        .probabilities
        .iter()
        .enumerate()
        .map(|(j, &prob)| {
            let g = if with_gauss {
                gaussian_asymptote(p.diffusion_J2_per_s, p.time_s, j).ok()
            } else {
                None
            };
            vec![Some(j as f64), Some(prob), g]
        })
        .collect();
    report.blocks.push(Block {
        label: format!("tau={}", fmt_number(pops.tau())),
        rows,
    });
    Ok(report)
}

fn classical_sim(cfg: &Config) -> Result<Report> {
    let r = cfg.rotor.as_ref().ok_or_else(|| CliError::missing("rotor"))?;
    let sim = SimulationConfig {
        inertia: r.inertia_kg_m2,
        diffusion: r.diffusion_J2_per_s,
        temperature: r.temperature_K,
        dt: r.dt_s,
        n_traj: r.n_traj,
        seed: r.seed,
    };
    sim.validate().map_err(rotor_error)?;
    positive("rotor.t_final_s", r.t_final_s)?;
    if r.records == 0 {
        return Err(CliError::precondition("rotor.records", "need at least one record"));
    }
    let axis = Vector3::from(r.initial_axis.unwrap_or([0.0, 0.0, 1.0]));
    let j0 = Vector3::from(r.initial_J_kg_m2_per_s.unwrap_or([0.0; 3]));
    let initial = RotorState::new(axis, j0).map_err(within("rotor"))?;
    let res = evolve_ensemble(&sim, &initial, r.t_final_s, r.records).map_err(rotor_error)?;

    let mut report = Report::new(cfg.scenario.name(), &["time_s", "mean_J2", "stderr_J2", "mean_energy_J"]);
    report.input("rotor.inertia_kg_m2", fmt_number(sim.inertia));
    report.input("rotor.diffusion_J2_per_s", fmt_number(sim.diffusion));
    report.input("rotor.temperature_K", fmt_number(sim.temperature));
    report.input("rotor.dt_s", fmt_number(sim.dt));
    report.input("rotor.t_final_s", fmt_number(r.t_final_s));
    report.input("rotor.n_traj", sim.n_traj);
    report.input("rotor.seed", sim.seed);
    report.grid("records", res.times.len());
    report.result("J2_slope", fmt_number(res.j2_slope()));
    report.result("four_D", fmt_number(4.0 * sim.diffusion));
    report.result("friction_rate_per_s", fmt_number(sim.friction_rate()));
    if sim.temperature > 0.0 {
        let kt = K_B * sim.temperature;
        let mean = res.final_energies.iter().sum::<f64>() / res.final_energies.len() as f64;
        report.result("final_mean_energy_over_kT", fmt_number(mean / kt));
        report.result("ks_statistic_exponential", fmt_number(ks_statistic_exponential(&res.final_energies, kt)));
    }
    let rows = (0..res.times.len())
        .map(|k| {
            vec![
                Some(res.times[k]),
                Some(res.mean_j2[k]),
                Some(res.stderr_j2[k]),
                Some(res.mean_energy[k]),
            ]
        })
        .collect();
    report.blocks.push(Block {
        label: "ensemble".into(),
        rows,
    });
    Ok(report)
}

fn rotor_error(e: orientdecoh::Error) -> CliError {
    match e {
        orientdecoh::Error::Domain { field, reason } => {
            let key = match field {
                "inertia" => "rotor.inertia_kg_m2",
                "diffusion" => "rotor.diffusion_J2_per_s",
                "temperature" => "rotor.temperature_K",
                "dt" => "rotor.dt_s",
                "t_final" => "rotor.t_final_s",
                "n_traj" => "rotor.n_traj",
                "records" => "rotor.records",
                other => return CliError::precondition(&format!("rotor.{other}"), reason),
            };
            CliError::precondition(key, reason)
        }
        other => within("rotor")(other),
    }
}

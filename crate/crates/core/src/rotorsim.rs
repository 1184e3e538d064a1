//! Classical linear-rotor ensembles under angular momentum diffusion,
//! optionally with friction toward a thermal state.
//!
//! The state is the symmetry axis m and the angular momentum J ⊥ m. One step
//! is a Strang splitting: half a free rotation of m about J, an exact
//! Ornstein-Uhlenbeck update of J inside the plane ⊥ m, and another half
//! rotation. Without friction the update reduces to the kick
//! J ← J + √(2D dt) (ξ₁e₁ + ξ₂e₂).
//!
//! An Euler-angle integrator of the same dynamics is included as an
//! independent oracle; it is singular at the poles of its coordinates.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, require_positive, Error, Result};
use crate::rgs::transverse_basis;
use crate::units::K_B;

/// Largest allowed dt in units of the friction time I k_B T / D.
pub const STABILITY_FRACTION: f64 = 0.01;
/// Oracle runs are rejected when β comes closer than this to 0 or π.
pub const POLE_MARGIN: f64 = 0.1;
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotorState {
    /// Unit symmetry axis.
    pub m: Vector3<f64>,
    /// Angular momentum in kg m²/s, perpendicular to m.
    pub j: Vector3<f64>,
}

impl RotorState {
    pub fn new(m: Vector3<f64>, j: Vector3<f64>) -> Result<Self> {
        if (m.norm() - 1.0).abs() > 1e-10 {
            return Err(domain("m", "must be a unit vector"));
        }
        if j.dot(&m).abs() > 1e-10 * j.norm().max(f64::MIN_POSITIVE) {
            return Err(domain("J", "must be perpendicular to m"));
        }
        Ok(Self { m, j })
    }

    /// J²/2I.
    pub fn energy(&self, inertia: f64) -> f64 {
        self.j.norm_squared() / (2.0 * inertia)
    }

    fn drift(&mut self, inertia: f64, dt: f64) {
        let jn = self.j.norm();
        if jn > 0.0 {
            let axis = self.j / jn;
            let (s, c) = (jn * dt / inertia).sin_cos();
            self.m = (self.m * c + axis.cross(&self.m) * s).normalize();
        }
        self.j -= self.m * self.j.dot(&self.m);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    /// Moment of inertia I in kg m².
    pub inertia: f64,
    /// Diffusion coefficient D in (J s)²/s.
    pub diffusion: f64,
    /// Bath temperature in K; zero disables friction.
    pub temperature: f64,
    pub dt: f64,
    pub n_traj: usize,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("inertia", self.inertia)?;
        require_positive("dt", self.dt)?;
        if !(self.diffusion.is_finite() && self.diffusion >= 0.0) {
            return Err(domain("diffusion", "must be finite and >= 0"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(domain("temperature", "must be finite and >= 0"));
        }
        if self.n_traj == 0 {
            return Err(domain("n_traj", "need at least one trajectory"));
        }
        if let Some(bound) = self.stability_bound() {
            if self.dt > bound {
                return Err(Error::Stability { dt: self.dt, bound });
            }
        }
        Ok(())
    }

    /// Friction rate D / (I k_B T); zero without friction.
    pub fn friction_rate(&self) -> f64 {
        if self.temperature > 0.0 {
            self.diffusion / (self.inertia * K_B * self.temperature)
        } else {
            0.0
        }
    }

    pub fn stability_bound(&self) -> Option<f64> {
        let g = self.friction_rate();
        (g > 0.0).then(|| STABILITY_FRACTION / g)
    }

    /// Standard deviation of one J-component increment per step.
    fn kick_scale(&self) -> (f64, f64) {
        let g = self.friction_rate();
        let gd = g * self.dt;
        if gd > 1e-8 {
            let decay = (-gd).exp();
            (decay, (self.diffusion / g * (-(-2.0 * gd).exp_m1())).sqrt())
        } else {
            // series of (1 - e^{-2x})/x to second order
            let var = 2.0 * self.diffusion * self.dt * (1.0 - gd + 2.0 * gd * gd / 3.0);
            ((-gd).exp(), var.sqrt())
        }
    }
}

/// One Strang step with standard normal `noise`.
pub fn step(state: &RotorState, cfg: &SimulationConfig, noise: [f64; 2]) -> RotorState {
    let (decay, scale) = cfg.kick_scale();
    step_with(state, cfg, decay, scale, noise)
}

#[inline]
fn step_with(state: &RotorState, cfg: &SimulationConfig, decay: f64, scale: f64, noise: [f64; 2]) -> RotorState {
    let mut s = *state;
    s.drift(cfg.inertia, 0.5 * cfg.dt);
    let (e1, e2) = transverse_basis(&s.m);
    s.j = s.j * decay + (e1 * noise[0] + e2 * noise[1]) * scale;
    s.drift(cfg.inertia, 0.5 * cfg.dt);
    s
}

fn normal_pair(rng: &mut ChaCha8Rng) -> [f64; 2] {
    [rng.sample(StandardNormal), rng.sample(StandardNormal)]
}

fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Debug, Clone, Default)]
struct Record {
    j2: Compensated,
    j2_sq: Compensated,
    energy: Compensated,
    j: [Compensated; 3],
}

impl Record {
    fn push(&mut self, j: &Vector3<f64>, energy: f64) {
        let j2 = j.norm_squared();
        self.j2.add(j2);
        self.j2_sq.add(j2 * j2);
        self.energy.add(energy);
        for (acc, x) in self.j.iter_mut().zip(j.iter()) {
            acc.add(*x);
        }
    }

    fn merge(&mut self, other: &Record) {
        self.j2.add(other.j2.value());
        self.j2_sq.add(other.j2_sq.value());
        self.energy.add(other.energy.value());
        for (a, b) in self.j.iter_mut().zip(other.j.iter()) {
            a.add(b.value());
        }
    }
}

/// Ensemble averages at the recorded times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// ⟨J²⟩ in (kg m²/s)².
    pub mean_j2: Vec<f64>,
    /// Standard error of ⟨J²⟩.
    pub stderr_j2: Vec<f64>,
    /// ⟨J²/2I⟩ in J.
    pub mean_energy: Vec<f64>,
    pub mean_j: Vec<Vector3<f64>>,
    /// Energy of every trajectory at the final time.
    pub final_energies: Vec<f64>,
    pub n_traj: usize,
}

impl EnsembleResult {
    /// Least-squares slope of ⟨J²⟩ against time.
    pub fn j2_slope(&self) -> f64 {
        let n = self.times.len() as f64;
        let tm = self.times.iter().sum::<f64>() / n;
        let ym = self.mean_j2.iter().sum::<f64>() / n;
        let (num, den) = self
            .times
            .iter()
            .zip(&self.mean_j2)
            .fold((0.0, 0.0), |(num, den), (t, y)| {
                (num + (t - tm) * (y - ym), den + (t - tm) * (t - tm))
            });
        num / den
    }
}

/// Record schedule: step indices 1..=n_steps at which averages are taken.
fn schedule(t_final: f64, dt: f64, records: usize) -> Result<(usize, Vec<usize>)> {
    require_positive("t_final", t_final)?;
    if records == 0 {
        return Err(domain("records", "need at least one record"));
    }
    let n_steps = (t_final / dt).round().max(1.0) as usize;
    let records = records.min(n_steps);
    let marks = (1..=records).map(|r| r * n_steps / records).collect();
    Ok((n_steps, marks))
}

fn collect(records: Vec<Record>, marks: &[usize], dt: f64, n: usize, final_energies: Vec<f64>) -> EnsembleResult {
    let nf = n as f64;
    let mut out = EnsembleResult {
        times: marks.iter().map(|&k| k as f64 * dt).collect(),
        mean_j2: Vec::with_capacity(marks.len()),
        stderr_j2: Vec::with_capacity(marks.len()),
        mean_energy: Vec::with_capacity(marks.len()),
        mean_j: Vec::with_capacity(marks.len()),
        final_energies,
        n_traj: n,
    };
    for r in records {
        let mean = r.j2.value() / nf;
        let var = if n > 1 {
            ((r.j2_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        out.mean_j2.push(mean);
        out.stderr_j2.push((var / nf).sqrt());
        out.mean_energy.push(r.energy.value() / nf);
        out.mean_j.push(Vector3::new(r.j[0].value(), r.j[1].value(), r.j[2].value()) / nf);
    }
    out
}

/// Runs `n_traj` trajectories in fixed-size chunks and merges the chunk
/// sums in order, so results do not depend on the thread count.
fn run_chunks(
    n_traj: usize,
    n_records: usize,
    run: impl Fn(usize, &mut Vec<Record>) -> Result<f64> + Sync,
) -> Result<(Vec<Record>, Vec<f64>)> {
    let n_chunks = n_traj.div_ceil(CHUNK);
    let parts: Vec<Result<(Vec<Record>, Vec<f64>)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut recs = vec![Record::default(); n_records];
            let mut energies = Vec::with_capacity(CHUNK);
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                energies.push(run(i, &mut recs)?);
            }
            Ok((recs, energies))
        })
        .collect();
    let mut total = vec![Record::default(); n_records];
    let mut energies = Vec::with_capacity(n_traj);
    for part in parts {
        let (recs, e) = part?;
        for (t, r) in total.iter_mut().zip(&recs) {
            t.merge(r);
        }
        energies.extend(e);
    }
    Ok((total, energies))
}

/// Evolves `cfg.n_traj` copies of `initial` to `t_final`, recording
/// ensemble averages at `records` equally spaced times.
pub fn evolve_ensemble(
    cfg: &SimulationConfig,
    initial: &RotorState,
    t_final: f64,
    records: usize,
) -> Result<EnsembleResult> {
    cfg.validate()?;
    RotorState::new(initial.m, initial.j)?;
    let (n_steps, marks) = schedule(t_final, cfg.dt, records)?;
    let (decay, scale) = cfg.kick_scale();
    let (recs, energies) = run_chunks(cfg.n_traj, marks.len(), |i, recs| {
        let mut rng = trajectory_rng(cfg.seed, i);
        let mut s = *initial;
        let mut next = 0;
        for k in 1..=n_steps {
            s = step_with(&s, cfg, decay, scale, normal_pair(&mut rng));
            if marks[next] == k {
                recs[next].push(&s.j, s.energy(cfg.inertia));
                next += 1;
            }
        }
        Ok(s.energy(cfg.inertia))
    })?;
    Ok(collect(recs, &marks, cfg.dt, cfg.n_traj, energies))
}

/// Kolmogorov-Smirnov distance between `samples` and an exponential law
/// with the given mean.
pub fn ks_statistic_exponential(samples: &[f64], mean: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-x / mean).exp_m1();
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (cdf - lo).abs().max((hi - cdf).abs())
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Euler-angle oracle

/// Linear rotor in Euler angles with canonical momenta p_α, p_β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerState {
    pub alpha: f64,
    pub beta: f64,
    pub p_alpha: f64,
    pub p_beta: f64,
}

impl EulerState {
    pub fn axis(&self) -> Vector3<f64> {
        let (sb, cb) = self.beta.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        Vector3::new(sb * ca, sb * sa, cb)
    }

    /// J = p_β e_α - (p_α / sin β) e_β.
    pub fn angular_momentum(&self) -> Vector3<f64> {
        let (sb, cb) = self.beta.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        let e_beta = Vector3::new(cb * ca, cb * sa, -sb);
        let e_alpha = Vector3::new(-sa, ca, 0.0);
        e_alpha * self.p_beta - e_beta * (self.p_alpha / sb)
    }

    pub fn to_rotor(&self) -> RotorState {
        RotorState {
            m: self.axis(),
            j: self.angular_momentum(),
        }
    }
}

/// One Euler-Maruyama step of the rotor diffusion in Euler angles.
pub fn euler_angle_oracle_step(state: &EulerState, cfg: &SimulationConfig, noise: [f64; 2]) -> Result<EulerState> {
    let EulerState {
        alpha,
        beta,
        p_alpha,
        p_beta,
    } = *state;
    if beta < POLE_MARGIN || beta > std::f64::consts::PI - POLE_MARGIN {
        return Err(Error::PoleProximity { beta });
    }
    let dt = cfg.dt;
    let i = cfg.inertia;
    let (sb, cb) = beta.sin_cos();
    let g = cfg.friction_rate();
    let amp = (2.0 * cfg.diffusion * dt).sqrt();
    Ok(EulerState {
        alpha: alpha + p_alpha / (i * sb * sb) * dt,
        beta: beta + p_beta / i * dt,
        p_alpha: p_alpha - g * p_alpha * dt + sb * amp * noise[0],
        p_beta: p_beta + (p_alpha * p_alpha * cb / (i * sb.powi(3)) - g * p_beta) * dt + amp * noise[1],
    })
}

/// Oracle ensemble in Euler angles; same record layout as [`evolve_ensemble`].
pub fn evolve_euler_ensemble(
    cfg: &SimulationConfig,
    initial: &EulerState,
    t_final: f64,
    records: usize,
) -> Result<EnsembleResult> {
    cfg.validate()?;
    let (n_steps, marks) = schedule(t_final, cfg.dt, records)?;
    let (recs, energies) = run_chunks(cfg.n_traj, marks.len(), |i, recs| {
        let mut rng = trajectory_rng(cfg.seed, i);
        let mut s = *initial;
        let mut next = 0;
        for k in 1..=n_steps {
            s = euler_angle_oracle_step(&s, cfg, normal_pair(&mut rng))?;
            if marks[next] == k {
                let j = s.angular_momentum();
                recs[next].push(&j, j.norm_squared() / (2.0 * cfg.inertia));
                next += 1;
            }
        }
        Ok(s.angular_momentum().norm_squared() / (2.0 * cfg.inertia))
    })?;
    Ok(collect(recs, &marks, cfg.dt, cfg.n_traj, energies))
}

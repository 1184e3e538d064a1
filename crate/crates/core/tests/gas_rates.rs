use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use orientdecoh::angdiff::diffusion_coefficient_gas;
use orientdecoh::locrate::{gas_rate_curve, gas_rates, theta_grid, GasQuadrature, PairConfiguration};
use orientdecoh::quadrature::mc::{mc_oracle, uniform_unit_vector, Sampler};
use orientdecoh::units::{convert_debye, convert_polarizability_volume, GasEnvironment, AMU, HBAR};
use orientdecoh::vdw::{AnisotropicPotential, EikonalScattering};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

fn helium() -> GasEnvironment {
    GasEnvironment::new(300.0, 4.002602 * AMU, 1e20).unwrap()
}

fn polar_molecule(a: f64) -> AnisotropicPotential {
    AnisotropicPotential::dipole_induced_dipole(convert_polarizability_volume(0.2), convert_debye(5.0))
        .unwrap()
        .with_anisotropy(a)
        .unwrap()
}

/// Weak coupling, so that |χ| ~ 1 at thermal momenta and displaced
/// configurations stay cheap.
fn weak(a: f64) -> AnisotropicPotential {
    AnisotropicPotential::new(polar_molecule(0.0).strength() * 1e-4, 6, a).unwrap()
}

fn small_grid() -> GasQuadrature {
    GasQuadrature {
        sphere_order: 17,
        radial_nodes: 32,
        panel_points: 12,
    }
}

fn random_axis(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    uniform_unit_vector(rng)
}

#[test]
fn identical_orientations_give_zero() {
    let gas = helium();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for a in [0.5, 3.0] {
        let m = random_axis(&mut rng);
        let cfg = PairConfiguration::new(Vector3::zeros(), m, m).unwrap();
        let (f, g) = gas_rates(&polar_molecule(a), &gas, &cfg, &GasQuadrature::default()).unwrap();
        assert_eq!(f.rate, 0.0);
        assert_eq!(g.rate, 0.0);
    }
}

#[test]
fn rates_are_nonnegative_on_random_orientations() {
    let gas = helium();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let a = rng.gen_range(-0.5..3.0);
        let cfg = PairConfiguration::new(Vector3::zeros(), random_axis(&mut rng), random_axis(&mut rng)).unwrap();
        let (f, _) = gas_rates(&polar_molecule(a), &gas, &cfg, &small_grid()).unwrap();
        assert!(f.rate >= -f.quadrature_error, "{} < -{}", f.rate, f.quadrature_error);
        assert!(f.is_converged());
    }
}

#[test]
fn curve_is_symmetric_about_right_angle() {
    let thetas = theta_grid(19).unwrap();
    let curve = gas_rate_curve(&polar_molecule(2.0), &helium(), &thetas, &small_grid()).unwrap();
    for (lo, hi) in curve.iter().zip(curve.iter().rev()) {
        let tol = lo.quadrature_error + hi.quadrature_error + 1e-12 * lo.rate.abs();
        assert!((lo.rate - hi.rate).abs() <= tol);
    }
}

#[test]
fn rate_depends_only_on_relative_angle() {
    let gas = helium();
    let pot = polar_molecule(1.0);
    let base = PairConfiguration::at_angle(1.1);
    let (f0, _) = gas_rates(&pot, &gas, &base, &GasQuadrature::default()).unwrap();
    let rot = Rotation3::from_euler_angles(0.3, -1.2, 2.1);
    let turned = PairConfiguration::new(Vector3::zeros(), rot * base.m1, rot * base.m2).unwrap();
    let (f1, _) = gas_rates(&pot, &gas, &turned, &GasQuadrature::default()).unwrap();
    assert!((f0.rate - f1.rate).abs() <= f0.quadrature_error + f1.quadrature_error + 1e-6 * f0.rate);
}

#[test]
fn phase_frequency_is_antisymmetric_in_orientations() {
    let gas = helium();
    let pot = polar_molecule(2.0);
    let a = PairConfiguration::at_angle(0.7);
    let b = PairConfiguration::new(Vector3::zeros(), a.m2, a.m1).unwrap();
    let (_, g_ab) = gas_rates(&pot, &gas, &a, &small_grid()).unwrap();
    let (_, g_ba) = gas_rates(&pot, &gas, &b, &small_grid()).unwrap();
    assert!((g_ab.rate + g_ba.rate).abs() <= 1e-10 * g_ab.rate.abs() + g_ab.quadrature_error);
}

#[test]
fn rate_grows_with_angle_and_anisotropy() {
    let gas = helium();
    let thetas: Vec<f64> = (1..=10).map(|i| 0.5 * PI * i as f64 / 10.0).collect();
    let mut previous: Option<Vec<f64>> = None;
    for a in [0.5, 1.0, 2.0, 3.0] {
        let curve = gas_rate_curve(&polar_molecule(a), &gas, &thetas, &small_grid()).unwrap();
        let rates: Vec<f64> = curve.iter().map(|p| p.rate).collect();
        for w in rates.windows(2) {
            assert!(w[1] > w[0]);
        }
        if let Some(prev) = previous {
            for (lo, hi) in prev.iter().zip(&rates) {
                assert!(hi > lo);
            }
        }
        previous = Some(rates);
    }
}

#[test]
fn weak_anisotropy_reproduces_diffusion_coefficient() {
    let gas = helium();
    let pot = polar_molecule(0.01);
    let d = diffusion_coefficient_gas(&pot, &gas).unwrap();
    let curve = gas_rate_curve(&pot, &gas, &[0.4, 1.0, PI / 2.0, 2.5], &GasQuadrature::default()).unwrap();
    for p in curve {
        let ratio = p.rate / (d.rate() * p.theta.sin().powi(2));
        assert!((ratio - 1.0).abs() < 0.01, "theta {} ratio {ratio}", p.theta);
    }
}

#[test]
fn displaced_path_matches_orientational_path_at_tiny_displacement() {
    let gas = helium();
    let pot = weak(2.0);
    let at_zero = PairConfiguration::at_angle(1.0);
    let nudged = PairConfiguration::new(Vector3::new(1e-22, 0.0, 0.0), at_zero.m1, at_zero.m2).unwrap();
    let (f0, g0) = gas_rates(&pot, &gas, &at_zero, &small_grid()).unwrap();
    let (f1, g1) = gas_rates(&pot, &gas, &nudged, &small_grid()).unwrap();
    assert!((f0.rate / f1.rate - 1.0).abs() < 1e-6, "{} vs {}", f0.rate, f1.rate);
    assert!((g0.rate - g1.rate).abs() < 1e-6 * f0.rate, "{} vs {}", g0.rate, g1.rate);
}

#[test]
fn displacement_alone_localizes() {
    let gas = helium();
    let pot = weak(1.0);
    let m = Vector3::z();
    let near = PairConfiguration::new(Vector3::new(5e-12, 0.0, 0.0), m, m).unwrap();
    let far = PairConfiguration::new(Vector3::new(2e-11, 0.0, 0.0), m, m).unwrap();
    let (f_near, g_near) = gas_rates(&pot, &gas, &near, &small_grid()).unwrap();
    let (f_far, _) = gas_rates(&pot, &gas, &far, &small_grid()).unwrap();
    assert!(f_near.rate > 0.0 && f_far.rate > f_near.rate);
    // identical orientations: G is odd in R and the grid is symmetric under n -> -n
    assert!(g_near.rate.abs() <= 1e-8 * f_near.rate + g_near.quadrature_error);
}

/// Thermal momentum vector and a uniformly distributed outgoing direction.
struct MomentumAndDirection(GasEnvironment);

impl Sampler for MomentumAndDirection {
    type Point = (Vector3<f64>, Vector3<f64>);
    fn sample<R: Rng>(&self, rng: &mut R) -> (Self::Point, f64) {
        let sigma = self.0.thermal_momentum();
        let mut draw = || -> f64 { rng.sample(StandardNormal) };
        let p = Vector3::new(draw(), draw(), draw()) * sigma;
        ((p, uniform_unit_vector(rng)), 4.0 * PI)
    }
}

#[test]
fn displaced_rates_match_monte_carlo() {
    let gas = helium();
    let pot = weak(2.0);
    let scattering = EikonalScattering::new(pot, gas.particle_mass()).unwrap();
    let r = Vector3::new(1e-11, -5e-12, 8e-12);
    let m2 = Vector3::new((PI / 4.0).sin(), 0.0, (PI / 4.0).cos());
    let cfg = PairConfiguration::new(r, Vector3::z(), m2).unwrap();
    let (f, g) = gas_rates(&pot, &gas, &cfg, &small_grid()).unwrap();
    assert!(f.is_converged() && g.is_converged());

    let integrand = |(p, np): &(Vector3<f64>, Vector3<f64>)| -> (Complex64, Complex64) {
        let pn = p.norm();
        let n = p / pn;
        let f1 = scattering.amplitude(pn, &n, np, &cfg.m1).unwrap();
        let f2 = scattering.amplitude(pn, &n, np, &cfg.m2).unwrap();
        let phase = Complex64::from_polar(1.0, pn * r.dot(&(n - np)) / HBAR);
        (f1 * phase - f2, f1 * f2.conj() * phase)
    };
    let sampler = MomentumAndDirection(gas);
    let pref = gas.number_density() / (2.0 * gas.particle_mass());
    let mc_f = mc_oracle(&sampler, |pt| Complex64::new(pt.0.norm() * integrand(pt).0.norm_sqr(), 0.0), 400_000, 11)
        .unwrap()
        .map(|v| v.re)
        .scaled(pref);
    let mc_g = mc_oracle(&sampler, |pt| Complex64::new(pt.0.norm() * integrand(pt).1.im, 0.0), 400_000, 12)
        .unwrap()
        .map(|v| v.re)
        .scaled(2.0 * pref);
    assert!((f.rate - mc_f.value).abs() <= 3.0 * mc_f.abs_error + f.quadrature_error, "F {} vs {} ± {}", f.rate, mc_f.value, mc_f.abs_error);
    assert!((g.rate - mc_g.value).abs() <= 3.0 * mc_g.abs_error + g.quadrature_error, "G {} vs {} ± {}", g.rate, mc_g.value, mc_g.abs_error);
}

#[test]
fn rejects_exponent_below_six() {
    let pot = AnisotropicPotential::new(1e-79, 5, 1.0).unwrap();
    assert!(gas_rates(&pot, &helium(), &PairConfiguration::at_angle(1.0), &small_grid()).is_err());
}

use std::f64::consts::PI;
use std::sync::Arc;

use sextic::coupled::{harmonic_reduced, identical_pi4_kernel, GridConfig, HarmonicPair};
use sextic::fock::*;
use sextic::qes::{variance, GroundState};
use sextic::quadrature::{default_window, DensityKernel, GridKernel, KernelFn};

fn pure_kernel(c: f64) -> DensityKernel {
    let g = GroundState::new(c).unwrap();
    let l = default_window(variance(c).unwrap(), |x| g.density(x)).unwrap();
    let k: KernelFn = Arc::new(move |x, y| g.psi(x) * g.psi(y));
    DensityKernel::from_analytic(k, l, 513).unwrap()
}

fn pure_stats(c: f64, n_max: usize) -> NumberStats {
    let k = pure_kernel(c);
    let omega = omega_from_variance(variance(c).unwrap()).unwrap();
    number_populations(&k.grid, omega, n_max).unwrap()
}

#[test]
fn omega_examples() {
    assert_eq!(omega_from_variance(0.5).unwrap(), 1.0);
    let (g, b) = (1.7, 0.4);
    let w = omega_from_variance(1.0 / (4.0 * (g * g - b * b))).unwrap();
    assert!((w - 2.0 * (g * g - b * b)).abs() < 1e-14);
    assert!(omega_from_variance(-1.0).is_err());
}

#[test]
fn vacuum_occupies_ground_level_only() {
    let vac = |x: f64, y: f64| (-(x * x + y * y) / 2.0).exp() / PI.sqrt();
    let rho = GridKernel::sample(&vac, 12.0, 401).unwrap();
    let s = number_populations(&rho, 1.0, 40).unwrap();
    assert!((s.populations[0] - 1.0).abs() < 1e-10);
    assert!(s.populations[1..].iter().all(|p| p.abs() < 1e-10));
}

#[test]
fn symmetric_states_have_no_odd_populations() {
    for c in [-5.0, -1.0, 1.0, 4.0] {
        let s = pure_stats(c, 80);
        assert!(s.max_odd() < 1e-10, "c = {c}");
    }
    let k = identical_pi4_kernel(-1.0, &GridConfig::default()).unwrap();
    let s = number_statistics(&k, None, Some(80)).unwrap();
    assert!(s.max_odd() < 1e-10);
}

#[test]
fn pure_state_dips_match_dense_oracle() {
    // even-n local minima of a dense-grid reference computation
    assert_eq!(
        pure_stats(-1.0, 80).even_minima(0.0),
        vec![2, 14, 30, 52, 78]
    );
    assert_eq!(pure_stats(1.0, 80).even_minima(0.0)[..4], [2, 8, 18, 26]);
    assert!(pure_stats(-3.0, 80).even_minima(0.0).contains(&22));
}

#[test]
fn mixed_pi4_state_falls_off_without_dips() {
    for c in [-1.0, 1.0] {
        let k = identical_pi4_kernel(c, &GridConfig::default()).unwrap();
        let s = number_statistics(&k, None, Some(60)).unwrap();
        assert!(
            s.even_minima(1e-10).is_empty(),
            "c = {c}: {:?}",
            s.even_minima(1e-10)
        );
    }
}

#[test]
fn completeness_and_frequency_covariance() {
    let k = pure_kernel(1.0);
    let w0 = omega_from_variance(variance(1.0).unwrap()).unwrap();
    for w in [w0, 0.7 * w0, 1.5 * w0] {
        let s = number_populations(&k.grid, w, 80).unwrap();
        assert!(s.tail_mass.abs() < 1e-6, "ω = {w}: {}", s.tail_mass);
        assert!(s.max_odd() < 1e-10);
    }
    let a = number_populations(&k.grid, w0, 80).unwrap();
    let b = number_populations(&k.grid, 1.5 * w0, 80).unwrap();
    assert!((a.populations[2] - b.populations[2]).abs() > 1e-3);
}

#[test]
fn default_statistics_extend_on_heavy_tails() {
    let s = number_statistics(&pure_kernel(1.0), None, None).unwrap();
    assert_eq!(s.n_max, DEFAULT_N_MAX);
    let s = number_statistics(&pure_kernel(-3.0), None, None).unwrap();
    assert_eq!(s.n_max, 128);
    assert!(s.tail_mass > 0.0);
}

#[test]
fn thermal_kernel_is_geometric_in_the_diagonalizing_basis() {
    let pair = HarmonicPair::new(1.0, 3.0, 0.6).unwrap();
    let r = harmonic_reduced(&pair, None, Some(401)).unwrap();
    let (g, b) = (r.params.gamma, r.params.beta);
    let t = thermal_params(g, b, ThermalConvention::SqrtHalfOmegaT).unwrap();
    let spec = diagonalize_kernel(&r.kernel.grid).unwrap();
    for n in 0..6 {
        let q = spec.eigenvalues[n + 1] / spec.eigenvalues[n];
        assert!((q - t.ratio).abs() < 1e-6, "n = {n}: {q} vs {}", t.ratio);
    }
    let s = number_populations(&r.kernel.grid, (g * g - b * b).sqrt(), 60).unwrap();
    assert!((s.mean() - t.mean_n).abs() < 1e-8);
    assert!((t.mean_n - t.ratio / (1.0 - t.ratio)).abs() < 1e-14);
    assert!((spec.purity - r.purity).abs() < 1e-7);

    let other = thermal_params(g, b, ThermalConvention::HalfSqrtOmegaT).unwrap();
    assert!((other.ratio - t.ratio).abs() > 1e-3);
}

#[test]
fn thermal_limits() {
    let t = thermal_params(2.0, 0.0, ThermalConvention::default()).unwrap();
    assert_eq!(t.mean_n, 0.0);
    let mut last = 0.0;
    for b in [0.5, 1.0, 1.5, 1.9, 1.99, 1.999] {
        let t = thermal_params(2.0, b, ThermalConvention::default()).unwrap();
        assert!(t.mean_n > last && t.temperature > 0.0);
        last = t.mean_n;
    }
    assert!(last > 10.0);
    assert!(thermal_params(2.0, 2.0, ThermalConvention::default()).is_err());
}

#[test]
fn pure_kernel_has_a_single_eigenvalue() {
    let s = diagonalize_kernel(&pure_kernel(-2.0).grid).unwrap();
    assert!((s.eigenvalues[0] - 1.0).abs() < 1e-8);
    assert!(s.eigenvalues[1..].iter().all(|l| l.abs() < 1e-8));
    let total: f64 = s.eigenvalues.iter().sum();
    assert!((total - 1.0).abs() < 1e-8);
}

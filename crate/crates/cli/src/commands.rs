use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde_json::json;

use sextic::coupled::{
    approx_moments_nonid, crosses_boundary, expand_coupled_hamiltonian, harmonic_coupled_coeffs,
    harmonic_reduced, identical_pi4_kernel, reduced_moment, reduced_moment_binomial,
    reduced_numeric, variance_relation, AnharmonicPair, GridConfig, HarmonicCoupling, HarmonicPair,
    MIXING_TOL,
};
use sextic::fock::{
    diagonalize_kernel, number_populations, number_statistics, thermal_params, ThermalConvention,
    TAIL_TARGET,
};
use sextic::husimi::{
    q_mixed, q_pure, scan_zeros, PhasePoint, GC_REL_TOL, MAX_SCAN_HALVINGS, ZERO_TOLERANCE,
};
use sextic::qes::{
    classify_well, moment_report, potential, potential_extrema, variance, GroundState, MomentSource,
};
use sextic::quadrature::{default_window, DensityKernel, KernelFn};
use sextic::sampler::{sample_stream, DisorderSpec, Observable, SampleValues, Source};
use sextic::specfun::double_factorial_f64;

use crate::args::*;
use crate::output::Report;
use crate::row;

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn grid_config(g: &GridArgs, x2_tol: f64) -> GridConfig {
    GridConfig {
        half_width: g.half_width,
        nodes: g.nodes,
        x2_tol,
    }
}

pub fn pure_kernel(c: f64, g: &GridArgs) -> Result<DensityKernel> {
    let gs = GroundState::new(c)?;
    let l = match g.half_width {
        Some(l) => l,
        None => default_window(variance(c)?, |x| gs.density(x))?,
    };
    let k: KernelFn = Arc::new(move |x, y| gs.psi(x) * gs.psi(y));
    Ok(DensityKernel::from_analytic_even(k, l, g.nodes)?)
}

pub fn state_kernel(state: StateKind, c: f64, g: &GridArgs) -> Result<DensityKernel> {
    match state {
        StateKind::Pure => pure_kernel(c, g),
        StateKind::MixedPi4 => Ok(identical_pi4_kernel(c, &grid_config(g, 1e-10))?),
    }
}

pub fn potential_cmd(a: &PotentialArgs) -> Result<Report> {
    let extrema = potential_extrema(a.c);
    let outer = extrema.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let l = a.range.unwrap_or((1.5 * outer).max(2.5));
    if !(l > 0.0) || a.points < 2 {
        bail!(sextic::Error::Domain(
            "potential grid needs a positive range and at least 2 points".into()
        ));
    }
    let mut r = Report::new(vec!["y", "V"]);
    for y in linspace(-l, l, a.points) {
        r.push(row![y, potential(y, a.c)]);
    }
    let class = classify_well(a.c);
    Ok(r.with_result(json!({
        "class": class,
        "extrema": extrema,
        "extremum_values": extrema.iter().map(|y| potential(*y, a.c)).collect::<Vec<_>>(),
        "half_width": l,
    })))
}

pub fn moments_cmd(a: &MomentsArgs) -> Result<Report> {
    let source = match a.method {
        MomentMethod::Analytic => MomentSource::Analytic,
        MomentMethod::Oracle => MomentSource::Oracle,
    };
    let rep = moment_report(a.c, &a.orders.0, source)?;
    let mut r = Report::new(vec!["order", "raw", "excess", "ratio"]);
    for (i, &o) in rep.orders.iter().enumerate() {
        let ratio = if i == 0 { f64::NAN } else { rep.ratios[i - 1] };
        r.push(row![o, rep.raw[i], rep.excess[i], ratio]);
    }
    let tol = match a.method {
        MomentMethod::Analytic => json!({ "method": "closed form" }),
        MomentMethod::Oracle => json!({ "quadrature_rel_tol": 1e-12 }),
    };
    Ok(
        r.with_result(json!({ "c": rep.c, "variance": rep.variance, "source": rep.source }))
            .with_tolerances(tol),
    )
}

pub fn qfunc_cmd(a: &QfuncArgs) -> Result<Report> {
    if a.points < 2 || !(a.re_max > a.re_min) || !(a.im_max > a.im_min) {
        bail!(sextic::Error::Domain(
            "Q-function grid needs increasing bounds and at least 2 points".into()
        ));
    }
    let kernel = match a.state {
        StateKind::Pure => None,
        StateKind::MixedPi4 => Some(identical_pi4_kernel(a.c, &GridConfig::default())?),
    };
    let mut r = Report::new(vec!["alpha1", "alpha2", "q"]);
    for a1 in linspace(a.re_min, a.re_max, a.points) {
        for a2 in linspace(a.im_min, a.im_max, a.points) {
            let p = PhasePoint::new(a1, a2);
            let q = match &kernel {
                None => q_pure(p, a.c)?,
                Some(k) => q_mixed(p, &k.grid)?,
            };
            r.push(row![a1, a2, q]);
        }
    }
    let tol = match &kernel {
        None => json!({ "gc_rel_tol": GC_REL_TOL }),
        Some(k) => {
            json!({ "grid_nodes": k.grid.len(), "grid_half_width": k.grid.half_width(), "x2_tol": 1e-10 })
        }
    };
    Ok(r.with_result(json!({ "c": a.c, "state": a.state }))
        .with_tolerances(tol))
}

pub fn gc_scan_cmd(a: &GcScanArgs) -> Result<Report> {
    let rep = scan_zeros(a.c, a.alpha2_max, a.step)?;
    let mut r = Report::new(vec!["alpha2", "gc_ratio"]);
    for &(x, g) in &rep.profile {
        r.push(row![x, g]);
    }
    Ok(r.with_result(json!({
        "c": rep.c,
        "window": rep.window,
        "zeros": rep.zeros,
        "count": rep.count,
        "density_estimate": rep.density_estimate,
        "max_abs_gc": rep.max_abs_gc,
        "final_step": rep.step,
        "halvings": rep.halvings,
    }))
    .with_tolerances(json!({
        "initial_step": a.step,
        "max_halvings": MAX_SCAN_HALVINGS,
        "zero_tolerance": ZERO_TOLERANCE,
        "gc_rel_tol": GC_REL_TOL,
    })))
}

pub fn fock_cmd(a: &FockArgs) -> Result<Report> {
    let kernel = state_kernel(a.state, a.c, &a.grid)?;
    let stats = number_statistics(&kernel, a.omega, a.n_max)?;
    let mut r = Report::new(vec!["n", "p"]);
    for (n, p) in stats.populations.iter().enumerate() {
        r.push(row![n, *p]);
    }
    Ok(r.with_result(json!({
        "c": a.c,
        "state": a.state,
        "omega": stats.omega,
        "n_max": stats.n_max,
        "tail_mass": stats.tail_mass,
        "mean_n": stats.mean(),
        "max_odd": stats.max_odd(),
        "even_minima": stats.even_minima(0.0),
    }))
    .with_tolerances(json!({
        "tail_target": TAIL_TARGET,
        "grid_nodes": kernel.grid.len(),
        "grid_half_width": kernel.grid.half_width(),
        "grid_error_estimate": kernel.grid.error_estimate,
    })))
}

fn harmonic_pair(a: &HarmonicArgs) -> Result<HarmonicPair> {
    match (a.omega1p, a.omega2p, a.theta, a.omega1, a.omega2, a.lambda) {
        (Some(w1), Some(w2), Some(t), None, None, None) => Ok(HarmonicPair::new(w1, w2, t)?),
        (None, None, None, Some(w1), Some(w2), Some(l)) => {
            Ok(HarmonicPair::from_coupling(&HarmonicCoupling {
                omega1_sq: w1 * w1,
                omega2_sq: w2 * w2,
                lambda: l,
            })?)
        }
        _ => bail!(sextic::Error::Domain(
            "give either --omega1p --omega2p --theta or --omega1 --omega2 --lambda".into()
        )),
    }
}

pub fn harmonic_cmd(a: &HarmonicArgs) -> Result<Report> {
    let pair = harmonic_pair(a)?;
    let coupling = harmonic_coupled_coeffs(&pair)?;
    let red = harmonic_reduced(&pair, a.grid.half_width, Some(a.grid.nodes))?;
    let (g, b) = (red.params.gamma, red.params.beta);
    let thermal = thermal_params(g, b, ThermalConvention::SqrtHalfOmegaT)?;
    let other = thermal_params(g, b, ThermalConvention::HalfSqrtOmegaT)?;
    let stats = number_populations(&red.kernel.grid, (g * g - b * b).sqrt(), a.n_max)?;
    let spectrum = diagonalize_kernel(&red.kernel.grid)?;
    let mut r = Report::new(vec!["n", "p", "p_thermal", "eigenvalue"]);
    let xi = thermal.ratio;
    for (n, p) in stats.populations.iter().enumerate() {
        let eig = spectrum.eigenvalues.get(n).copied().unwrap_or(f64::NAN);
        r.push(row![n, *p, (1.0 - xi) * xi.powi(n as i32), eig]);
    }
    Ok(r.with_result(json!({
        "pair": pair,
        "coupling": coupling,
        "params": red.params,
        "variance": red.variance,
        "purity": red.purity,
        "grid_purity": spectrum.purity,
        "entropy": spectrum.entropy,
        "thermal": thermal,
        "thermal_alternative": other,
        "tail_mass": stats.tail_mass,
    }))
    .with_tolerances(json!({
        "grid_nodes": red.kernel.grid.len(),
        "grid_half_width": red.kernel.grid.half_width(),
        "grid_error_estimate": red.kernel.grid.error_estimate,
    })))
}

fn pair_of(p: &PairArgs) -> Result<AnharmonicPair> {
    Ok(AnharmonicPair::new(p.c1, p.c2, p.theta)?)
}

pub fn coupled_cmd(cmd: &CoupledCommand) -> Result<Report> {
    match cmd {
        CoupledCommand::Moments(a) => coupled_moments(a),
        CoupledCommand::Kernel(a) => coupled_kernel(a),
        CoupledCommand::Spectrum(a) => coupled_spectrum(a),
        CoupledCommand::Expansion(a) => coupled_expansion(a),
        CoupledCommand::Variance(a) => coupled_variance(a),
    }
}

fn coupled_moments(a: &CoupledMomentsArgs) -> Result<Report> {
    let p = pair_of(&a.pair)?;
    let var = reduced_moment_binomial(2, &p)?;
    let mut r = Report::new(vec![
        "order",
        "mu",
        "mu_quadrature",
        "excess",
        "excess_approx",
    ]);
    let mut degraded = false;
    for &o in &a.orders.0 {
        let mu = if o == 0 {
            1.0
        } else {
            reduced_moment_binomial(o, &p)?
        };
        let quad = if a.quadrature && o > 0 {
            reduced_moment(o, &p)?
        } else {
            f64::NAN
        };
        let (nu, approx) = if o >= 4 {
            let ap = approx_moments_nonid(o, &p)?;
            degraded |= ap.degraded;
            (
                mu / var.powi(o as i32 / 2) - double_factorial_f64(o as i64 - 1),
                ap.nu_x1,
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        r.push(row![o, mu, quad, nu, approx]);
    }
    Ok(r.with_result(json!({ "pair": p, "variance": var, "approx_degraded": degraded }))
        .with_tolerances(json!({ "quadrature_rel_tol": if a.quadrature { json!(1e-11) } else { json!(null) } })))
}

fn reduced_kernel(a: &KernelArgs) -> Result<(AnharmonicPair, sextic::quadrature::GridKernel)> {
    let p = pair_of(&a.pair)?;
    let cfg = grid_config(&a.grid, a.x2_tol);
    let grid = if p.is_identical_pi4() {
        identical_pi4_kernel(p.c1, &cfg)?.grid
    } else {
        reduced_numeric(&p, &cfg).context("tracing out x₂")?
    };
    Ok((p, grid))
}

fn kernel_tolerances(a: &KernelArgs, grid: &sextic::quadrature::GridKernel) -> serde_json::Value {
    json!({
        "grid_nodes": grid.len(),
        "grid_half_width": grid.half_width(),
        "grid_error_estimate": grid.error_estimate,
        "x2_tol": a.x2_tol,
    })
}

fn coupled_kernel(a: &KernelArgs) -> Result<Report> {
    let (p, grid) = reduced_kernel(a)?;
    let mut r;
    if a.full {
        r = Report::new(vec!["x", "xp", "rho"]);
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                r.push(row![grid.nodes[i], grid.nodes[j], grid.values[(i, j)]]);
            }
        }
    } else {
        r = Report::new(vec!["x", "rho"]);
        for i in 0..grid.len() {
            r.push(row![grid.nodes[i], grid.values[(i, i)]]);
        }
    }
    let boundary = p.is_identical_pi4() && crosses_boundary(p.c1, grid.half_width());
    let tol = kernel_tolerances(a, &grid);
    Ok(r.with_result(json!({
        "pair": p,
        "trace": grid.trace(),
        "purity": grid.purity(),
        "second_moment": grid.diagonal_moment(2),
        "crosses_u_zero": boundary,
    }))
    .with_tolerances(tol))
}

fn coupled_spectrum(a: &KernelArgs) -> Result<Report> {
    let (p, grid) = reduced_kernel(a)?;
    let s = diagonalize_kernel(&grid)?;
    let mut r = Report::new(vec!["k", "eigenvalue"]);
    for (k, l) in s.eigenvalues.iter().enumerate() {
        r.push(row![k, *l]);
    }
    let tol = kernel_tolerances(a, &grid);
    Ok(r.with_result(
        json!({ "pair": p, "purity": s.purity, "entropy": s.entropy, "trace": grid.trace() }),
    )
    .with_tolerances(tol))
}

fn coupled_expansion(a: &ExpansionArgs) -> Result<Report> {
    let e = expand_coupled_hamiltonian(a.a1, a.a2, a.b1, a.b2, a.theta)?;
    let mut r = Report::new(vec!["i", "j", "coefficient"]);
    for m in &e.terms {
        r.push(row![m.i, m.j, m.value]);
    }
    Ok(r.with_result(json!({
        "theta": e.theta,
        "constant": e.constant,
        "mixing": e.mixing,
        "max_mixing_residual": e.max_mixing_residual(),
    }))
    .with_tolerances(json!({ "mixing_tol": MIXING_TOL })))
}

fn coupled_variance(a: &PairArgs) -> Result<Report> {
    let p = pair_of(a)?;
    let v = variance_relation(&p)?;
    let mut r = Report::new(vec![
        "var_x1",
        "var_x2",
        "var_y1",
        "var_y2",
        "pred_x1",
        "pred_x2",
        "dev_x1",
        "dev_x2",
        "sum_check",
    ]);
    r.push(row![
        v.var_x1,
        v.var_x2,
        v.var_y1,
        v.var_y2,
        v.prediction.0,
        v.prediction.1,
        v.deviation.0,
        v.deviation.1,
        v.sum_check
    ]);
    Ok(r.with_result(json!({ "pair": p }))
        .with_tolerances(json!({ "quadrature_rel_tol": 1e-11 })))
}

fn need(v: Option<f64>, flag: &str, source: &str) -> Result<f64> {
    match v {
        Some(x) => Ok(x),
        None => bail!(sextic::Error::Domain(format!(
            "source {source} needs --{flag}"
        ))),
    }
}

pub fn sample_spec(a: &SampleArgs) -> Result<DisorderSpec> {
    if let Some(path) = &a.spec {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: DisorderSpec = serde_json::from_str(&text)
            .map_err(|e| sextic::Error::Domain(format!("disorder spec {}: {e}", path.display())))?;
        spec.validate()?;
        return Ok(spec);
    }
    let source = match a.source {
        SourceKind::Pure => Source::Pure {
            c: need(a.c, "c", "pure")?,
        },
        SourceKind::MixedPi4 => Source::MixedIdenticalPi4 {
            c: need(a.c, "c", "mixed-pi4")?,
        },
        SourceKind::MixedGeneral => Source::MixedGeneral {
            c1: need(a.c1, "c1", "mixed-general")?,
            c2: need(a.c2, "c2", "mixed-general")?,
            theta: need(a.theta, "theta", "mixed-general")?,
        },
        SourceKind::Harmonic => Source::Harmonic {
            omega1p: need(a.omega1p, "omega1p", "harmonic")?,
            omega2p: need(a.omega2p, "omega2p", "harmonic")?,
            theta: need(a.theta, "theta", "harmonic")?,
        },
    };
    let observable = match a.observable {
        ObservableKind::Quadrature => Observable::Quadrature,
        ObservableKind::Number => Observable::Number { omega: a.omega },
    };
    Ok(DisorderSpec::new(source, observable, a.count, a.seed)?)
}

pub fn sample_cmd(a: &SampleArgs) -> Result<Report> {
    let spec = sample_spec(a)?;
    let set = sample_stream(&spec, a.stream)?;
    let mut r;
    match &set.values {
        SampleValues::Quadrature(xs) => {
            r = Report::new(vec!["x"]);
            for &x in xs {
                r.push(row![x]);
            }
        }
        SampleValues::Number(ns) => {
            r = Report::new(vec!["n"]);
            for &n in ns {
                r.push(row![n]);
            }
        }
    }
    Ok(r.with_result(json!({
        "spec": spec,
        "seed": spec.seed,
        "stream": set.stream,
        "generator": "ChaCha20, key from seed_from_u64(seed), stream index as nonce",
        "empirical_moments": set.empirical_moments,
        "within_5_sigma": set.empirical_moments.within(5.0),
    }))
    .with_tolerances(json!({
        "cdf_nodes": sextic::sampler::CDF_NODES,
        "negative_density_tol": sextic::sampler::NEGATIVE_DENSITY_TOL,
        "odd_population_tol": sextic::sampler::ODD_POPULATION_TOL,
    })))
}

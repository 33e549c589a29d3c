//! Fixed parameter grids behind each figure panel. Grids are part of the id,
//! so every id always writes the same table.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use anyhow::{bail, Result};
use serde_json::json;

use sextic::coupled::{
    harmonic_reduced_params, identical_pi4_kernel, reduced_moment_binomial, AnharmonicPair,
    GridConfig, HarmonicCoupling, HarmonicPair,
};
use sextic::fock::{number_statistics, omega_from_variance};
use sextic::husimi::{q_mixed, q_pure, scan_zeros, PhasePoint, DEFAULT_SCAN_STEP};
use sextic::qes::{excess_moment, moment_report, potential, raw_moment, variance, MomentSource};
use sextic::quadrature::DEFAULT_GRID_NODES;
use sextic::specfun::double_factorial_f64;

use crate::args::GridArgs;
use crate::commands::{linspace, pure_kernel};
use crate::output::Report;
use crate::row;

pub const FIGURES: &[(&str, &str)] = &[
    (
        "potential-classes",
        "V(y) for c = 5, -1, -5: single, double and triple well",
    ),
    ("variance-vs-c", "ground-state variance for c in [-20, 20]"),
    (
        "excess-moments",
        "excess moments of orders 4..16 over c in [-10, 10], raw and divided by |1-(2n-1)!!|",
    ),
    (
        "moment-ratios",
        "successive ratios R_{n+1} against 2n for eight values of c",
    ),
    ("husimi-q", "pure-state Q-functions for c = 10, 1, -2, -10"),
    (
        "gc-profile",
        "Re G_c(i a2)/G_c(0) on [0, 12] with zeros for c = 10, 1, -2, -10",
    ),
    (
        "fock-pure",
        "Fock populations of the pure states c = 1 and c = -1",
    ),
    (
        "purity-harmonic",
        "reduced purity of two harmonic pairs against the coupling",
    ),
    (
        "purity-pi4",
        "reduced purity of the identical pi/4 pair against c",
    ),
    (
        "excess-moments-pi4",
        "excess moments of orders 4..16 of the identical pi/4 reduced state",
    ),
    (
        "moment-ratio-pi4",
        "pi/4 reduced-state moments divided by the single-oscillator ones",
    ),
    (
        "fock-mixed",
        "Fock populations of the identical pi/4 reduced state beside the pure state, c = 1 and -1",
    ),
    (
        "husimi-mixed",
        "Q-functions of the c = -5 identical pi/4 reduced state and pure state",
    ),
    (
        "variance-ratio-c2",
        "Var(x1)/Var(y1) against c2 at pi/4 for c1 = -1, 1, 3",
    ),
    (
        "variance-vs-theta",
        "Var(x1) and Var(x2) against theta for c1 = -1, c2 = -5",
    ),
    (
        "kurtosis-vs-c2",
        "nu4(x1) against c2 at three angles for four values of c1",
    ),
    (
        "kurtosis-vs-theta",
        "nu4(x1) against theta for four (c1, c2) pairs",
    ),
];

/// Grid from `lo` to `hi` in steps of `step`, rounded to suppress drift.
fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

fn default_grid() -> GridArgs {
    GridArgs {
        nodes: DEFAULT_GRID_NODES,
        half_width: None,
    }
}

pub fn figure(id: &str) -> Result<Report> {
    let report = match id {
        "potential-classes" => potential_classes(),
        "variance-vs-c" => variance_vs_c(),
        "excess-moments" => excess_moments(),
        "moment-ratios" => moment_ratios(),
        "husimi-q" => husimi_q(),
        "gc-profile" => gc_profile(),
        "fock-pure" => fock_pure(),
        "purity-harmonic" => purity_harmonic(),
        "purity-pi4" => purity_pi4(),
        "excess-moments-pi4" => excess_moments_pi4(),
        "moment-ratio-pi4" => moment_ratio_pi4(),
        "fock-mixed" => fock_mixed(),
        "husimi-mixed" => husimi_mixed(),
        "variance-ratio-c2" => variance_ratio_c2(),
        "variance-vs-theta" => variance_vs_theta(),
        "kurtosis-vs-c2" => kurtosis_vs_c2(),
        "kurtosis-vs-theta" => kurtosis_vs_theta(),
        other => bail!(sextic::Error::Domain(format!(
            "unknown figure id `{other}`; `sextic figure --list` shows the ids"
        ))),
    }?;
    Ok(report)
}

fn potential_classes() -> Result<Report> {
    let mut r = Report::new(vec!["c", "y", "V"]);
    for c in [5.0, -1.0, -5.0] {
        for y in linspace(-2.5, 2.5, 501) {
            r.push(row![c, y, potential(y, c)]);
        }
    }
    Ok(r)
}

fn variance_vs_c() -> Result<Report> {
    let mut r = Report::new(vec!["c", "variance"]);
    for c in steps(-20.0, 20.0, 0.1) {
        r.push(row![c, variance(c)?]);
    }
    Ok(r.with_tolerances(json!({ "method": "closed form" })))
}

fn lower_bound(order: u32) -> f64 {
    (1.0 - double_factorial_f64(order as i64 - 1)).abs()
}

fn excess_moments() -> Result<Report> {
    let orders: Vec<u32> = (4..=16).step_by(2).collect();
    let mut r = Report::new(vec!["c", "order", "excess", "excess_scaled"]);
    for c in steps(-10.0, 10.0, 0.1) {
        for &o in &orders {
            let nu = excess_moment(o, c)?;
            r.push(row![c, o, nu, nu / lower_bound(o)]);
        }
    }
    Ok(r)
}

fn moment_ratios() -> Result<Report> {
    let orders: Vec<u32> = (4..=32).step_by(2).collect();
    let mut r = Report::new(vec!["c", "two_n", "ratio", "ratio_over_2n_plus_1"]);
    for c in [-10.0, -5.0, -2.0, -1.0, 1.0, 2.0, 5.0, 10.0] {
        let rep = moment_report(c, &orders, MomentSource::Analytic)?;
        for (i, ratio) in rep.ratios.iter().enumerate() {
            let two_n = orders[i];
            r.push(row![c, two_n, *ratio, ratio / (two_n + 1) as f64]);
        }
    }
    Ok(r)
}

fn husimi_q() -> Result<Report> {
    let mut r = Report::new(vec!["c", "alpha1", "alpha2", "q"]);
    for c in [10.0, 1.0, -2.0, -10.0] {
        for a1 in linspace(-4.0, 4.0, 41) {
            for a2 in linspace(-4.0, 4.0, 41) {
                r.push(row![c, a1, a2, q_pure(PhasePoint::new(a1, a2), c)?]);
            }
        }
    }
    Ok(r)
}

fn gc_profile() -> Result<Report> {
    let mut r = Report::new(vec!["c", "alpha2", "gc_ratio"]);
    let mut zeros = Vec::new();
    for c in [10.0, 1.0, -2.0, -10.0] {
        let rep = scan_zeros(c, 12.0, DEFAULT_SCAN_STEP)?;
        for &(x, g) in &rep.profile {
            r.push(row![c, x, g]);
        }
        zeros.push(json!({ "c": c, "zeros": rep.zeros, "max_abs_gc": rep.max_abs_gc }));
    }
    Ok(r.with_result(json!({ "scans": zeros })))
}

fn fock_pure() -> Result<Report> {
    let mut r = Report::new(vec!["c", "n", "p"]);
    for c in [1.0, -1.0] {
        let s = number_statistics(&pure_kernel(c, &default_grid())?, None, Some(60))?;
        for (n, p) in s.populations.iter().enumerate() {
            r.push(row![c, n, *p]);
        }
    }
    Ok(r)
}

fn purity_harmonic() -> Result<Report> {
    let mut r = Report::new(vec![
        "omega1",
        "omega2",
        "lambda",
        "coupling_fraction",
        "purity",
    ]);
    for (w1, w2) in [(1.0, 1.0), (1.0, 2.0)] {
        for f in linspace(0.0, 0.999, 334) {
            let lambda = 2.0 * w1 * w2 * f;
            let pair = HarmonicPair::from_coupling(&HarmonicCoupling {
                omega1_sq: w1 * w1,
                omega2_sq: w2 * w2,
                lambda,
            })?;
            let params = harmonic_reduced_params(&pair)?;
            r.push(row![w1, w2, lambda, f, params.purity()]);
        }
    }
    Ok(r)
}

/// Coarse c grid plus a dense stretch around the purity dip.
fn pi4_c_grid() -> Vec<f64> {
    let mut cs = steps(-10.0, 10.0, 0.5);
    cs.extend(steps(-3.5, -2.0, 0.05));
    cs.sort_by(|a, b| a.total_cmp(b));
    cs.dedup();
    cs
}

fn purity_pi4() -> Result<Report> {
    let mut r = Report::new(vec!["c", "purity"]);
    let cfg = GridConfig::default();
    let mut worst_error = 0.0f64;
    for c in pi4_c_grid() {
        let k = identical_pi4_kernel(c, &cfg)?;
        worst_error = worst_error.max(k.grid.error_estimate);
        r.push(row![c, k.grid.purity()]);
    }
    Ok(r.with_tolerances(json!({
        "grid_nodes": cfg.nodes,
        "worst_grid_error_estimate": worst_error,
    })))
}

fn excess_moments_pi4() -> Result<Report> {
    let orders: Vec<u32> = (4..=16).step_by(2).collect();
    let mut r = Report::new(vec!["c", "order", "excess", "excess_scaled"]);
    for c in steps(-10.0, 10.0, 0.1) {
        let p = AnharmonicPair::identical_pi4(c)?;
        let var = variance(c)?;
        for &o in &orders {
            let nu = reduced_moment_binomial(o, &p)? / var.powi(o as i32 / 2)
                - double_factorial_f64(o as i64 - 1);
            r.push(row![c, o, nu, nu / lower_bound(o)]);
        }
    }
    Ok(r)
}

fn moment_ratio_pi4() -> Result<Report> {
    let orders: Vec<u32> = (4..=16).step_by(2).collect();
    let mut r = Report::new(vec!["c", "order", "raw_ratio", "excess_ratio"]);
    for c in steps(-10.0, 10.0, 0.1) {
        let p = AnharmonicPair::identical_pi4(c)?;
        let var = variance(c)?;
        for &o in &orders {
            let mixed = reduced_moment_binomial(o, &p)?;
            let pure = raw_moment(o, c)?;
            let gauss = double_factorial_f64(o as i64 - 1);
            let scale = var.powi(o as i32 / 2);
            r.push(row![
                c,
                o,
                mixed / pure,
                (mixed / scale - gauss) / (pure / scale - gauss)
            ]);
        }
    }
    Ok(r)
}

fn fock_mixed() -> Result<Report> {
    let mut r = Report::new(vec!["c", "n", "p_pure", "p_mixed"]);
    for c in [1.0, -1.0] {
        let omega = omega_from_variance(variance(c)?)?;
        let pure = number_statistics(&pure_kernel(c, &default_grid())?, Some(omega), Some(60))?;
        let mixed = number_statistics(
            &identical_pi4_kernel(c, &GridConfig::default())?,
            Some(omega),
            Some(60),
        )?;
        for n in 0..=60 {
            r.push(row![c, n, pure.populations[n], mixed.populations[n]]);
        }
    }
    Ok(r)
}

fn husimi_mixed() -> Result<Report> {
    let c = -5.0;
    let k = identical_pi4_kernel(c, &GridConfig::default())?;
    let mut r = Report::new(vec!["alpha1", "alpha2", "q_mixed", "q_pure"]);
    for a1 in linspace(-3.0, 3.0, 41) {
        for a2 in linspace(-3.0, 3.0, 41) {
            let p = PhasePoint::new(a1, a2);
            r.push(row![a1, a2, q_mixed(p, &k.grid)?, q_pure(p, c)?]);
        }
    }
    Ok(r.with_tolerances(json!({
        "grid_nodes": k.grid.len(),
        "grid_half_width": k.grid.half_width(),
        "grid_error_estimate": k.grid.error_estimate,
    })))
}

/// Var(x₁) and, from the swapped pair, Var(x₂).
fn pair_variances(c1: f64, c2: f64, theta: f64) -> Result<(f64, f64)> {
    let v1 = reduced_moment_binomial(2, &AnharmonicPair::new(c1, c2, theta)?)?;
    let v2 = reduced_moment_binomial(2, &AnharmonicPair::new(c2, c1, theta)?)?;
    Ok((v1, v2))
}

fn variance_ratio_c2() -> Result<Report> {
    let mut r = Report::new(vec!["c1", "c2", "var_ratio"]);
    for c1 in [-1.0, 1.0, 3.0] {
        let v = variance(c1)?;
        for c2 in steps(-10.0, 10.0, 0.1) {
            r.push(row![c1, c2, pair_variances(c1, c2, FRAC_PI_4)?.0 / v]);
        }
    }
    Ok(r)
}

fn variance_vs_theta() -> Result<Report> {
    let mut r = Report::new(vec!["theta", "var_x1", "var_x2"]);
    for theta in linspace(0.0, FRAC_PI_2, 91) {
        let (v1, v2) = pair_variances(-1.0, -5.0, theta)?;
        r.push(row![theta, v1, v2]);
    }
    Ok(r)
}

fn nu4(c1: f64, c2: f64, theta: f64) -> Result<f64> {
    let p = AnharmonicPair::new(c1, c2, theta)?;
    let v = reduced_moment_binomial(2, &p)?;
    Ok(reduced_moment_binomial(4, &p)? / (v * v) - 3.0)
}

fn kurtosis_vs_c2() -> Result<Report> {
    let mut r = Report::new(vec![
        "theta",
        "c1",
        "c2",
        "nu4",
        "nu4_scaled",
        "nu4_y1",
        "nu4_y2",
    ]);
    for theta in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
        for c1 in [-5.0, -1.0, 1.0, 5.0] {
            let c2s = steps(-10.0, 10.0, 0.1);
            let curve: Vec<f64> = c2s
                .iter()
                .map(|&c2| nu4(c1, c2, theta))
                .collect::<Result<_>>()?;
            let peak = curve.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let y1 = excess_moment(4, c1)?;
            for (&c2, &v) in c2s.iter().zip(&curve) {
                r.push(row![theta, c1, c2, v, v / peak, y1, excess_moment(4, c2)?]);
            }
        }
    }
    Ok(r)
}

fn kurtosis_vs_theta() -> Result<Report> {
    let mut r = Report::new(vec!["c1", "c2", "theta", "nu4", "nu4_y1", "nu4_y2"]);
    for (c1, c2) in [(-1.0, -5.0), (1.0, -5.0), (5.0, -1.0), (-5.0, 5.0)] {
        let (y1, y2) = (excess_moment(4, c1)?, excess_moment(4, c2)?);
        for theta in linspace(0.0, FRAC_PI_2, 91) {
            r.push(row![c1, c2, theta, nu4(c1, c2, theta)?, y1, y2]);
        }
    }
    Ok(r)
}

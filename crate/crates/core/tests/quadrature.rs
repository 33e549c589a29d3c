use std::f64::consts::PI;

use sextic::quadrature::*;

/// (integral, exact) pairs with elementary closed forms.
fn battery() -> Vec<(Integral, f64)> {
    let mut out = Vec::new();
    // ∫ x^{2k} e^{−x²} dx = (2k−1)!! √π / 2^k; the polynomial factor lies
    // outside any quartic envelope, so the range is given explicitly
    let mut exact = PI.sqrt();
    for k in 0..10 {
        let f = Integrand1D::new(
            move |x: f64| x.powi(2 * k) * (-x * x).exp(),
            Domain::Interval(-30.0, 30.0),
        )
        .rel_tol(1e-10);
        out.push((integrate_1d(&f).unwrap(), exact));
        exact *= (2 * k + 1) as f64 / 2.0;
    }
    // ∫₀^∞ x^{s−1} e^{−x} dx = (s−1)!
    let mut fact = 1.0;
    for s in 1..=10 {
        let f = Integrand1D::new(
            move |x: f64| x.powi(s - 1) * (-x).exp(),
            Domain::Interval(0.0, 80.0),
        )
        .rel_tol(1e-10);
        out.push((integrate_1d(&f).unwrap(), fact));
        fact *= s as f64;
    }
    out
}

#[test]
fn error_estimates_bound_true_errors() {
    let b = battery();
    assert_eq!(b.len(), 20);
    let covered = b
        .iter()
        .filter(|(r, exact)| {
            (r.value - exact).abs() <= r.error_estimate.max(4.0 * f64::EPSILON * exact)
        })
        .count();
    assert!(covered >= 19, "{covered}/20");
    for (r, exact) in &b {
        assert!(((r.value - exact) / exact).abs() < 1e-9);
    }
}

#[test]
fn simpson_grid_converges_at_fourth_order() {
    // separable kernel f(x)f(x′) with f = e^x cos x on [−1, 1]; nothing decays
    // at the window edge, so the composite rule shows its algebraic order
    let f = |x: f64| x.exp() * x.cos();
    let k = move |x: f64, y: f64| f(x) * f(y);
    // ∫f² = ∫e^{2x}cos²x, ∫x²f² by the same antiderivative family
    let ef2 = |x: f64| (x * 2.0).exp() * (2.0 + (2.0 * x).sin() + (2.0 * x).cos()) / 8.0;
    let trace_exact = ef2(1.0) - ef2(-1.0);
    let errs: Vec<(f64, f64)> = [33, 65, 129, 257]
        .iter()
        .map(|&n| {
            let g = GridKernel::sample(&k, 1.0, n).unwrap();
            (
                (g.trace() - trace_exact).abs(),
                (g.purity() - trace_exact * trace_exact).abs(),
            )
        })
        .collect();
    for w in errs.windows(2) {
        let (t, p) = ((w[0].0 / w[1].0).log2(), (w[0].1 / w[1].1).log2());
        assert!(t >= 3.5 && p >= 3.5, "orders {t} {p}");
    }
}

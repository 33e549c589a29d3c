use sextic::qes::{
    classify_well, excess_moment, excess_moment_prefactor_form, ground_psi, ln_norm_a,
    moment_ratio, moment_report, norm_a, potential, potential_extrema, potential_unscaled,
    raw_moment, raw_moment_quadrature, rescale, unscale_moment, variance, MomentSource,
    SexticParams, WellClass, SQRT3,
};
use sextic::quadrature::{integrate_1d, Domain, Integrand1D, QuarticEnvelope};
use sextic::specfun::{double_factorial_f64, gamma};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const C_GRID: [f64; 11] = [
    -20.0, -10.0, -5.0, -SQRT3, -1.0, 0.0, 1.0, SQRT3, 5.0, 10.0, 20.0,
];

#[test]
fn rescaling_examples() {
    assert_eq!(
        rescale(&SexticParams::new(1.0, 5.0).unwrap()).unwrap().c,
        5.0
    );
    assert_eq!(
        rescale(&SexticParams::new(4.0, -10.0).unwrap()).unwrap().c,
        -5.0
    );
    assert_eq!(unscale_moment(3.0, 2, 4.0).unwrap(), 1.5);
    assert!(SexticParams::new(0.0, 1.0).is_err());
    assert!(unscale_moment(1.0, 2, -1.0).is_err());
}

#[test]
fn unscaled_potential_is_the_rescaled_one() {
    for (a, b) in [(4.0, -10.0), (0.3, 1.2), (2.0, 0.0)] {
        let p = SexticParams::new(a, b).unwrap();
        let c = b / a.sqrt();
        for yt in [-1.3, 0.0, 0.4, 2.0] {
            let lhs = potential_unscaled(yt, &p) / a.sqrt();
            let rhs = potential(a.powf(0.25) * yt, c);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }
}

#[test]
fn extrema_counts_per_well_class() {
    assert_eq!(potential_extrema(5.0).len(), 1);
    assert_eq!(potential_extrema(-1.0).len(), 3);
    assert_eq!(potential_extrema(-5.0).len(), 5);
    assert_eq!(classify_well(5.0), WellClass::SingleWell);
    assert_eq!(classify_well(-1.0), WellClass::DoubleWell);
    assert_eq!(classify_well(-5.0), WellClass::TripleWell);
    for c in [-30.0, -3.0, -1.7, 0.0, 1.0, 1.8, 40.0] {
        assert_eq!(
            potential_extrema(c).len(),
            classify_well(c).extrema(),
            "c={c}"
        );
    }
}

#[test]
fn c_zero_normalization() {
    let want = 2f64.powf(0.375) / gamma(0.25).unwrap().sqrt();
    assert!(rel(norm_a(0.0).unwrap(), want) < 1e-15);
    // ∫ e^{-y^4/2} dy = A(0)^{-2}
    let env = QuarticEnvelope::new(0.5, 0.0, 0.0);
    let r = integrate_1d(&Integrand1D::new(
        |y: f64| (-0.5 * y.powi(4)).exp(),
        Domain::WholeLine(env),
    ))
    .unwrap();
    assert!(rel(r.value, want.powi(-2)) < 1e-12);
}

#[test]
fn ground_state_is_normalized() {
    for c in [-10.0, -1.0, 0.0, 1.0, 10.0] {
        let r = raw_moment_quadrature(0, c, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "c={c}: {}", r.value);
    }
}

#[test]
fn ground_state_is_even() {
    for c in [-3.0, 0.5] {
        for y in [0.3, 1.7] {
            assert_eq!(ground_psi(y, c).unwrap(), ground_psi(-y, c).unwrap());
        }
    }
}

#[test]
fn normalization_stays_finite_in_logs() {
    for c in [-100.0, 100.0] {
        assert!(ln_norm_a(c).unwrap().is_finite());
    }
}

#[test]
fn variance_reference_values() {
    let v0 = std::f64::consts::SQRT_2 * gamma(0.75).unwrap() / gamma(0.25).unwrap();
    assert!(rel(variance(0.0).unwrap(), v0) < 1e-14);
    assert!(rel(variance(-1.0).unwrap(), 0.893_464_969_574_237_2) < 1e-10);
    assert!(rel(variance(1.0).unwrap(), 0.289_602_386_319_239_96) < 1e-10);
    assert!(variance(-10.0).unwrap() > 100.0 * variance(10.0).unwrap());
}

#[test]
fn closed_form_moments_match_quadrature() {
    for c in C_GRID {
        for order in (2..=16).step_by(2) {
            let exact = raw_moment(order, c).unwrap();
            let quad = raw_moment_quadrature(order, c, 1e-12).unwrap().value;
            assert!(
                rel(exact, quad) < 1e-8,
                "c={c} order={order}: {exact} vs {quad}"
            );
        }
        assert_eq!(raw_moment(0, c).unwrap(), 1.0);
    }
}

#[test]
fn odd_moments_vanish_under_quadrature() {
    for c in [-5.0, 0.0, 3.0] {
        for k in 0..=5 {
            let q = raw_moment_quadrature(2 * k + 1, c, 1e-12).unwrap();
            assert!(q.value.abs() < 1e-12, "c={c}, order {}", 2 * k + 1);
        }
    }
}

#[test]
fn branches_are_continuous_at_zero() {
    for order in [2, 4, 8, 16] {
        let mid = raw_moment(order, 0.0).unwrap();
        for c in [-1e-6, 1e-6] {
            assert!(
                rel(raw_moment(order, c).unwrap(), mid) < 1e-5,
                "order {order}, c={c}"
            );
        }
    }
}

#[test]
fn prefactor_form_matches_moment_ratio_route() {
    for c in C_GRID {
        for order in (4..=16).step_by(2) {
            let a = excess_moment(order, c).unwrap();
            let b = excess_moment_prefactor_form(order, c).unwrap();
            assert!(
                (a - b).abs() <= 1e-8 * a.abs().max(1e-3),
                "c={c} order={order}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn large_positive_c_excess_moments() {
    // 40-digit values of the closed form at c = 50
    let want = [
        (4, -0.001_196_414_330_834_414),
        (6, -0.017_931_926_486_603_49),
        (8, -0.250_797_310_059_146_4),
    ];
    for (order, w) in want {
        let got = excess_moment(order, 50.0).unwrap();
        assert!((got - w).abs() < 1e-9, "order {order}: {got} vs {w}");
    }
    for order in [4, 6] {
        assert!(excess_moment(order, 50.0).unwrap().abs() < 2e-2);
    }
}

#[test]
fn large_negative_c_excess_moments() {
    for order in (4..=8).step_by(2) {
        let want = 1.0 - double_factorial_f64(order as i64 - 1);
        let got = excess_moment(order, -50.0).unwrap();
        assert!(rel(got, want) < 1e-3, "order {order}: {got} vs {want}");
    }
    assert!(rel(excess_moment(4, -50.0).unwrap(), -1.999_599_759_679_303) < 1e-10);
}

#[test]
fn ratios_approach_odd_integers_for_negative_c() {
    for c in [-10.0, -2.0] {
        for n in [6, 7] {
            let r = moment_ratio(n, c).unwrap();
            let target = (2 * n + 1) as f64;
            assert!(rel(r, target) < 0.05, "c={c} n={n}: {r}");
        }
    }
}

#[test]
fn higher_excess_moments_are_larger_for_positive_c() {
    for c in [0.5, 2.0, 10.0] {
        for n in 2..=7 {
            let lo = excess_moment(2 * n, c).unwrap();
            let hi = excess_moment(2 * n + 2, c).unwrap();
            if lo > 0.0 && hi > 0.0 {
                assert!(hi / lo > 1.0);
            }
        }
    }
}

#[test]
fn report_is_internally_consistent() {
    let r = moment_report(-5.0, &[2, 4, 6, 8, 10, 12, 14, 16], MomentSource::Analytic).unwrap();
    for (i, &o) in r.orders.iter().enumerate().skip(1) {
        let n = (o / 2) as i32;
        let want = r.raw[i] / r.variance.powi(n) - double_factorial_f64(o as i64 - 1);
        assert_eq!(r.excess[i], want);
    }
    assert!(r.ratios[0].is_nan());
    assert_eq!(r.ratios[1], r.excess[2] / r.excess[1]);
    let oracle = moment_report(-5.0, &[2, 4, 6], MomentSource::Oracle).unwrap();
    assert!(rel(oracle.excess[1], r.excess[1]) < 1e-8);
}

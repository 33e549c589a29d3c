//! Kummer ₁F₁ and Tricomi U for real arguments.

use super::gamma::{gamma, ln_gamma};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, Domain, Integrand1D};

/// Term limit for the ₁F₁ series.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Subdivision limit for the U integral.
pub const MAX_U_SUBDIVISIONS: usize = 10_000;

/// Above this argument ₁F₁ switches to its large-argument expansion.
const ASYMPTOTIC_MIN: f64 = 50.0;

fn nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// M(a, b, z) = ₁F₁(a; b; z).
///
/// Negative arguments go through Kummer's transform except close to zero,
/// where the alternating series is still accurate.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    check_b(b)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    if nonpositive_integer(a) {
        return Ok(polynomial(a, b, z));
    }
    if z > 0.0 {
        let (m, l) = m_scaled_parts(a, b, z)?;
        return Ok(m * (l + z).exp());
    }
    if z >= -5.0 {
        return series(a, b, z);
    }
    // M(a,b,z) = e^z M(b-a,b,-z)
    if nonpositive_integer(b - a) {
        return Ok(z.exp() * polynomial(b - a, b, -z));
    }
    m_scaled(b - a, b, -z)
}

/// e^{-z} M(a, b, z), finite for large positive z where M itself overflows.
pub fn kummer_1f1_scaled(a: f64, b: f64, z: f64) -> Result<f64> {
    check_b(b)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    if nonpositive_integer(a) {
        return Ok((-z).exp() * polynomial(a, b, z));
    }
    if z > 0.0 {
        return m_scaled(a, b, z);
    }
    Ok((-z).exp() * kummer_1f1(a, b, z)?)
}

fn check_b(b: f64) -> Result<()> {
    if nonpositive_integer(b) || !b.is_finite() {
        return Err(Error::domain(format!("1F1 undefined for b = {b}")));
    }
    Ok(())
}

/// Finite sum when a is a non-positive integer.
fn polynomial(a: f64, b: f64, z: f64) -> f64 {
    let n = (-a) as usize;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
    }
    sum
}

/// Plain ascending series.
fn series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut big = 1.0f64;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        big = big.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs() && kf > z.abs() {
            return Ok(sum);
        }
    }
    Err(
        Error::accuracy("1F1 series term limit", (term / sum).abs(), 1e-17)
            .within(&format!("1F1({a}, {b}, {z}), largest term {big:e}")),
    )
}

/// e^{-x} M(a, b, x) for x > 0 with a not a non-positive integer.
/// Returned as (mantissa, log_scale) so the caller multiplies by exp(log_scale).
fn m_scaled_parts(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    if x <= ASYMPTOTIC_MIN {
        let s = series(a, b, x)?;
        return Ok((s, -x));
    }
    if let Some(v) = asymptotic(a, b, x)? {
        return Ok((v, 0.0));
    }
    rescaled_series(a, b, x)
}

fn m_scaled(a: f64, b: f64, x: f64) -> Result<f64> {
    let (m, l) = m_scaled_parts(a, b, x)?;
    Ok(m * l.exp())
}

/// e^{-x}M ~ Γ(b)/Γ(a) x^{a-b} Σ (b-a)_k (1-a)_k / (k! x^k); the companion
/// term is e^{-x} times smaller and dropped. None when the series cannot
/// reach full precision before its terms start growing.
fn asymptotic(a: f64, b: f64, x: f64) -> Result<Option<f64>> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 0..500 {
        let kf = k as f64;
        term *= (b - a + kf) * (1.0 - a + kf) / ((kf + 1.0) * x);
        if term == 0.0 {
            converged = true;
            break;
        }
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last <= 1e-17 * sum.abs() {
            converged = true;
            break;
        }
    }
    if !converged && last > 1e-15 * sum.abs() {
        return Ok(None);
    }
    let ln_pre = if a > 0.0 && b > 0.0 {
        ln_gamma(b)? - ln_gamma(a)? + (a - b) * x.ln()
    } else {
        let r = gamma(b)? / gamma(a)?;
        if r == 0.0 {
            return Ok(None);
        }
        return Ok(Some(r * x.powf(a - b) * sum));
    };
    Ok(Some(ln_pre.exp() * sum))
}

/// Ascending series accumulated with periodic rescaling so that e^x never
/// has to be represented.
fn rescaled_series(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    let mut log_scale = 0.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * x / (kf + 1.0);
        sum += term;
        if sum.abs() > 1e280 {
            term *= 1e-280;
            sum *= 1e-280;
            log_scale += 280.0 * std::f64::consts::LN_10;
        }
        if term.abs() <= 1e-17 * sum.abs() && kf > x {
            return Ok((sum, log_scale - x));
        }
    }
    Err(Error::accuracy(
        "1F1 rescaled series term limit",
        (term / sum).abs(),
        1e-17,
    ))
}

/// Tricomi U(a, b, z) for a > 0, z > 0 from
/// U = z^{-a}/Γ(a) ∫₀^∞ e^{-s} s^{a-1} (1 + s/z)^{b-a-1} ds.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    let (m, l) = tricomi_u_parts(a, b, z)?;
    Ok(m * l.exp())
}

/// ln U(a, b, z); stays finite where U under- or overflows.
pub fn ln_tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    let (m, l) = tricomi_u_parts(a, b, z)?;
    Ok(m.ln() + l)
}

fn tricomi_u_parts(a: f64, b: f64, z: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("tricomi_u needs a > 0, got {a}")));
    }
    if !(z > 0.0) || !z.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("tricomi_u needs z > 0, got {z}")));
    }
    let p = b - a - 1.0;
    let ctx = format!("U({a}, {b}, {z})");
    // [0, 1] in u = ln s: the s^{a-1} endpoint behaviour becomes an
    // exponential and the bend at s = z a smooth step
    let lz = z.ln().min(0.0);
    let lo = lz - 47.0 / a;
    let mut cuts = vec![lz];
    if lz < 0.0 {
        cuts.push(0.5 * lz);
    }
    let head = Integrand1D::new(
        move |u: f64| {
            let s = u.exp();
            (a * u - s + p * (s / z).ln_1p()).exp()
        },
        Domain::Interval(lo, 0.0),
    )
    .rel_tol(1e-13)
    .breakpoints(cuts)
    .max_subdivisions(MAX_U_SUBDIVISIONS);
    let head = integrate_1d(&head).map_err(|e| e.within(&ctx))?;
    let upper = tail_cutoff(a, p, z);
    let tail = Integrand1D::new(
        move |s: f64| ((a - 1.0) * s.ln() - s + p * (s / z).ln_1p()).exp(),
        Domain::Interval(1.0, upper),
    )
    .rel_tol(1e-13)
    .initial_pieces(32)
    .max_subdivisions(MAX_U_SUBDIVISIONS);
    let tail = integrate_1d(&tail).map_err(|e| e.within(&ctx))?;
    let total = head.value + tail.value;
    Ok((total, -a * z.ln() - ln_gamma(a)?))
}

/// Point beyond which the tail integrand is below 1e-20 of its maximum on [1, ∞).
fn tail_cutoff(a: f64, p: f64, z: f64) -> f64 {
    let g = |s: f64| (a - 1.0) * s.ln() - s + p * (s / z).ln_1p();
    let mut peak = g(1.0);
    let mut s = 1.0;
    while s < 1e4 {
        peak = peak.max(g(s));
        s += 0.25;
        if s > a + 2.0 && g(s) < peak - 47.0 {
            break;
        }
    }
    s
}

/// U(a, b, z) from the connection formula in terms of M, for non-integer b
/// and moderate z; the cross-check for the integral route.
pub fn tricomi_u_connection(a: f64, b: f64, z: f64) -> Result<f64> {
    if b == b.round() {
        return Err(Error::Capability(format!(
            "connection formula needs non-integer b, got {b}"
        )));
    }
    let t1 = if nonpositive_integer(a - b + 1.0) {
        0.0
    } else {
        gamma(1.0 - b)? / gamma(a - b + 1.0)? * kummer_1f1(a, b, z)?
    };
    let t2 = gamma(b - 1.0)? / gamma(a)? * z.powf(1.0 - b) * kummer_1f1(a - b + 1.0, 2.0 - b, z)?;
    Ok(t1 + t2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn elementary_closed_forms() {
        assert_eq!(kummer_1f1(0.3, 1.7, 0.0).unwrap(), 1.0);
        let z = 1.0f64;
        assert!(rel(kummer_1f1(1.0, 2.0, z).unwrap(), (z.exp() - 1.0) / z) < 1e-15);
        // M(a, a, z) = e^z
        for z in [-30.0, -3.0, 2.0, 40.0, 80.0] {
            assert!(
                rel(kummer_1f1(0.75, 0.75, z).unwrap(), f64::exp(z)) < 1e-13,
                "z={z}"
            );
        }
    }

    #[test]
    fn terminating_series() {
        // M(-2, b, z) = 1 - 2z/b + z^2/(b(b+1))
        let (b, z) = (0.5, 3.0);
        let want = 1.0 - 2.0 * z / b + z * z / (b * (b + 1.0));
        assert!(rel(kummer_1f1(-2.0, b, z).unwrap(), want) < 1e-15);
    }

    #[test]
    fn bad_b_is_domain_error() {
        assert!(matches!(kummer_1f1(1.0, -2.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(tricomi_u(-1.0, 0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(tricomi_u(1.0, 0.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn branch_switch_is_continuous() {
        let lo = kummer_1f1_scaled(4.25, 0.5, ASYMPTOTIC_MIN).unwrap();
        let hi = kummer_1f1_scaled(4.25, 0.5, ASYMPTOTIC_MIN * (1.0 + 1e-13)).unwrap();
        assert!(rel(lo, hi) < 1e-11);
    }

    #[test]
    fn u_small_argument_limit() {
        // U(a, 1/2, z) -> Γ(1/2)/Γ(a + 1/2) as z -> 0
        for a in [0.25, 0.75, 8.25] {
            let want = gamma(0.5).unwrap() / gamma(a + 0.5).unwrap();
            let got = tricomi_u(a, 0.5, 5e-13).unwrap();
            assert!(rel(got, want) < 1e-5, "a={a}: {got} vs {want}");
        }
    }

    #[test]
    fn u_exponential_special_case() {
        // U(a, a+1, z) = z^{-a}
        for (a, z) in [(0.75, 0.3), (2.5, 4.0), (0.25, 100.0)] {
            assert!(rel(tricomi_u(a, a + 1.0, z).unwrap(), z.powf(-a)) < 1e-12);
        }
    }
}

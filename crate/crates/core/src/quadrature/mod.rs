//! Adaptive quadrature on finite intervals and on the whole line for
//! integrands with a quartic-exponential envelope, plus Simpson-grid kernels.

mod gk;
mod grid;

use std::cell::RefCell;

use serde::Serialize;

pub use gk::kronrod_rule;
pub(crate) use gk::neumaier;
pub use grid::{
    default_window, discretize_even_kernel, discretize_kernel, simpson_grid, DensityKernel,
    GridKernel, KernelFn, DEFAULT_GRID_NODES,
};

use crate::error::{Error, Result};

/// ln of the envelope ratio at which whole-line integrands are cut (1e-18).
pub const TRUNCATION_LOG: f64 = 41.446_531_673_892_82;

/// Default subdivision budget.
pub const MAX_SUBDIVISIONS: usize = 10_000;

/// Smallest accepted relative tolerance.
pub const MIN_REL_TOL: f64 = 1e-13;

/// Declared envelope exp(p ln|y| - q4 y^4 - q2 y^2 + q1 y) of a whole-line integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticEnvelope {
    pub quartic: f64,
    pub quadratic: f64,
    pub linear: f64,
    /// exponent of an optional |y|^p prefactor
    pub power: f64,
}

impl QuarticEnvelope {
    pub fn new(quartic: f64, quadratic: f64, linear: f64) -> Self {
        QuarticEnvelope {
            quartic,
            quadratic,
            linear,
            power: 0.0,
        }
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    /// Log of the envelope at y.
    pub fn log_at(&self, y: f64) -> f64 {
        let y2 = y * y;
        let poly = -self.quartic * y2 * y2 - self.quadratic * y2 + self.linear * y;
        if self.power != 0.0 {
            if y == 0.0 {
                return f64::NEG_INFINITY;
            }
            poly + self.power * y.abs().ln()
        } else {
            poly
        }
    }

    /// Peak of the log envelope and the interval outside which it has fallen
    /// more than `drop` below the peak.
    pub fn support(&self, drop: f64) -> Result<EnvelopeSupport> {
        if !(self.quartic > 0.0) {
            return Err(Error::domain(
                "whole-line envelope needs a positive quartic coefficient",
            ));
        }
        // crude bound on where the quartic dominates
        let q4 = self.quartic;
        let mut r = 1.0
            + (self.quadratic.abs() / q4).sqrt()
            + (self.linear.abs() / q4).cbrt()
            + (self.power.abs() / q4).powf(0.25);
        let n = 4000;
        let (peak, peak_at) = loop {
            let mut best = f64::NEG_INFINITY;
            let mut best_y = 0.0;
            for i in 0..=n {
                let y = -r + 2.0 * r * i as f64 / n as f64;
                let v = self.log_at(y);
                if v > best {
                    best = v;
                    best_y = y;
                }
            }
            let thresh = best - drop;
            if self.log_at(r) < thresh && self.log_at(-r) < thresh {
                break (best, best_y);
            }
            r *= 2.0;
        };
        let h = 2.0 * r / n as f64;
        // polish the peak by golden search around the best grid point
        let peak = golden_max(|y| self.log_at(y), peak_at - h, peak_at + h).max(peak);
        let thresh = peak - drop;
        let mut lo = -r;
        let mut hi = r;
        for i in 0..=n {
            let y = -r + h * i as f64;
            if self.log_at(y) >= thresh {
                lo = bisect(|t| self.log_at(t) - thresh, (y - h).max(-r), y);
                break;
            }
        }
        for i in (0..=n).rev() {
            let y = -r + h * i as f64;
            if self.log_at(y) >= thresh {
                hi = bisect(|t| self.log_at(t) - thresh, y, (y + h).min(r));
                break;
            }
        }
        Ok(EnvelopeSupport {
            lo,
            hi,
            log_peak: peak,
        })
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..80 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(0.5 * (a + b))
}

/// Root of g on [a, b] given a sign change (or the nearest endpoint otherwise).
fn bisect<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    if ga * g(b) > 0.0 {
        return if ga.abs() < g(b).abs() { a } else { b };
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Support interval and log-peak of a declared envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSupport {
    pub lo: f64,
    pub hi: f64,
    pub log_peak: f64,
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Domain {
    Interval(f64, f64),
    /// The whole real line, truncated where the envelope drops below 1e-18 of its peak.
    WholeLine(QuarticEnvelope),
}

/// A one-dimensional integrand with its domain and accuracy request.
pub struct Integrand1D<F> {
    pub f: F,
    pub domain: Domain,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// absolute target as a multiple of ∫|f|, for integrals that cancel to zero
    pub modulus_tol: f64,
    pub breakpoints: Vec<f64>,
    pub initial_pieces: usize,
    pub max_subdivisions: usize,
}

impl<F: Fn(f64) -> f64> Integrand1D<F> {
    pub fn new(f: F, domain: Domain) -> Self {
        Integrand1D {
            f,
            domain,
            rel_tol: 1e-12,
            abs_tol: 0.0,
            modulus_tol: 0.0,
            breakpoints: Vec::new(),
            initial_pieces: 16,
            max_subdivisions: MAX_SUBDIVISIONS,
        }
    }

    pub fn rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn modulus_tol(mut self, tol: f64) -> Self {
        self.modulus_tol = tol;
        self
    }

    pub fn breakpoints(mut self, pts: Vec<f64>) -> Self {
        self.breakpoints = pts;
        self
    }

    pub fn initial_pieces(mut self, n: usize) -> Self {
        self.initial_pieces = n.max(1);
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn bounds(&self) -> Result<(f64, f64, Option<f64>)> {
        match self.domain {
            Domain::Interval(a, b) => {
                if !(a.is_finite() && b.is_finite()) || b < a {
                    return Err(Error::domain(format!("bad interval [{a}, {b}]")));
                }
                Ok((a, b, None))
            }
            Domain::WholeLine(env) => {
                let s = env.support(TRUNCATION_LOG)?;
                Ok((s.lo, s.hi, Some(s.lo.abs().max(s.hi.abs()))))
            }
        }
    }

    fn cuts(&self, a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
        let n = self.initial_pieces;
        let mut cuts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        cuts[n] = b;
        cuts.extend(self.breakpoints.iter().copied().filter(|&p| p > a && p < b));
        cuts.extend(extra.iter().copied().filter(|&p| p > a && p < b));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }
}

/// Result of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    /// ∫|f| over the integrated range
    pub abs_integral: f64,
    /// truncation radius for whole-line domains
    pub y_max: Option<f64>,
    pub subdivisions: usize,
}

/// Adaptive Gauss–Kronrod integration meeting max(rel_tol |I|, abs_tol).
pub fn integrate_1d<F: Fn(f64) -> f64>(f: &Integrand1D<F>) -> Result<Integral> {
    if f.rel_tol < MIN_REL_TOL && f.abs_tol <= 0.0 && f.modulus_tol <= 0.0 {
        return Err(Error::domain(format!(
            "relative tolerance {} below {MIN_REL_TOL}",
            f.rel_tol
        )));
    }
    let (a, b, y_max) = f.bounds()?;
    let cuts = f.cuts(a, b, &[]);
    let out = gk::adaptive(
        &f.f,
        &cuts,
        gk::Stop {
            rel: f.rel_tol,
            abs: f.abs_tol,
            abs_of_modulus: f.modulus_tol,
        },
        f.max_subdivisions,
    )?;
    Ok(Integral {
        value: out.value,
        error_estimate: out.error,
        abs_integral: out.abs_value,
        y_max,
        subdivisions: out.segments,
    })
}

/// Relative floor on the absolute error of oscillatory integrals, in units of ∫|f|.
pub const OSCILLATORY_ABS_FACTOR: f64 = 1e-14;

/// Integration of an oscillatory integrand whose sign pattern repeats with
/// the given half-period (measured from y = 0). The domain is first cut at
/// every half-period so that cancellation happens between whole lobes; the
/// target is an absolute error of 1e-14 ∫|f| (or the requested relative
/// tolerance, whichever is looser).
///
/// A non-finite half-period means no oscillation and reduces to `integrate_1d`.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: &Integrand1D<F>,
    half_period: f64,
) -> Result<Integral> {
    if !half_period.is_finite() {
        return integrate_1d(f);
    }
    if !(half_period > 0.0) {
        return Err(Error::domain(format!(
            "half period must be positive, got {half_period}"
        )));
    }
    let (a, b, y_max) = f.bounds()?;
    let k0 = (a / half_period).ceil() as i64;
    let k1 = (b / half_period).floor() as i64;
    if k1 - k0 > 200_000 {
        return Err(Error::Capability(format!(
            "{} half-periods in the integration range",
            k1 - k0
        )));
    }
    let lobes: Vec<f64> = (k0..=k1).map(|k| k as f64 * half_period).collect();
    let cuts = f.cuts(a, b, &lobes);
    let out = gk::adaptive(
        &f.f,
        &cuts,
        gk::Stop {
            rel: f.rel_tol,
            abs: f.abs_tol,
            abs_of_modulus: OSCILLATORY_ABS_FACTOR.max(f.modulus_tol),
        },
        f.max_subdivisions.max(cuts.len() * 4),
    )?;
    Ok(Integral {
        value: out.value,
        error_estimate: out.error,
        abs_integral: out.abs_value,
        y_max,
        subdivisions: out.segments,
    })
}

/// A two-dimensional integrand on a product domain.
pub struct Integrand2D<F> {
    pub f: F,
    pub x_domain: Domain,
    pub y_domain: Domain,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_pieces: usize,
}

impl<F: Fn(f64, f64) -> f64> Integrand2D<F> {
    pub fn new(f: F, x_domain: Domain, y_domain: Domain) -> Self {
        Integrand2D {
            f,
            x_domain,
            y_domain,
            rel_tol: 1e-11,
            abs_tol: 0.0,
            initial_pieces: 32,
        }
    }

    pub fn rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn initial_pieces(mut self, n: usize) -> Self {
        self.initial_pieces = n.max(1);
        self
    }
}

/// Tensor-product adaptive integration: an adaptive outer integral over x
/// of adaptive inner integrals over y.
///
/// The inner tolerance is a tenth of the outer one; the reported error adds
/// the outer estimate to the integrated inner estimates.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: &Integrand2D<F>) -> Result<Integral> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err = RefCell::new(0.0f64);
    let inner_abs_tol = 0.1 * f.abs_tol;
    let outer_fn = |x: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let inner = Integrand1D::new(|y: f64| (f.f)(x, y), f.y_domain)
            .rel_tol((0.1 * f.rel_tol).max(MIN_REL_TOL))
            .abs_tol(inner_abs_tol)
            .initial_pieces(f.initial_pieces);
        match integrate_1d(&inner) {
            Ok(r) => {
                let mut e = inner_err.borrow_mut();
                *e = e.max(r.error_estimate);
                r.value
            }
            Err(err) => {
                *failure.borrow_mut() = Some(err.within("inner integral"));
                0.0
            }
        }
    };
    let outer = Integrand1D::new(outer_fn, f.x_domain)
        .rel_tol(f.rel_tol)
        .abs_tol(f.abs_tol)
        .initial_pieces(f.initial_pieces);
    let res = integrate_1d(&outer);
    let (xa, xb, _) = outer.bounds()?;
    drop(outer);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let res = res?;
    let inner = inner_err.into_inner();
    Ok(Integral {
        error_estimate: res.error_estimate + inner * (xb - xa),
        ..res
    })
}

//! Husimi Q-functions of pure and mixed states, the G_c integral, and zero
//! scans of G_c along the imaginary axis.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qes::ln_norm_a;
use crate::quadrature::{integrate_oscillatory, Domain, GridKernel, Integrand1D, QuarticEnvelope};

/// Coherent amplitude α = alpha1 + i alpha2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl PhasePoint {
    pub fn new(alpha1: f64, alpha2: f64) -> Self {
        PhasePoint { alpha1, alpha2 }
    }

    /// α on the imaginary axis.
    pub fn imaginary(alpha2: f64) -> Self {
        PhasePoint {
            alpha1: 0.0,
            alpha2,
        }
    }
}

/// G_c with its dominant exponential pulled out: G = scaled × exp(log_scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcValue {
    pub re: f64,
    pub im: f64,
    pub log_scale: f64,
    /// quadrature error estimate on the scaled value
    pub error_estimate: f64,
}

impl GcValue {
    pub fn scaled(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// The unscaled value; overflows for c below about −40.
    pub fn value(&self) -> Complex64 {
        self.scaled() * self.log_scale.exp()
    }

    /// ln|G|², finite even where G itself is not representable.
    pub fn ln_norm_sqr(&self) -> f64 {
        self.scaled().norm_sqr().ln() + 2.0 * self.log_scale
    }
}

/// Tolerance used for G_c quadratures.
pub const GC_REL_TOL: f64 = 1e-12;

/// G_c(α) = ∫ exp[−y⁴/4 − (c+1)y²/2 + √2 α₁ y] e^{i√2 α₂ y} dy, scaled by the
/// peak of its envelope.
pub fn gc_scaled(p: PhasePoint, c: f64) -> Result<GcValue> {
    if !(p.alpha1.is_finite() && p.alpha2.is_finite() && c.is_finite()) {
        return Err(Error::domain("G_c needs finite arguments"));
    }
    let env = QuarticEnvelope::new(0.25, 0.5 * (c + 1.0), SQRT_2 * p.alpha1);
    let peak = env.support(0.0)?.log_peak;
    let k = SQRT_2 * p.alpha2;
    let half_period = if k == 0.0 {
        f64::INFINITY
    } else {
        PI / k.abs()
    };
    let weight = move |y: f64| (env.log_at(y) - peak).exp();
    let re = integrate_oscillatory(
        &Integrand1D::new(
            move |y: f64| weight(y) * (k * y).cos(),
            Domain::WholeLine(env),
        )
        .rel_tol(GC_REL_TOL)
        .initial_pieces(32),
        half_period,
    )
    .map_err(|e| e.within("G_c real part"))?;
    // the imaginary part is odd in y when α₁ = 0
    let (im, im_err) = if p.alpha1 == 0.0 || k == 0.0 {
        (0.0, 0.0)
    } else {
        let r = integrate_oscillatory(
            &Integrand1D::new(
                move |y: f64| weight(y) * (k * y).sin(),
                Domain::WholeLine(env),
            )
            .rel_tol(GC_REL_TOL)
            .initial_pieces(32),
            half_period,
        )
        .map_err(|e| e.within("G_c imaginary part"))?;
        (r.value, r.error_estimate)
    };
    Ok(GcValue {
        re: re.value,
        im,
        log_scale: peak,
        error_estimate: re.error_estimate + im_err,
    })
}

/// G_c(α) as a complex number.
pub fn gc(p: PhasePoint, c: f64) -> Result<Complex64> {
    Ok(gc_scaled(p, c)?.value())
}

/// Q(α) = A(c)² π^{-3/2} e^{−2α₁²} |G_c(α)|² for the ground state.
pub fn q_pure(p: PhasePoint, c: f64) -> Result<f64> {
    let g = gc_scaled(p, c)?;
    let ln_a = ln_norm_a(c)?;
    let ln_q = 2.0 * ln_a - 1.5 * PI.ln() - 2.0 * p.alpha1 * p.alpha1 + g.ln_norm_sqr();
    Ok(ln_q.exp())
}

/// Q(α) = (1/π) ⟨α|ρ|α⟩ for a kernel on a Simpson grid.
pub fn q_mixed(p: PhasePoint, rho: &GridKernel) -> Result<f64> {
    let l = rho.half_width();
    let x0 = SQRT_2 * p.alpha1;
    let k = SQRT_2 * p.alpha2;
    if x0.abs() > l {
        return Err(Error::Window(format!(
            "coherent state centred at {x0} lies outside the grid window ±{l}"
        )));
    }
    if k.abs() * rho.spacing() > 1.0 {
        return Err(Error::Window(format!(
            "grid spacing {} cannot resolve the coherent phase at alpha2 = {}",
            rho.spacing(),
            p.alpha2
        )));
    }
    let n = rho.len();
    let norm = PI.powf(-0.25);
    let mut vc = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for i in 0..n {
        let x = rho.nodes[i];
        let g = rho.weights[i] * norm * (-0.5 * (x - x0) * (x - x0)).exp();
        vc.push(g * (k * x).cos());
        vs.push(g * (k * x).sin());
    }
    // Re[v† ρ v] = cᵀρc + sᵀρs for a real kernel
    let mut acc = 0.0;
    for i in 0..n {
        let mut rc = 0.0;
        let mut rs = 0.0;
        for j in 0..n {
            let r = rho.values[(i, j)];
            rc += r * vc[j];
            rs += r * vs[j];
        }
        acc += vc[i] * rc + vs[i] * rs;
    }
    Ok(acc / PI)
}

/// Default initial step of the zero scan.
pub const DEFAULT_SCAN_STEP: f64 = 0.01;

/// Halvings allowed before a scan gives up.
pub const MAX_SCAN_HALVINGS: usize = 6;

/// Bisection width for refined zeros.
pub const ZERO_TOLERANCE: f64 = 1e-8;

/// Location and size of the largest |G_c| seen on the scan grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcMaximum {
    pub alpha2: f64,
    pub abs_value: f64,
    pub ln_abs_value: f64,
}

/// Zeros of Re G_c(iα₂) on [0, α₂_max].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QScanReport {
    pub c: f64,
    pub window: (f64, f64),
    pub zeros: Vec<f64>,
    pub count: usize,
    /// zeros per unit α₂ over [α₂_max/2, α₂_max]
    pub density_estimate: f64,
    pub max_abs_gc: GcMaximum,
    /// step of the final (stable) scan
    pub step: f64,
    pub halvings: usize,
    /// (α₂, Re G / G(0)) on the final scan grid
    pub profile: Vec<(f64, f64)>,
}

struct Pass {
    samples: Vec<(f64, f64)>,
    brackets: Vec<(f64, f64)>,
}

fn re_gc_scaled(alpha2: f64, c: f64, log_ref: f64) -> Result<f64> {
    let g = gc_scaled(PhasePoint::imaginary(alpha2), c)?;
    Ok(g.re * (g.log_scale - log_ref).exp())
}

fn scan_pass(c: f64, alpha2_max: f64, step: f64, log_ref: f64) -> Result<Pass> {
    let n = (alpha2_max / step).ceil() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let a = (i as f64 * step).min(alpha2_max);
        samples.push((a, re_gc_scaled(a, c, log_ref)?));
    }
    let brackets = samples
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0 || (w[1].1 == 0.0 && w[0].1 != 0.0))
        .map(|w| (w[0].0, w[1].0))
        .collect();
    Ok(Pass { samples, brackets })
}

/// Sample Re G_c(iα₂), bracket sign changes, and halve the step until the
/// zero count repeats; each zero is then refined by bisection.
pub fn scan_zeros(c: f64, alpha2_max: f64, initial_step: f64) -> Result<QScanReport> {
    if !(alpha2_max > 0.0) || !(initial_step > 0.0) {
        return Err(Error::domain("scan window and step must be positive"));
    }
    let g0 = gc_scaled(PhasePoint::imaginary(0.0), c)?;
    let log_ref = g0.log_scale;
    let mut step = initial_step;
    let mut prev = scan_pass(c, alpha2_max, step, log_ref)?;
    let mut halvings = 0;
    let current = loop {
        if halvings == MAX_SCAN_HALVINGS {
            let cur = scan_pass(c, alpha2_max, step / 2.0, log_ref)?;
            return Err(Error::Resolution {
                halvings,
                previous: prev.brackets.len(),
                current: cur.brackets.len(),
            });
        }
        step /= 2.0;
        halvings += 1;
        let cur = scan_pass(c, alpha2_max, step, log_ref)?;
        if cur.brackets.len() == prev.brackets.len() {
            break cur;
        }
        prev = cur;
    };
    let mut zeros = Vec::with_capacity(current.brackets.len());
    for &(mut lo, mut hi) in &current.brackets {
        let mut flo = re_gc_scaled(lo, c, log_ref)?;
        while hi - lo > ZERO_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            let fm = re_gc_scaled(mid, c, log_ref)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        zeros.push(0.5 * (lo + hi));
    }
    let g0_scaled = g0.re;
    let (mut best_a, mut best_v) = (0.0, f64::NEG_INFINITY);
    for &(a, v) in &current.samples {
        if v.abs() > best_v {
            best_v = v.abs();
            best_a = a;
        }
    }
    let half = 0.5 * alpha2_max;
    let trailing = zeros.iter().filter(|&&z| z >= half).count();
    Ok(QScanReport {
        c,
        window: (0.0, alpha2_max),
        count: zeros.len(),
        density_estimate: trailing as f64 / half,
        max_abs_gc: GcMaximum {
            alpha2: best_a,
            abs_value: best_v * log_ref.exp(),
            ln_abs_value: best_v.ln() + log_ref,
        },
        step,
        halvings,
        profile: current
            .samples
            .iter()
            .map(|&(a, v)| (a, v / g0_scaled))
            .collect(),
        zeros,
    })
}

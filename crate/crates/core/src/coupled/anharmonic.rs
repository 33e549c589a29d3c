//! Pairs of sextic oscillators mixed by a rotation, and their reduced states.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qes::{raw_moment, variance, GroundState, C_ZERO_BAND};
use crate::quadrature::{
    integrate_2d, kronrod_rule, DensityKernel, Domain, GridKernel, Integrand2D, KernelFn,
    DEFAULT_GRID_NODES, TRUNCATION_LOG,
};
use crate::specfun::{bessel_k_scaled, double_factorial_f64, gamma, scaled_i_quarter_pair};

/// Two ground-state sextic oscillators (c₁, c₂) mixed by angle θ, with a
/// shared sextic strength a so that both rescale with the same a^{1/4}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnharmonicPair {
    pub c1: f64,
    pub c2: f64,
    pub theta: f64,
    pub common_a: f64,
}

impl AnharmonicPair {
    pub fn new(c1: f64, c2: f64, theta: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::domain("c values must be finite"));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::domain(format!(
                "mixing angle must lie in [0, π/2], got {theta}"
            )));
        }
        Ok(AnharmonicPair {
            c1,
            c2,
            theta,
            common_a: 1.0,
        })
    }

    pub fn identical_pi4(c: f64) -> Result<Self> {
        Self::new(c, c, FRAC_PI_4)
    }

    pub fn with_common_a(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain("sextic strength must be positive"));
        }
        self.common_a = a;
        Ok(self)
    }

    pub fn is_identical(&self) -> bool {
        self.c1 == self.c2
    }

    pub fn is_identical_pi4(&self) -> bool {
        self.is_identical() && (self.theta - FRAC_PI_4).abs() < 1e-15
    }
}

/// ln ψ₀(x₁, x₂) in rescaled coordinates.
pub fn ln_joint_psi0(x1: f64, x2: f64, p: &AnharmonicPair) -> Result<f64> {
    let g1 = GroundState::new(p.c1)?;
    if p.is_identical_pi4() {
        let (a, b) = (x1 * x1, x2 * x2);
        return Ok(2.0 * g1.ln_a - 0.5 * p.c1 * (a + b) - (a * a + 6.0 * a * b + b * b) / 8.0);
    }
    let g2 = GroundState::new(p.c2)?;
    let (s, c) = p.theta.sin_cos();
    Ok(g1.ln_psi(c * x1 - s * x2) + g2.ln_psi(s * x1 + c * x2))
}

pub fn joint_psi0(x1: f64, x2: f64, p: &AnharmonicPair) -> Result<f64> {
    Ok(ln_joint_psi0(x1, x2, p)?.exp())
}

/// f at u = 0, where both Bessel branches meet.
pub fn f_boundary() -> f64 {
    SQRT_2 * gamma(0.25).expect("Γ(1/4)")
}

/// ln f(u) with z = u²/32: √u e^{z}K_{1/4}(z) for u > 0 and
/// π√(−u/2) e^{z}(I_{−1/4} + I_{1/4})(z) for u < 0.
pub fn ln_f(u: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::domain("u must be finite"));
    }
    if u == 0.0 {
        return Ok(f_boundary().ln());
    }
    let z = u * u / 32.0;
    if u > 0.0 {
        Ok(0.5 * u.ln() + bessel_k_scaled(0.25, z)?.scaled_value.ln())
    } else {
        Ok((PI * (-0.5 * u).sqrt()).ln() + 2.0 * z + scaled_i_quarter_pair(z)?.ln())
    }
}

/// ln of the closed-form reduced kernel of an identical pair at θ = π/4.
pub fn ln_reduced_identical_pi4(x: f64, xp: f64, c: f64) -> Result<f64> {
    ln_pi4_entry(x, xp, c, 4.0 * GroundState::new(c)?.ln_a)
}

fn ln_pi4_entry(x: f64, xp: f64, c: f64, ln_a4: f64) -> Result<f64> {
    let s = x * x + xp * xp;
    let u = 4.0 * c + 3.0 * s;
    Ok(-std::f64::consts::LN_2 + ln_a4 - 0.5 * c * s - (x.powi(4) + xp.powi(4)) / 8.0 + ln_f(u)?)
}

pub fn reduced_identical_pi4(x: f64, xp: f64, c: f64) -> Result<f64> {
    Ok(ln_reduced_identical_pi4(x, xp, c)?.exp())
}

/// Grid settings for reduced kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    /// half-width; chosen from the parent densities when absent
    pub half_width: Option<f64>,
    pub nodes: usize,
    /// per-entry absolute target of the x₂ quadrature, relative to the kernel peak
    pub x2_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: None,
            nodes: DEFAULT_GRID_NODES,
            x2_tol: 1e-10,
        }
    }
}

fn density_reach(c: f64, drop: f64) -> Result<f64> {
    let s = GroundState::new(c)?.density_envelope(0.0).support(drop)?;
    Ok(s.hi.max(-s.lo))
}

/// Half-width covering both parent densities down to 1e-12 of their peaks;
/// a rotation never moves a point further than √(R₁² + R₂²).
pub fn default_pair_window(p: &AnharmonicPair) -> Result<f64> {
    let drop = 1e12f64.ln();
    let (r1, r2) = (density_reach(p.c1, drop)?, density_reach(p.c2, drop)?);
    Ok(r1.hypot(r2))
}

fn window(p: &AnharmonicPair, cfg: &GridConfig) -> Result<f64> {
    match cfg.half_width {
        Some(l) if l > 0.0 => Ok(l),
        Some(l) => Err(Error::domain(format!(
            "window half-width must be positive, got {l}"
        ))),
        None => default_pair_window(p),
    }
}

/// Closed-form identical-π/4 kernel sampled on a grid.
pub fn identical_pi4_kernel(c: f64, cfg: &GridConfig) -> Result<DensityKernel> {
    let p = AnharmonicPair::identical_pi4(c)?;
    let l = window(&p, cfg)?;
    // fail early on a bad c rather than inside the sampler
    let ln_a4 = 4.0 * GroundState::new(c)?.ln_a;
    ln_pi4_entry(0.0, 0.0, c, ln_a4)?;
    let k: KernelFn =
        Arc::new(move |x, xp| ln_pi4_entry(x, xp, c, ln_a4).map_or(f64::NAN, f64::exp));
    DensityKernel::from_analytic_even(k, l, cfg.nodes)
}

const MAX_PANELS: usize = 8192;

/// ρ(x₁, x₁′) = ∫ψ₀(x₁, x₂)ψ₀(x₁′, x₂)dx₂ on the Simpson grid, with the x₂
/// integral done on shared Gauss–Kronrod panels so that the whole matrix is
/// one product ΨWΨᵀ. Panels double until the embedded Gauss estimate meets
/// the per-entry target. Values carry the analytic normalization A₁A₂, so
/// the grid trace differs from 1 only by discretization error.
pub fn reduced_numeric(p: &AnharmonicPair, cfg: &GridConfig) -> Result<GridKernel> {
    let l = window(p, cfg)?;
    let (nodes, weights) = crate::quadrature::simpson_grid(l, cfg.nodes)?;
    let r = {
        let drop = TRUNCATION_LOG;
        density_reach(p.c1, drop)?.hypot(density_reach(p.c2, drop)?)
    };
    let rule = kronrod_rule();
    let g1 = GroundState::new(p.c1)?;
    let g2 = GroundState::new(p.c2)?;
    let (s, c) = p.theta.sin_cos();
    let ln_psi = |x1: f64, x2: f64| g1.ln_psi(c * x1 - s * x2) + g2.ln_psi(s * x1 + c * x2);
    let n = nodes.len();
    let mut panels = 64;
    loop {
        let h = 2.0 * r / panels as f64;
        let m = panels * rule.len();
        let mut psi = DMatrix::zeros(n, m);
        let mut wk = Vec::with_capacity(m);
        let mut wg = Vec::with_capacity(m);
        let mut ts = Vec::with_capacity(m);
        for k in 0..panels {
            let mid = -r + (k as f64 + 0.5) * h;
            for &(x, w_k, w_g) in &rule {
                ts.push(mid + 0.5 * h * x);
                wk.push(0.5 * h * w_k);
                wg.push(0.5 * h * w_g);
            }
        }
        for i in 0..n {
            for (k, &t) in ts.iter().enumerate() {
                psi[(i, k)] = ln_psi(nodes[i], t).exp();
            }
        }
        let scaled = |w: &[f64]| {
            let mut a = psi.clone();
            for (k, wv) in w.iter().enumerate() {
                a.column_mut(k).scale_mut(*wv);
            }
            a
        };
        let rho_k = &scaled(&wk) * psi.transpose();
        let rho_g = &scaled(&wg) * psi.transpose();
        let peak = rho_k.amax();
        let err = (&rho_k - &rho_g).amax();
        if err <= cfg.x2_tol * peak {
            let mut kernel = GridKernel::from_values(nodes, weights, rho_k)?;
            kernel.error_estimate = err;
            return Ok(kernel);
        }
        if panels >= MAX_PANELS {
            return Err(Error::accuracy("x₂ trace-out", err / peak, cfg.x2_tol));
        }
        panels *= 2;
    }
}

/// Σ w_i w_j ρ_ij ρ_ji.
pub fn purity(rho: &GridKernel) -> f64 {
    rho.purity()
}

fn pair_box(p: &AnharmonicPair) -> Result<f64> {
    Ok(density_reach(p.c1, TRUNCATION_LOG)?.hypot(density_reach(p.c2, TRUNCATION_LOG)?))
}

/// ⟨x₁^order⟩ by 2D quadrature of x₁^order ψ₀² in the coupled frame.
pub fn reduced_moment(order: u32, p: &AnharmonicPair) -> Result<f64> {
    reduced_moment_of(order, p, false)
}

/// ⟨x₂^order⟩, the same integral for the other oscillator.
pub fn reduced_moment_x2(order: u32, p: &AnharmonicPair) -> Result<f64> {
    reduced_moment_of(order, p, true)
}

const MAX_REDUCED_ORDER: u32 = 16;

fn reduced_moment_of(order: u32, p: &AnharmonicPair, second: bool) -> Result<f64> {
    if !order.is_multiple_of(2) || order > MAX_REDUCED_ORDER {
        return Err(Error::domain(format!(
            "reduced moments need an even order <= {MAX_REDUCED_ORDER}, got {order}"
        )));
    }
    let r = pair_box(p)?;
    let g1 = GroundState::new(p.c1)?;
    let g2 = GroundState::new(p.c2)?;
    let (s, c) = p.theta.sin_cos();
    let k = order as i32;
    let f = move |x1: f64, x2: f64| {
        let w = 2.0 * (g1.ln_psi(c * x1 - s * x2) + g2.ln_psi(s * x1 + c * x2));
        let v = if second { x2 } else { x1 };
        v.powi(k) * w.exp()
    };
    let out = integrate_2d(
        &Integrand2D::new(f, Domain::Interval(-r, r), Domain::Interval(-r, r)).rel_tol(1e-11),
    )
    .map_err(|e| e.within("reduced moment"))?;
    Ok(out.value)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// ⟨x₁^order⟩ from x₁ = cos θ y₁ + sin θ y₂ and the single-oscillator
/// moments: Σ_k C(2n, 2k) cos^{2k}θ sin^{2n−2k}θ μ_{2k}(c₁) μ_{2n−2k}(c₂).
pub fn reduced_moment_binomial(order: u32, p: &AnharmonicPair) -> Result<f64> {
    if !order.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "moment order must be even, got {order}"
        )));
    }
    let (s, c) = p.theta.sin_cos();
    let mut acc = 0.0;
    for k in (0..=order).step_by(2) {
        let m1 = if k == 0 { 1.0 } else { raw_moment(k, p.c1)? };
        let m2 = if k == order {
            1.0
        } else {
            raw_moment(order - k, p.c2)?
        };
        acc += binomial(order, k) * c.powi(k as i32) * s.powi((order - k) as i32) * m1 * m2;
    }
    Ok(acc)
}

/// ν_{2n}(x₁) = μ_{2n}/μ₂ⁿ − (2n−1)!! from the 2D quadrature moments.
pub fn reduced_excess_moment(order: u32, p: &AnharmonicPair) -> Result<f64> {
    if order < 4 {
        return Err(Error::domain(format!(
            "excess moments start at order 4, got {order}"
        )));
    }
    let m = reduced_moment(order, p)?;
    let v = reduced_moment(2, p)?;
    Ok(m / v.powi(order as i32 / 2) - double_factorial_f64(order as i64 - 1))
}

/// |V₂ − V₁| w + min{V₁, V₂}, the piecewise form used for both variances
/// and higher raw moments.
fn piecewise(m1: f64, m2: f64, w: f64) -> f64 {
    (m2 - m1).abs() * w + m1.min(m2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceRelation {
    pub var_x1: f64,
    pub var_x2: f64,
    pub var_y1: f64,
    pub var_y2: f64,
    /// |Var(x₁) + Var(x₂) − Var(y₁) − Var(y₂)|
    pub sum_check: f64,
    pub prediction: (f64, f64),
    /// relative deviation of the piecewise prediction from the exact values
    pub deviation: (f64, f64),
}

pub fn variance_relation(p: &AnharmonicPair) -> Result<VarianceRelation> {
    let var_x1 = reduced_moment(2, p)?;
    let var_x2 = reduced_moment_x2(2, p)?;
    let (var_y1, var_y2) = (variance(p.c1)?, variance(p.c2)?);
    let (s, c) = p.theta.sin_cos();
    let prediction = (
        piecewise(var_y1, var_y2, s * s),
        piecewise(var_y1, var_y2, c * c),
    );
    Ok(VarianceRelation {
        var_x1,
        var_x2,
        var_y1,
        var_y2,
        sum_check: (var_x1 + var_x2 - var_y1 - var_y2).abs(),
        prediction,
        deviation: (
            (prediction.0 - var_x1).abs() / var_x1,
            (prediction.1 - var_x2).abs() / var_x2,
        ),
    })
}

/// Separation |c₁ − c₂| below which the piecewise moment forms are flagged.
pub const NONID_VALIDITY_GAP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxMoments {
    pub order: u32,
    pub mu_x1: f64,
    pub mu_x2: f64,
    pub nu_x1: f64,
    pub nu_x2: f64,
    /// set when c₁ and c₂ are too close for the approximation
    pub degraded: bool,
}

/// Piecewise approximations to the raw and excess moments of x₁ and x₂
/// built from single-oscillator moments.
pub fn approx_moments_nonid(order: u32, p: &AnharmonicPair) -> Result<ApproxMoments> {
    if order < 4 || !order.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "approximate moments need even order >= 4, got {order}"
        )));
    }
    let (m1, m2) = (raw_moment(order, p.c1)?, raw_moment(order, p.c2)?);
    let (v1, v2) = (variance(p.c1)?, variance(p.c2)?);
    let (s, c) = p.theta.sin_cos();
    let (w1, w2) = (s * s, c * c);
    let n = order as i32 / 2;
    let gauss = double_factorial_f64(order as i64 - 1);
    let mu_x1 = piecewise(m1, m2, w1);
    let mu_x2 = piecewise(m1, m2, w2);
    Ok(ApproxMoments {
        order,
        mu_x1,
        mu_x2,
        nu_x1: mu_x1 / piecewise(v1, v2, w1).powi(n) - gauss,
        nu_x2: mu_x2 / piecewise(v1, v2, w2).powi(n) - gauss,
        degraded: (p.c1 - p.c2).abs() < NONID_VALIDITY_GAP,
    })
}

/// True when u = 4c + 3(x² + x′²) changes sign somewhere on the window.
pub fn crosses_boundary(c: f64, half_width: f64) -> bool {
    c < -C_ZERO_BAND && 4.0 * c + 6.0 * half_width * half_width > 0.0
}

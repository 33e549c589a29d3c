//! Bilinearly coupled harmonic oscillators.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{default_window, DensityKernel, KernelFn, DEFAULT_GRID_NODES};

/// Decoupled-frame (y) coordinates of a coupled-frame (x) point.
pub fn to_decoupled(x1: f64, x2: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c * x1 - s * x2, s * x1 + c * x2)
}

/// Coupled-frame (x) coordinates of a decoupled-frame (y) point.
pub fn to_coupled(y1: f64, y2: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c * y1 + s * y2, -s * y1 + c * y2)
}

fn check_angle(theta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!(
            "mixing angle must lie in [0, π/2], got {theta}"
        )));
    }
    Ok(())
}

/// Two oscillators of frequencies ω′₁, ω′₂ mixed by angle θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicPair {
    pub omega1p: f64,
    pub omega2p: f64,
    pub theta: f64,
}

impl HarmonicPair {
    pub fn new(omega1p: f64, omega2p: f64, theta: f64) -> Result<Self> {
        if !(omega1p > 0.0 && omega2p > 0.0) || !omega1p.is_finite() || !omega2p.is_finite() {
            return Err(Error::domain("decoupled frequencies must be positive"));
        }
        check_angle(theta)?;
        Ok(HarmonicPair {
            omega1p,
            omega2p,
            theta,
        })
    }

    /// The pair behind the coupled-frame potential ½(ω₁²x₁² + ω₂²x₂² + λx₁x₂),
    /// with θ taken in [0, π/2]. Needs |λ| < 2ω₁ω₂.
    pub fn from_coupling(k: &HarmonicCoupling) -> Result<Self> {
        let (w1, w2, l) = (k.omega1_sq, k.omega2_sq, k.lambda);
        if !(w1 > 0.0 && w2 > 0.0) || !l.is_finite() || l * l >= 4.0 * w1 * w2 {
            return Err(Error::domain(format!(
                "coupling needs positive ω₁², ω₂² and |λ| < 2ω₁ω₂, got ({w1}, {w2}, {l})"
            )));
        }
        // (ω′₂² − ω′₁²)(cos 2θ, sin 2θ) = (ω₂² − ω₁², λ)
        let r = (w2 - w1).hypot(l);
        let (gap, two_theta) = if l >= 0.0 {
            (r, l.atan2(w2 - w1))
        } else {
            (-r, (-l).atan2(w1 - w2))
        };
        let sum = w1 + w2;
        Self::new(
            (0.5 * (sum - gap)).sqrt(),
            (0.5 * (sum + gap)).sqrt(),
            (0.5 * two_theta).clamp(0.0, std::f64::consts::FRAC_PI_2),
        )
    }
}

/// Coupled-frame potential ½(ω₁²x₁² + ω₂²x₂² + λx₁x₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicCoupling {
    pub omega1_sq: f64,
    pub omega2_sq: f64,
    pub lambda: f64,
}

pub fn harmonic_coupled_coeffs(p: &HarmonicPair) -> Result<HarmonicCoupling> {
    let (s, c) = p.theta.sin_cos();
    let (a, b) = (p.omega1p * p.omega1p, p.omega2p * p.omega2p);
    let out = HarmonicCoupling {
        omega1_sq: a * c * c + b * s * s,
        omega2_sq: a * s * s + b * c * c,
        lambda: 2.0 * c * s * (b - a),
    };
    let bound = 2.0 * (out.omega1_sq * out.omega2_sq).sqrt();
    if out.lambda.abs() > bound * (1.0 + 1e-12) {
        return Err(Error::Integrity(format!(
            "coupling {} exceeds 2ω₁ω₂ = {bound}",
            out.lambda
        )));
    }
    Ok(out)
}

/// Parameters of the reduced Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicReducedParams {
    pub tau1: f64,
    pub tau2: f64,
    /// infinite when the pair does not mix
    pub g: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl HarmonicReducedParams {
    /// τ₁²τ₂²/g², kept finite when g is infinite.
    pub fn mixing(&self) -> f64 {
        let r = self.tau1 * self.tau2 / self.g;
        r * r
    }

    /// ⟨x₁²⟩ = τ₁²/(1 − τ₁²τ₂²/g²) = 1/(2(γ − β)).
    pub fn variance(&self) -> f64 {
        self.tau1 * self.tau1 / (1.0 - self.mixing())
    }

    /// √(1 − τ₁²τ₂²/g²).
    pub fn purity(&self) -> f64 {
        (1.0 - self.mixing()).sqrt()
    }

    /// ρ(x, x′) = √((γ−β)/π) exp[−γ(x² + x′²)/2 + βxx′].
    pub fn kernel(&self, x: f64, xp: f64) -> f64 {
        let (g, b) = (self.gamma, self.beta);
        ((g - b) / PI).sqrt() * (-0.5 * g * (x * x + xp * xp) + b * x * xp).exp()
    }
}

pub fn harmonic_reduced_params(p: &HarmonicPair) -> Result<HarmonicReducedParams> {
    let (s, c) = p.theta.sin_cos();
    let inv_2tau1_sq = p.omega1p * c * c + p.omega2p * s * s;
    let inv_2tau2_sq = p.omega2p * c * c + p.omega1p * s * s;
    let inv_2g = (p.omega2p - p.omega1p) * s * c;
    let tau1 = (0.5 / inv_2tau1_sq).sqrt();
    let tau2 = (0.5 / inv_2tau2_sq).sqrt();
    let g = if inv_2g == 0.0 {
        f64::INFINITY
    } else {
        0.5 / inv_2g
    };
    // τ₂²/(4g²) with 1/g = 2 inv_2g
    let beta = tau2 * tau2 * inv_2g * inv_2g;
    let gamma = inv_2tau1_sq - beta;
    if !(gamma > beta.abs()) {
        return Err(Error::Integrity(format!(
            "reduced kernel not normalizable: gamma = {gamma}, beta = {beta}"
        )));
    }
    Ok(HarmonicReducedParams {
        tau1,
        tau2,
        g,
        gamma,
        beta,
    })
}

/// Closed-form reduced state together with its grid discretization.
#[derive(Debug, Clone)]
pub struct HarmonicReduced {
    pub params: HarmonicReducedParams,
    pub kernel: DensityKernel,
    pub variance: f64,
    pub purity: f64,
}

/// Reduced state of x₁; the kernel is sampled on [−L, L] with L from the
/// default window rule unless given.
pub fn harmonic_reduced(
    p: &HarmonicPair,
    half_width: Option<f64>,
    nodes: Option<usize>,
) -> Result<HarmonicReduced> {
    let params = harmonic_reduced_params(p)?;
    let variance = params.variance();
    let l = match half_width {
        Some(l) => l,
        None => default_window(variance, |x| params.kernel(x, x))?,
    };
    let k: KernelFn = Arc::new(move |x, xp| params.kernel(x, xp));
    let kernel = DensityKernel::from_analytic(k, l, nodes.unwrap_or(DEFAULT_GRID_NODES))?;
    Ok(HarmonicReduced {
        params,
        kernel,
        variance,
        purity: params.purity(),
    })
}

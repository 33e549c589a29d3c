//! The single sextic oscillator: potentials, well classes, the exact ground
//! state and its even moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, Domain, Integral, Integrand1D, QuarticEnvelope};
use crate::specfun::{
    double_factorial_f64, exp_k_quarter, gamma, kummer_1f1_scaled, ln_gamma, ln_tricomi_u,
    scaled_i_quarter_pair,
};

/// √3, the boundary between well classes.
pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// |c| below this uses the c = 0 closed forms.
pub const C_ZERO_BAND: f64 = 1e-12;

/// Highest even moment order served by the closed forms.
pub const MAX_MOMENT_ORDER: u32 = 32;

/// Parameters (a, b) of the unscaled sextic family, with QES level n and parity k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SexticParams {
    pub a: f64,
    pub b: f64,
    pub n: u32,
    pub k: u8,
}

impl SexticParams {
    /// Ground-state sector n = 0, k = 0.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::with_level(a, b, 0, 0)
    }

    pub fn with_level(a: f64, b: f64, n: u32, k: u8) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!(
                "sextic strength a must be positive, got {a}"
            )));
        }
        if !b.is_finite() {
            return Err(Error::domain("b must be finite"));
        }
        if k > 1 {
            return Err(Error::domain(format!(
                "parity sector k must be 0 or 1, got {k}"
            )));
        }
        Ok(SexticParams { a, b, n, k })
    }

    /// Whether the ground-state closed forms apply.
    pub fn is_ground_sector(&self) -> bool {
        self.n == 0 && self.k == 0
    }
}

/// The rescaled shape parameter c = b/√a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledC {
    pub c: f64,
}

pub fn rescale(p: &SexticParams) -> Result<RescaledC> {
    if !(p.a > 0.0) {
        return Err(Error::domain(format!("a must be positive, got {}", p.a)));
    }
    Ok(RescaledC {
        c: p.b / p.a.sqrt(),
    })
}

/// Convert ⟨y^order⟩ in the rescaled variable to ⟨ỹ^order⟩, using y = a^{1/4} ỹ.
pub fn unscale_moment(moment: f64, order: u32, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("a must be positive, got {a}")));
    }
    Ok(moment * a.powf(-(order as f64) / 4.0))
}

/// y⁶ + 2cy⁴ + (c²−3)y² − c.
pub fn potential(y: f64, c: f64) -> f64 {
    let y2 = y * y;
    ((y2 + 2.0 * c) * y2 + (c * c - 3.0)) * y2 - c
}

/// dV/dy of the rescaled potential.
pub fn potential_derivative(y: f64, c: f64) -> f64 {
    let y2 = y * y;
    2.0 * y * ((3.0 * y2 + 4.0 * c) * y2 + (c * c - 3.0))
}

/// a²ỹ⁶ + 2abỹ⁴ + [b² − a(4n+2k+3)]ỹ² − b(1+2k).
pub fn potential_unscaled(yt: f64, p: &SexticParams) -> f64 {
    let y2 = yt * yt;
    let (a, b) = (p.a, p.b);
    let quad = b * b - a * (4.0 * p.n as f64 + 2.0 * p.k as f64 + 3.0);
    ((a * a * y2 + 2.0 * a * b) * y2 + quad) * y2 - b * (1.0 + 2.0 * p.k as f64)
}

/// Shape class of the rescaled potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WellClass {
    SingleWell,
    DoubleWell,
    TripleWell,
}

impl WellClass {
    /// Number of real extrema of a potential in this class.
    pub fn extrema(self) -> usize {
        match self {
            WellClass::SingleWell => 1,
            WellClass::DoubleWell => 3,
            WellClass::TripleWell => 5,
        }
    }
}

pub fn classify_well(c: f64) -> WellClass {
    if c < -SQRT3 {
        WellClass::TripleWell
    } else if c < SQRT3 {
        WellClass::DoubleWell
    } else {
        WellClass::SingleWell
    }
}

/// Real extrema of the rescaled potential, located from sign changes of V'
/// on a fine grid and refined by bisection.
pub fn potential_extrema(c: f64) -> Vec<f64> {
    let r = (c.abs() + 2.0).sqrt() + 1.0;
    let n = 20_000usize;
    let h = 2.0 * r / n as f64;
    let grid = |i: usize| -r + h * i as f64;
    let d = |y: f64| potential_derivative(y, c);
    let mut out = Vec::new();
    let mut prev = d(grid(0));
    for i in 1..=n {
        let y = grid(i);
        let cur = d(y);
        if cur == 0.0 {
            // a grid point on the root; it counts if the sign flips across it
            let next = d(y + h);
            if prev * next < 0.0 {
                out.push(y);
            }
        } else if prev != 0.0 && prev * cur < 0.0 {
            let (mut lo, mut hi) = (grid(i - 1), y);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if d(mid) * d(lo) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    out
}

/// ln A(c) for the ground state A(c) exp(−y⁴/4 − cy²/2).
pub fn ln_norm_a(c: f64) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::domain("c must be finite"));
    }
    let z = 0.25 * c * c;
    if c.abs() < C_ZERO_BAND {
        Ok(0.375 * std::f64::consts::LN_2 - 0.5 * ln_gamma(0.25)?)
    } else if c > 0.0 {
        Ok(0.25 * (2.0 / c).ln() - 0.5 * exp_k_quarter(z)?.ln())
    } else {
        // e^{z}(I₋ + I₊)(z) = e^{2z} × scaled pair
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        Ok(0.25 * (-4.0 / (pi2 * c)).ln() - 0.5 * (2.0 * z + scaled_i_quarter_pair(z)?.ln()))
    }
}

/// A(c); underflows to 0 below c ≈ −60, where `ln_norm_a` stays usable.
pub fn norm_a(c: f64) -> Result<f64> {
    Ok(ln_norm_a(c)?.exp())
}

/// The normalized ground state at a fixed c, with ln A cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundState {
    pub c: f64,
    pub ln_a: f64,
}

impl GroundState {
    pub fn new(c: f64) -> Result<Self> {
        Ok(GroundState {
            c,
            ln_a: ln_norm_a(c)?,
        })
    }

    /// ln ψ₀(y).
    pub fn ln_psi(&self, y: f64) -> f64 {
        let y2 = y * y;
        self.ln_a - 0.25 * y2 * y2 - 0.5 * self.c * y2
    }

    pub fn psi(&self, y: f64) -> f64 {
        self.ln_psi(y).exp()
    }

    pub fn density(&self, y: f64) -> f64 {
        (2.0 * self.ln_psi(y)).exp()
    }

    /// Envelope of |ψ₀|² times |y|^power.
    pub fn density_envelope(&self, power: f64) -> QuarticEnvelope {
        QuarticEnvelope::new(0.5, self.c, 0.0).with_power(power)
    }
}

/// ψ₀(y; c).
pub fn ground_psi(y: f64, c: f64) -> Result<f64> {
    Ok(GroundState::new(c)?.psi(y))
}

fn check_even_order(order: u32) -> Result<()> {
    if !order.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "moment order must be even, got {order}"
        )));
    }
    if order > MAX_MOMENT_ORDER {
        return Err(Error::Capability(format!(
            "moment order {order} above the supported {MAX_MOMENT_ORDER}"
        )));
    }
    Ok(())
}

/// ⟨y^order⟩ in the ground state. Odd orders vanish by parity.
pub fn raw_moment(order: u32, c: f64) -> Result<f64> {
    if order % 2 == 1 {
        if order > MAX_MOMENT_ORDER {
            return Err(Error::Capability(format!(
                "moment order {order} unsupported"
            )));
        }
        return Ok(0.0);
    }
    Ok(ln_raw_moment(order, c)?.exp())
}

/// ln⟨y^order⟩ for even orders, from the three closed-form branches.
pub fn ln_raw_moment(order: u32, c: f64) -> Result<f64> {
    check_even_order(order)?;
    if !c.is_finite() {
        return Err(Error::domain("c must be finite"));
    }
    if order == 0 {
        return Ok(0.0);
    }
    let n = (order / 2) as f64;
    let ln2 = std::f64::consts::LN_2;
    let ctx = || format!("moment {order} at c = {c}");
    if c.abs() < C_ZERO_BAND {
        return Ok(0.5 * n * ln2 + ln_gamma(0.25 + 0.5 * n)? - ln_gamma(0.25)?);
    }
    let z = 0.25 * c * c;
    let x = 0.5 * c * c;
    if c > 0.0 {
        let lu = ln_tricomi_u(0.25 + 0.5 * n, 0.5, x).map_err(|e| e.within(&ctx()))?;
        let ek = exp_k_quarter(z)?;
        Ok(ln_gamma(0.5 + n)? + lu - (0.5 * n - 0.25) * ln2 - 0.5 * c.ln() - ek.ln())
    } else {
        let p = scaled_hyper_combination(n, c).map_err(|e| e.within(&ctx()))?;
        let pair = scaled_i_quarter_pair(z)?;
        Ok((0.5 * n + 0.25) * ln2 + p.ln()
            - std::f64::consts::PI.ln()
            - 0.5 * (-c).ln()
            - pair.ln())
    }
}

/// e^{-c²/2}[Γ(¼+n/2) M(¼+n/2, ½, c²/2) − √2 c Γ(¾+n/2) M(¾+n/2, 3/2, c²/2)]; both
/// terms are positive for c < 0.
fn scaled_hyper_combination(n: f64, c: f64) -> Result<f64> {
    let x = 0.5 * c * c;
    let a1 = 0.25 + 0.5 * n;
    let a2 = 0.75 + 0.5 * n;
    let m1 = kummer_1f1_scaled(a1, 0.5, x)?;
    let m2 = kummer_1f1_scaled(a2, 1.5, x)?;
    Ok(gamma(a1)? * m1 - std::f64::consts::SQRT_2 * c * gamma(a2)? * m2)
}

/// Var(y) = ⟨y²⟩.
pub fn variance(c: f64) -> Result<f64> {
    raw_moment(2, c)
}

/// ⟨y^order⟩ by direct quadrature of y^order ψ₀², any order.
pub fn raw_moment_quadrature(order: u32, c: f64, rel_tol: f64) -> Result<Integral> {
    let g = GroundState::new(c)?;
    let k = order as i32;
    let f = move |y: f64| {
        if y == 0.0 {
            return if k == 0 { g.density(0.0) } else { 0.0 };
        }
        let mag = (k as f64 * y.abs().ln() + 2.0 * g.ln_psi(y)).exp();
        if k % 2 == 1 && y < 0.0 {
            -mag
        } else {
            mag
        }
    };
    let env = g.density_envelope(order as f64);
    let mut job = Integrand1D::new(f, Domain::WholeLine(env))
        .rel_tol(rel_tol)
        .initial_pieces(64);
    if k % 2 == 1 {
        // the exact value is zero, so only an absolute target makes sense
        job = job.modulus_tol(rel_tol);
    }
    integrate_1d(&job)
}

/// ν = ⟨y^order⟩ / Var^{order/2} − (order−1)!!.
pub fn excess_moment(order: u32, c: f64) -> Result<f64> {
    check_excess_order(order)?;
    let n = (order / 2) as f64;
    let standardized = (ln_raw_moment(order, c)? - n * ln_raw_moment(2, c)?).exp();
    Ok(standardized - double_factorial_f64(order as i64 - 1))
}

fn check_excess_order(order: u32) -> Result<()> {
    if order < 4 {
        return Err(Error::domain(format!(
            "excess moments start at order 4, got {order}"
        )));
    }
    check_even_order(order)
}

/// The same excess moment through the B±(n, c) prefactor form, in which the
/// normalization cancels before any moment is formed.
pub fn excess_moment_prefactor_form(order: u32, c: f64) -> Result<f64> {
    check_excess_order(order)?;
    let n = (order / 2) as f64;
    let ln2 = std::f64::consts::LN_2;
    let dfact = double_factorial_f64(order as i64 - 1);
    let z = 0.25 * c * c;
    let x = 0.5 * c * c;
    let standardized = if c.abs() < C_ZERO_BAND {
        (ln_gamma(0.25 + 0.5 * n)? + (n - 1.0) * ln_gamma(0.25)? - n * ln_gamma(0.75)?).exp()
    } else if c > 0.0 {
        let ln_b = (n - 1.0) * (0.5 * c.ln() + exp_k_quarter(z)?.ln() - 0.25 * ln2);
        let num = ln_gamma(0.5 + n)? + ln_tricomi_u(0.25 + 0.5 * n, 0.5, x)?;
        let den = ln_gamma(1.5)? + ln_tricomi_u(0.75, 0.5, x)?;
        (ln_b + num - n * den).exp()
    } else {
        // the e^{c²/2} growth of each M cancels against e^{c²/4}(I₋+I₊) in B₋
        let pair = scaled_i_quarter_pair(z)?;
        let ln_b =
            (n - 1.0) * (0.5 * (-c).ln() + pair.ln() - 0.25 * ln2 + std::f64::consts::PI.ln());
        let num = scaled_hyper_combination(n, c)?.ln();
        let den = scaled_hyper_combination(1.0, c)?.ln();
        (ln_b + num - n * den).exp()
    };
    Ok(standardized - dfact)
}

/// R_{n+1} = ν_{2(n+1)} / ν_{2n}, for n ≥ 2.
pub fn moment_ratio(n: u32, c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!(
            "moment ratios start at n = 2, got {n}"
        )));
    }
    let lower = excess_moment(2 * n, c)?;
    let upper = excess_moment(2 * n + 2, c)?;
    ratio(upper, lower, n, c)
}

fn ratio(upper: f64, lower: f64, n: u32, c: f64) -> Result<f64> {
    if lower == 0.0 {
        return Err(Error::SingularRatio(format!(
            "ν_{} vanishes at c = {c}",
            2 * n
        )));
    }
    Ok(upper / lower)
}

/// Where a moment report's numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentSource {
    Analytic,
    Oracle,
}

/// Raw, excess and successive-ratio moments at one c.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub c: f64,
    pub orders: Vec<u32>,
    pub raw: Vec<f64>,
    pub variance: f64,
    /// ν for each order (NaN below order 4)
    pub excess: Vec<f64>,
    /// ratios[i] = excess[i+1] / excess[i] for consecutive even orders, NaN otherwise
    pub ratios: Vec<f64>,
    pub source: MomentSource,
}

/// Moments of the ground state at `c` for the given even orders.
pub fn moment_report(c: f64, orders: &[u32], source: MomentSource) -> Result<MomentReport> {
    for &o in orders {
        check_even_order(o)?;
    }
    let moment = |o: u32| -> Result<f64> {
        match source {
            MomentSource::Analytic => raw_moment(o, c),
            MomentSource::Oracle => Ok(raw_moment_quadrature(o, c, 1e-12)?.value),
        }
    };
    let var = moment(2)?;
    let mut raw = Vec::with_capacity(orders.len());
    let mut excess = Vec::with_capacity(orders.len());
    for &o in orders {
        let m = moment(o)?;
        raw.push(m);
        excess.push(if o >= 4 {
            m / var.powi(o as i32 / 2) - double_factorial_f64(o as i64 - 1)
        } else {
            f64::NAN
        });
    }
    let mut ratios = Vec::new();
    for i in 1..orders.len() {
        if orders[i] == orders[i - 1] + 2 && orders[i - 1] >= 4 {
            ratios.push(ratio(excess[i], excess[i - 1], orders[i - 1] / 2, c)?);
        } else {
            ratios.push(f64::NAN);
        }
    }
    Ok(MomentReport {
        c,
        orders: orders.to_vec(),
        raw,
        variance: var,
        excess,
        ratios,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_boundaries_are_half_open() {
        assert_eq!(classify_well(SQRT3), WellClass::SingleWell);
        assert_eq!(classify_well(-SQRT3), WellClass::DoubleWell);
        assert_eq!(classify_well(-SQRT3 - 1e-12), WellClass::TripleWell);
    }

    #[test]
    fn potential_constant_term() {
        for c in [-5.0, 0.0, 2.5] {
            assert_eq!(potential(0.0, c), -c);
        }
    }

    #[test]
    fn odd_orders_vanish() {
        assert_eq!(raw_moment(3, -2.0).unwrap(), 0.0);
    }

    #[test]
    fn orders_beyond_cap_are_rejected() {
        assert!(matches!(raw_moment(34, 1.0), Err(Error::Capability(_))));
        assert!(matches!(excess_moment(2, 1.0), Err(Error::Domain(_))));
        assert!(matches!(moment_ratio(1, 1.0), Err(Error::Domain(_))));
    }
}

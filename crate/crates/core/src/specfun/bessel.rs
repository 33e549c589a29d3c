//! Exponentially scaled modified Bessel functions of small real order.
//!
//! `I` is returned as e^{-z} I_ν(z) and `K` as e^{z} K_ν(z), so both stay
//! O(z^{-1/2}) for large arguments.

use std::f64::consts::PI;

use serde::Serialize;

use super::gamma::{gamma, sin_pi, temme_gammas};
use crate::error::{Error, Result};

/// Largest |ν| accepted by the scaled Bessel routines.
pub const MAX_BESSEL_ORDER: f64 = 8.0;

const EPS: f64 = 1e-17;
const MAX_ITER: usize = 100_000;

/// A Bessel value with its leading exponential removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledBesselValue {
    pub nu: f64,
    pub z: f64,
    /// e^{-log_scale} times the Bessel value.
    pub scaled_value: f64,
    /// The removed exponent: `z` for I, `-z` for K.
    pub log_scale: f64,
}

impl ScaledBesselValue {
    /// The unscaled value; overflows or underflows for large z.
    pub fn value(&self) -> f64 {
        self.scaled_value * self.log_scale.exp()
    }

    /// Natural log of the unscaled value (the value must be positive).
    pub fn ln_value(&self) -> f64 {
        self.scaled_value.ln() + self.log_scale
    }
}

fn check_order(nu: f64) -> Result<()> {
    if !nu.is_finite() || nu.abs() > MAX_BESSEL_ORDER {
        return Err(Error::Capability(format!(
            "Bessel order {nu} outside |nu| <= {MAX_BESSEL_ORDER}"
        )));
    }
    Ok(())
}

fn asymptotic_threshold(nu: f64) -> f64 {
    25.0 + nu * nu
}

/// e^{-z} I_ν(z) for z >= 0.
pub fn bessel_i_scaled(nu: f64, z: f64) -> Result<ScaledBesselValue> {
    check_order(nu)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!(
            "bessel_i_scaled requires finite z >= 0, got {z}"
        )));
    }
    let integer = nu == nu.round();
    let order = if integer { nu.abs() } else { nu };
    let scaled = if z == 0.0 {
        if order == 0.0 {
            1.0
        } else if order > 0.0 {
            0.0
        } else {
            return Err(Error::domain(format!("I_{nu}(0) is infinite")));
        }
    } else if z < asymptotic_threshold(order) {
        i_series(order, z)? * (-z).exp()
    } else {
        i_asymptotic(order, z)?
    };
    Ok(ScaledBesselValue {
        nu,
        z,
        scaled_value: scaled,
        log_scale: z,
    })
}

/// Ascending series; all terms share a sign once k + ν + 1 > 0.
fn i_series(nu: f64, z: f64) -> Result<f64> {
    let h = 0.5 * z;
    let q = h * h;
    let mut term = h.powf(nu) / gamma(nu + 1.0)?;
    let mut sum = term;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= EPS * sum.abs() && kf > h {
            return Ok(sum);
        }
    }
    Err(Error::accuracy("I series", term.abs() / sum.abs(), EPS))
}

/// Hankel expansion; the exponentially small companion term is below
/// double precision whenever this branch is used.
fn i_asymptotic(nu: f64, z: f64) -> Result<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * z);
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last <= 1e-17 * sum.abs() {
            break;
        }
    }
    if last > 1e-15 * sum.abs() {
        return Err(Error::accuracy(
            "I asymptotic series",
            last / sum.abs(),
            1e-15,
        ));
    }
    Ok(sum / (2.0 * PI * z).sqrt())
}

/// e^{z} K_ν(z) for z > 0.
pub fn bessel_k_scaled(nu: f64, z: f64) -> Result<ScaledBesselValue> {
    check_order(nu)?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!(
            "bessel_k_scaled requires finite z > 0, got {z}"
        )));
    }
    let (k_nu, _) = k_scaled_pair(nu.abs(), z)?;
    Ok(ScaledBesselValue {
        nu,
        z,
        scaled_value: k_nu,
        log_scale: -z,
    })
}

/// (e^z K_ν(z), e^z K_{ν+1}(z)) for ν >= 0: Temme series below z = 2,
/// Steed's continued fraction above, then upward recurrence.
fn k_scaled_pair(nu: f64, z: f64) -> Result<(f64, f64)> {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mu2 = mu * mu;
    let xi = 1.0 / z;
    let xi2 = 2.0 * xi;
    let (mut kmu, mut k1) = if z < 2.0 {
        let x2 = 0.5 * z;
        let pimu = PI * mu;
        let fact = if pimu.abs() < 1e-15 {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::accuracy("K Temme series", f64::NAN, EPS));
        }
        let ez = z.exp();
        (sum * ez, sum1 * xi2 * ez)
    } else {
        let mut b = 2.0 * (1.0 + z);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::accuracy("K continued fraction", f64::NAN, EPS));
        }
        let h = a1 * h;
        let kmu = (PI / (2.0 * z)).sqrt() / s;
        let k1 = kmu * (mu + z + 0.5 - h) * xi;
        (kmu, k1)
    };
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    Ok((kmu, k1))
}

/// e^{z} K_{1/4}(z), the normalization factor for c > 0.
pub fn exp_k_quarter(z: f64) -> Result<f64> {
    Ok(bessel_k_scaled(0.25, z)?.scaled_value)
}

/// e^{-z}(I_{-1/4}(z) + I_{1/4}(z)), the normalization factor for c < 0
/// once the two exponentials are pulled out as e^{2z}.
pub fn scaled_i_quarter_pair(z: f64) -> Result<f64> {
    if z <= 0.0 {
        return Err(Error::domain(format!(
            "I_(-1/4) + I_(1/4) needs z > 0, got {z}"
        )));
    }
    let minus = bessel_i_scaled(-0.25, z)?.scaled_value;
    let plus = bessel_i_scaled(0.25, z)?.scaled_value;
    Ok(minus + plus)
}

/// ln[e^{z}(I_{-1/4}(z) + I_{1/4}(z))].
pub fn ln_exp_i_quarter_pair(z: f64) -> Result<f64> {
    Ok(2.0 * z + scaled_i_quarter_pair(z)?.ln())
}

/// e^{-z} I_{-ν}(z) through the reflection formula; used as a cross-check of the
/// direct series for negative orders.
pub fn bessel_i_scaled_reflected(nu: f64, z: f64) -> Result<f64> {
    let i = bessel_i_scaled(nu, z)?.scaled_value;
    let k = bessel_k_scaled(nu, z)?.scaled_value;
    Ok(i + 2.0 / PI * sin_pi(nu) * k * (-2.0 * z).exp())
}

//! Normalized harmonic-oscillator eigenfunctions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest order served by `hermite_normalized`.
pub const HERMITE_MAX_ORDER: usize = 128;

const RESCALE_AT: f64 = 1e150;

/// (ω/π)^{1/4} (2ⁿ n!)^{-1/2} H_n(x√ω) e^{-ωx²/2}.
pub fn hermite_normalized(n: usize, x: f64, omega: f64) -> Result<f64> {
    Ok(hermite_table(n, x, omega)?[n])
}

/// All orders 0..=n_max at one point.
///
/// Uses h_n = √(2/n) t h_{n-1} − √((n−1)/n) h_{n-2} on the normalized
/// polynomials, tracking a separate log scale so that neither 2ⁿn! nor the
/// Gaussian factor is ever formed on its own.
pub fn hermite_table(n_max: usize, x: f64, omega: f64) -> Result<Vec<f64>> {
    if n_max > HERMITE_MAX_ORDER {
        return Err(Error::Capability(format!(
            "Hermite order {n_max} above {HERMITE_MAX_ORDER}"
        )));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "oscillator frequency must be positive, got {omega}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::domain("Hermite function at a non-finite point"));
    }
    let t = x * omega.sqrt();
    let base = 0.25 * (omega / PI).ln() - 0.5 * t * t;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut log_scale = 0.0;
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(base.exp());
    for n in 1..=n_max {
        let nf = n as f64;
        let next = (2.0 / nf).sqrt() * t * cur - ((nf - 1.0) / nf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            prev /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
        let v = if cur == 0.0 {
            0.0
        } else {
            cur.signum() * (cur.abs().ln() + log_scale + base).exp()
        };
        out.push(v);
    }
    Ok(out)
}

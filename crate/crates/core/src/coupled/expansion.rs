//! Coupled-frame polynomial coefficients of two rotated sextic potentials.

use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficient of x₁^i x₂^j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub value: f64,
}

/// (λ_{ij,1}, λ_{ij,2}) = M(p)(α, β) with M = [[p, 1−p], [1−p, p]] and
/// p = cos²θ, where λ_{ij,1} multiplies x₁^i x₂^j and λ_{ij,2} multiplies
/// x₁^j x₂^i (i < j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingPair {
    pub i: u32,
    pub j: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    /// NaN at p = ½, where the system is singular
    pub alpha: f64,
    pub beta: f64,
    /// reconstruction error, or |λ₁ − λ₂| at p = ½
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledCoefficients {
    pub theta: f64,
    /// all monomials with i + j ∈ {2, 4, 6}
    pub terms: Vec<Monomial>,
    /// −B₀ with B₀ = b₁ + b₂
    pub constant: f64,
    pub mixing: Vec<MixingPair>,
}

impl CoupledCoefficients {
    pub fn coefficient(&self, i: u32, j: u32) -> f64 {
        self.terms
            .iter()
            .find(|m| m.i == i && m.j == j)
            .map_or(0.0, |m| m.value)
    }

    pub fn max_mixing_residual(&self) -> f64 {
        self.mixing.iter().fold(0.0f64, |m, p| m.max(p.residual))
    }
}

/// Tolerance of the mixing-structure check.
pub const MIXING_TOL: f64 = 1e-10;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Add coef · (u x₁ + v x₂)^m into `out[i][j]`.
fn add_power(out: &mut [[f64; 7]; 7], coef: f64, u: f64, v: f64, m: u32) {
    for k in 0..=m {
        let i = (m - k) as usize;
        out[i][k as usize] += coef * binomial(m, k) * u.powi(i as i32) * v.powi(k as i32);
    }
}

/// Expand V(ỹ₁; a₁, b₁) + V(ỹ₂; a₂, b₂) with V(y) = a²y⁶ + 2aby⁴ + (b² − 3a)y² − b
/// under ỹ₁ = cos θ x̃₁ − sin θ x̃₂, ỹ₂ = sin θ x̃₁ + cos θ x̃₂.
pub fn expand_coupled_hamiltonian(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    theta: f64,
) -> Result<CoupledCoefficients> {
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::domain("sextic strengths must be positive"));
    }
    if ![b1, b2, theta].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("coefficients must be finite"));
    }
    let (s, c) = theta.sin_cos();
    let mut t = [[0.0; 7]; 7];
    for (a, b, u, v) in [(a1, b1, c, -s), (a2, b2, s, c)] {
        add_power(&mut t, a * a, u, v, 6);
        add_power(&mut t, 2.0 * a * b, u, v, 4);
        add_power(&mut t, b * b - 3.0 * a, u, v, 2);
    }
    let mut terms = Vec::new();
    for deg in [2u32, 4, 6] {
        for j in 0..=deg {
            let i = deg - j;
            terms.push(Monomial {
                i,
                j,
                value: t[i as usize][j as usize],
            });
        }
    }
    let p = c * c;
    let mut mixing = Vec::new();
    for deg in [2u32, 4, 6] {
        for i in 0..deg / 2 {
            let j = deg - i;
            let (l1, l2) = (t[i as usize][j as usize], t[j as usize][i as usize]);
            let det = 2.0 * p - 1.0;
            let scale = l1.abs().max(l2.abs()).max(1.0);
            let (alpha, beta, residual) = if det.abs() < 1e-12 {
                (f64::NAN, f64::NAN, (l1 - l2).abs() / scale)
            } else {
                let alpha = (p * l1 - (1.0 - p) * l2) / det;
                let beta = (p * l2 - (1.0 - p) * l1) / det;
                let r1 = p * alpha + (1.0 - p) * beta - l1;
                let r2 = (1.0 - p) * alpha + p * beta - l2;
                (alpha, beta, r1.abs().max(r2.abs()) / scale)
            };
            mixing.push(MixingPair {
                i,
                j,
                lambda1: l1,
                lambda2: l2,
                alpha,
                beta,
                residual,
            });
        }
    }
    let out = CoupledCoefficients {
        theta,
        terms,
        constant: -(b1 + b2),
        mixing,
    };
    let worst = out.max_mixing_residual();
    if worst > MIXING_TOL {
        return Err(Error::Integrity(format!(
            "mixing structure violated by {worst:e}"
        )));
    }
    Ok(out)
}

//! Number-operator statistics of density kernels and the thermal reading of
//! Gaussian reduced states.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{DensityKernel, GridKernel};
use crate::specfun::{hermite_table, HERMITE_MAX_ORDER};

/// Default highest Fock level.
pub const DEFAULT_N_MAX: usize = 60;

/// Tail mass above which the default n_max is extended to the Hermite cap.
pub const TAIL_TARGET: f64 = 1e-6;

/// Window growths allowed while converging populations.
pub const MAX_WINDOW_GROWTHS: usize = 6;

const WINDOW_GROWTH: f64 = 1.25;
const POPULATION_TOL: f64 = 1e-8;

/// ⟨x²⟩ = 1/(2Ω) solved for Ω.
pub fn omega_from_variance(var: f64) -> Result<f64> {
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::domain(format!(
            "variance must be positive, got {var}"
        )));
    }
    Ok(0.5 / var)
}

/// Populations p_n = ⟨n|ρ|n⟩ in the Fock basis of frequency `omega`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumberStats {
    pub omega: f64,
    pub n_max: usize,
    pub populations: Vec<f64>,
    pub tail_mass: f64,
}

impl NumberStats {
    pub fn mean(&self) -> f64 {
        self.populations
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Largest population at odd n.
    pub fn max_odd(&self) -> f64 {
        self.populations
            .iter()
            .skip(1)
            .step_by(2)
            .fold(0.0f64, |m, p| m.max(p.abs()))
    }

    /// Even n at which p_n is a strict local minimum among even levels, for
    /// levels whose population exceeds `floor`.
    pub fn even_minima(&self, floor: f64) -> Vec<usize> {
        let p = &self.populations;
        (2..=self.n_max.saturating_sub(2))
            .step_by(2)
            .filter(|&n| p[n] > floor && p[n] < p[n - 2] && p[n] < p[n + 2])
            .collect()
    }
}

/// Populations on the kernel's own grid.
pub fn number_populations(rho: &GridKernel, omega: f64, n_max: usize) -> Result<NumberStats> {
    if n_max > HERMITE_MAX_ORDER {
        return Err(Error::Capability(format!(
            "Fock level {n_max} above {HERMITE_MAX_ORDER}"
        )));
    }
    let n = rho.len();
    let m = n_max + 1;
    // columns are w_i φ_k(x_i)
    let mut phi = DMatrix::zeros(n, m);
    for i in 0..n {
        let row = hermite_table(n_max, rho.nodes[i], omega)?;
        for (k, v) in row.into_iter().enumerate() {
            phi[(i, k)] = rho.weights[i] * v;
        }
    }
    let r = &rho.values * &phi;
    let populations: Vec<f64> = (0..m).map(|k| phi.column(k).dot(&r.column(k))).collect();
    let total: f64 = populations.iter().sum();
    Ok(NumberStats {
        omega,
        n_max,
        populations,
        tail_mass: rho.trace() - total,
    })
}

/// Populations of a density kernel with the default conventions: Ω from the
/// kernel's own variance unless given, n_max 60 extended to 128 when the tail
/// mass exceeds 1e-6, and the grid window widened until every population is
/// stable to 1e-8.
pub fn number_statistics(
    kernel: &DensityKernel,
    omega: Option<f64>,
    n_max: Option<usize>,
) -> Result<NumberStats> {
    let grid = &kernel.grid;
    let omega = match omega {
        Some(w) => w,
        None => omega_from_variance(grid.diagonal_moment(2) / grid.trace())?,
    };
    let converged = |n_max: usize| -> Result<NumberStats> {
        let mut stats = number_populations(grid, omega, n_max)?;
        if kernel.analytic.is_none() {
            return Ok(stats);
        }
        let mut l = grid.half_width();
        for _ in 0..MAX_WINDOW_GROWTHS {
            l *= WINDOW_GROWTH;
            let wider = kernel.resample(l, grid.len())?;
            let next = number_populations(&wider.grid, omega, n_max)?;
            let shift = stats
                .populations
                .iter()
                .zip(&next.populations)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            stats = next;
            if shift < POPULATION_TOL {
                return Ok(stats);
            }
        }
        Err(Error::Window(format!(
            "Fock populations not stable after widening the window to ±{l}"
        )))
    };
    match n_max {
        Some(n) => converged(n),
        None => {
            let stats = converged(DEFAULT_N_MAX)?;
            if stats.tail_mass.abs() > TAIL_TARGET {
                converged(HERMITE_MAX_ORDER)
            } else {
                Ok(stats)
            }
        }
    }
}

/// Reading of "√Ω_T/2" in the temperature and mean occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum ThermalConvention {
    /// √(Ω_T/2) = √(γ² − β²), the frequency that diagonalizes the kernel.
    #[default]
    SqrtHalfOmegaT,
    /// (√Ω_T)/2.
    HalfSqrtOmegaT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalCharacterization {
    pub omega_t: f64,
    pub temperature: f64,
    pub mean_n: f64,
    /// Boltzmann ratio ξ = p_{n+1}/p_n implied by the convention.
    pub ratio: f64,
    pub convention: ThermalConvention,
}

/// Thermal parameters of the kernel √((γ−β)/π) exp[−γ(x²+x′²)/2 + βxx′].
pub fn thermal_params(
    gamma: f64,
    beta: f64,
    convention: ThermalConvention,
) -> Result<ThermalCharacterization> {
    if !(gamma > 0.0) || !(beta >= 0.0) || !(beta < gamma) {
        return Err(Error::domain(format!(
            "thermal parameters need 0 <= beta < gamma, got gamma = {gamma}, beta = {beta}"
        )));
    }
    let omega_t = 2.0 * (gamma * gamma - beta * beta);
    let s = match convention {
        ThermalConvention::SqrtHalfOmegaT => (0.5 * omega_t).sqrt(),
        ThermalConvention::HalfSqrtOmegaT => 0.5 * omega_t.sqrt(),
    };
    let ratio = beta / (gamma + s);
    let temperature = if beta == 0.0 {
        0.0
    } else {
        s / ((gamma + s) / beta).ln()
    };
    Ok(ThermalCharacterization {
        omega_t,
        temperature,
        mean_n: beta / (gamma - beta + s),
        ratio,
        convention,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSpectrum {
    /// descending
    pub eigenvalues: Vec<f64>,
    pub entropy: f64,
    pub purity: f64,
}

/// Eigenvalues of the integral operator with kernel ρ on its Simpson grid.
pub fn diagonalize_kernel(rho: &GridKernel) -> Result<KernelSpectrum> {
    let a = rho.weighted_matrix();
    let mut sym = (&a + a.transpose()) * 0.5;
    // entries below amax·ε² cannot move any eigenvalue above roundoff, and
    // the deep underflow tail of wide windows sends the QR sweeps to NaN
    let floor = sym.amax() * f64::EPSILON * f64::EPSILON;
    sym.apply(|v| {
        if v.abs() < floor {
            *v = 0.0
        }
    });
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::Integrity(
            "kernel spectrum has non-finite eigenvalues".into(),
        ));
    }
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    let entropy = -eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|l| l * l.ln())
        .sum::<f64>();
    let purity = eigenvalues.iter().map(|l| l * l).sum();
    Ok(KernelSpectrum {
        eigenvalues,
        entropy,
        purity,
    })
}

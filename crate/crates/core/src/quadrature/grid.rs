//! Two-point kernels sampled on a composite Simpson grid.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of grid nodes for kernels.
pub const DEFAULT_GRID_NODES: usize = 513;

/// Smallest node count accepted by `discretize_kernel`.
pub const MIN_GRID_NODES: usize = 33;

/// A shareable analytic two-point kernel.
pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Composite Simpson nodes and weights on [-l, l] with `n` (odd) points.
pub fn simpson_grid(l: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "Simpson grid needs an odd node count >= 3, got {n}"
        )));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::domain(format!(
            "grid half-width must be positive, got {l}"
        )));
    }
    let h = 2.0 * l / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n)
        .map(|i| {
            // symmetric construction keeps x_i = -x_{n-1-i} exactly
            let k = i as f64 - ((n - 1) / 2) as f64;
            k * h
        })
        .collect();
    let weights = (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    Ok((nodes, weights))
}

/// A kernel ρ(x_i, x_j) on a Simpson grid.
#[derive(Clone, PartialEq, Serialize)]
pub struct GridKernel {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub values: DMatrix<f64>,
    pub hermitian: bool,
    /// Estimated discretization error of trace and purity.
    pub error_estimate: f64,
}

impl fmt::Debug for GridKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridKernel")
            .field("nodes", &self.nodes.len())
            .field("half_width", &self.half_width())
            .field("hermitian", &self.hermitian)
            .field("error_estimate", &self.error_estimate)
            .finish()
    }
}

impl GridKernel {
    /// Sample `k` on the Simpson grid with no error estimate attached.
    pub fn sample<K: Fn(f64, f64) -> f64 + ?Sized>(k: &K, l: f64, n: usize) -> Result<Self> {
        let (nodes, weights) = simpson_grid(l, n)?;
        let mut values = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                values[(i, j)] = k(nodes[i], nodes[j]);
            }
        }
        Self::from_values(nodes, weights, values)
    }

    /// Like `sample` for a kernel with k(x, x′) = k(|x|, |x′|) = k(x′, x); only
    /// the octant 0 ≤ x ≤ x′ is evaluated.
    pub fn sample_even<K: Fn(f64, f64) -> f64 + ?Sized>(k: &K, l: f64, n: usize) -> Result<Self> {
        let (nodes, weights) = simpson_grid(l, n)?;
        let mid = n / 2;
        let m = n - mid;
        let mut half = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let v = k(nodes[mid + a], nodes[mid + b]);
                half[(a, b)] = v;
                half[(b, a)] = v;
            }
        }
        let fold = |i: usize| i.abs_diff(mid);
        let values = DMatrix::from_fn(n, n, |i, j| half[(fold(i), fold(j))]);
        Self::from_values(nodes, weights, values)
    }

    /// Build from precomputed samples; `hermitian` is detected.
    pub fn from_values(nodes: Vec<f64>, weights: Vec<f64>, values: DMatrix<f64>) -> Result<Self> {
        let n = nodes.len();
        if weights.len() != n || values.nrows() != n || values.ncols() != n {
            return Err(Error::domain("grid kernel dimensions disagree"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integrity("kernel has non-finite samples".into()));
        }
        let scale = values.amax().max(f64::MIN_POSITIVE);
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                asym = asym.max((values[(i, j)] - values[(j, i)]).abs());
            }
        }
        Ok(GridKernel {
            nodes,
            weights,
            values,
            hermitian: asym <= 1e-12 * scale,
            error_estimate: f64::NAN,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Σ w_i ρ(x_i, x_i).
    pub fn trace(&self) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * self.values[(i, i)])
            .sum()
    }

    /// Σ w_i w_j ρ_ij ρ_ji.
    pub fn purity(&self) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.weights[j] * self.values[(i, j)] * self.values[(j, i)];
            }
            acc += self.weights[i] * row;
        }
        acc
    }

    /// Σ w_i x_i^k ρ(x_i, x_i).
    pub fn diagonal_moment(&self, k: i32) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * self.nodes[i].powi(k) * self.values[(i, i)])
            .sum()
    }

    /// The diagonal ρ(x_i, x_i).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.values[(i, i)]).collect()
    }

    /// Divide by the trace; the error estimate is rescaled accordingly.
    pub fn normalized(mut self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(Error::Integrity(format!(
                "kernel trace {t} is not positive"
            )));
        }
        self.values /= t;
        Ok(self)
    }

    /// W^{1/2} ρ W^{1/2}, whose spectrum is that of the integral operator.
    pub fn weighted_matrix(&self) -> DMatrix<f64> {
        let s: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| s[i] * self.values[(i, j)] * s[j])
    }

    /// Every other node; the result is again a Simpson grid on the same window.
    pub fn subgrid(&self) -> Result<Self> {
        let n = self.len();
        let m = n.div_ceil(2);
        if n.is_multiple_of(2) || m < 3 || m.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "a {n}-node grid has no Simpson subgrid"
            )));
        }
        let (nodes, weights) = simpson_grid(self.half_width(), m)?;
        let values = DMatrix::from_fn(m, m, |i, j| self.values[(2 * i, 2 * j)]);
        Ok(GridKernel {
            nodes,
            weights,
            values,
            hermitian: self.hermitian,
            error_estimate: f64::NAN,
        })
    }

    /// Discretization error from comparing trace and purity with the subgrid.
    /// For Simpson's rule the subgrid error is about 16 times the full-grid
    /// error, so the difference over-estimates it by a safe margin.
    pub fn subgrid_error(&self) -> Result<f64> {
        let coarse = self.subgrid()?;
        Ok(comparison_error(self, &coarse))
    }

    /// Attach the subgrid error estimate.
    pub fn with_subgrid_error(mut self) -> Result<Self> {
        self.error_estimate = self.subgrid_error()?;
        Ok(self)
    }

    /// Linear interpolation of the diagonal density at x (0 outside the window).
    pub fn diagonal_at(&self, x: f64) -> f64 {
        let n = self.len();
        let l = self.half_width();
        if x < -l || x > l {
            return 0.0;
        }
        let h = self.spacing();
        let t = (x + l) / h;
        let i = (t.floor() as usize).min(n - 2);
        let f = t - i as f64;
        (1.0 - f) * self.values[(i, i)] + f * self.values[(i + 1, i + 1)]
    }
}

fn comparison_error(fine: &GridKernel, coarse: &GridKernel) -> f64 {
    let dt = (fine.trace() - coarse.trace()).abs();
    let dp = (fine.purity() - coarse.purity()).abs();
    2.0 * dt.max(dp) + 1e-15
}

/// Sample a kernel on N nodes of [-l, l] with an error estimate from a
/// second pass at 2N−1 nodes (whose even nodes coincide with the N grid).
pub fn discretize_kernel<K: Fn(f64, f64) -> f64 + ?Sized>(
    k: &K,
    l: f64,
    n: usize,
) -> Result<GridKernel> {
    if n < MIN_GRID_NODES || n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "kernel grids need an odd node count >= {MIN_GRID_NODES}, got {n}"
        )));
    }
    let fine = GridKernel::sample(k, l, 2 * n - 1)?;
    let mut coarse = fine.subgrid()?;
    coarse.error_estimate = comparison_error(&fine, &coarse);
    Ok(coarse)
}

/// `discretize_kernel` for kernels even in each argument and symmetric.
pub fn discretize_even_kernel<K: Fn(f64, f64) -> f64 + ?Sized>(
    k: &K,
    l: f64,
    n: usize,
) -> Result<GridKernel> {
    if n < MIN_GRID_NODES || n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "kernel grids need an odd node count >= {MIN_GRID_NODES}, got {n}"
        )));
    }
    let fine = GridKernel::sample_even(k, l, 2 * n - 1)?;
    let mut coarse = fine.subgrid()?;
    coarse.error_estimate = comparison_error(&fine, &coarse);
    Ok(coarse)
}

/// Default window half-width: the larger of 8σ and the outermost point where
/// the diagonal density is still above 1e-12 of its peak.
pub fn default_window<D: Fn(f64) -> f64>(variance: f64, density: D) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::domain(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let sigma = variance.sqrt();
    let step = sigma / 64.0;
    let reach = 40.0 * sigma;
    let mut peak = 0.0f64;
    let mut x = 0.0;
    while x <= reach {
        peak = peak.max(density(x)).max(density(-x));
        x += step;
    }
    let thresh = 1e-12 * peak;
    let mut edge = 0.0;
    x = 0.0;
    while x <= reach {
        if density(x) > thresh || density(-x) > thresh {
            edge = x;
        }
        x += step;
    }
    Ok((8.0 * sigma).max(edge + step))
}

/// A density kernel carried as grid samples, optionally with the analytic
/// closure it was sampled from.
#[derive(Clone)]
pub struct DensityKernel {
    pub grid: GridKernel,
    pub analytic: Option<KernelFn>,
    /// the closure is even in each argument and symmetric
    pub even: bool,
}

impl fmt::Debug for DensityKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityKernel")
            .field("grid", &self.grid)
            .field("analytic", &self.analytic.is_some())
            .field("even", &self.even)
            .finish()
    }
}

impl DensityKernel {
    /// Sample an analytic kernel with `discretize_kernel`.
    pub fn from_analytic(k: KernelFn, l: f64, n: usize) -> Result<Self> {
        let grid = discretize_kernel(&*k, l, n)?;
        Ok(DensityKernel {
            grid,
            analytic: Some(k),
            even: false,
        })
    }

    /// `from_analytic` for kernels with k(x, x′) = k(|x|, |x′|) = k(x′, x).
    pub fn from_analytic_even(k: KernelFn, l: f64, n: usize) -> Result<Self> {
        let grid = discretize_even_kernel(&*k, l, n)?;
        Ok(DensityKernel {
            grid,
            analytic: Some(k),
            even: true,
        })
    }

    pub fn from_grid(grid: GridKernel) -> Self {
        DensityKernel {
            grid,
            analytic: None,
            even: false,
        }
    }

    /// ρ(x, x'), from the closure when present.
    pub fn eval(&self, x: f64, xp: f64) -> Option<f64> {
        self.analytic.as_ref().map(|k| k(x, xp))
    }

    /// Resample on a new window; needs the analytic closure.
    pub fn resample(&self, l: f64, n: usize) -> Result<Self> {
        match &self.analytic {
            Some(k) if self.even => Self::from_analytic_even(k.clone(), l, n),
            Some(k) => Self::from_analytic(k.clone(), l, n),
            None => Err(Error::Window(
                "grid-only kernel cannot be resampled on a new window".into(),
            )),
        }
    }
}

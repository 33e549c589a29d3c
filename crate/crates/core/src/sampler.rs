//! Seeded disorder realizations drawn from quadrature densities or number
//! statistics, with empirical moments checked against the analytic ones.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution as _;
use serde::{Deserialize, Serialize};

use crate::coupled::{
    default_pair_window, harmonic_reduced, identical_pi4_kernel, reduced_identical_pi4,
    reduced_moment_binomial, reduced_numeric, AnharmonicPair, GridConfig, HarmonicPair,
};
use crate::error::{Error, Result};
use crate::fock::number_statistics;
use crate::qes::{raw_moment, variance, GroundState};
use crate::quadrature::{
    default_window, neumaier, simpson_grid, DensityKernel, KernelFn, DEFAULT_GRID_NODES,
};

/// Nodes of the tabulated CDF for sources with a closed-form density.
pub const CDF_NODES: usize = 4097;

/// Most negative density value tolerated as roundoff.
pub const NEGATIVE_DENSITY_TOL: f64 = 1e-9;

/// Largest odd-level population accepted as parity noise.
pub const ODD_POPULATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Pure {
        c: f64,
    },
    MixedIdenticalPi4 {
        c: f64,
    },
    MixedGeneral {
        c1: f64,
        c2: f64,
        theta: f64,
    },
    Harmonic {
        omega1p: f64,
        omega2p: f64,
        theta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    #[default]
    Quadrature,
    /// Fock basis frequency; taken from the state's own variance when absent.
    Number { omega: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub source: Source,
    pub observable: Observable,
    pub count: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn new(source: Source, observable: Observable, count: usize, seed: u64) -> Result<Self> {
        let s = DisorderSpec {
            source,
            observable,
            count,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::domain("sample count must be positive"));
        }
        let finite = match self.source {
            Source::Pure { c } | Source::MixedIdenticalPi4 { c } => c.is_finite(),
            Source::MixedGeneral { c1, c2, theta } => [c1, c2, theta].iter().all(|v| v.is_finite()),
            Source::Harmonic {
                omega1p,
                omega2p,
                theta,
            } => [omega1p, omega2p, theta].iter().all(|v| v.is_finite()),
        };
        if !finite {
            return Err(Error::domain("source parameters must be finite"));
        }
        if let Observable::Number { omega: Some(w) } = self.observable {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::domain(format!(
                    "Fock frequency must be positive, got {w}"
                )));
            }
        }
        Ok(())
    }
}

/// The generator for stream `stream` of seed `seed`: ChaCha20 keyed by
/// `seed_from_u64(seed)` with the stream index as its nonce.
pub fn generator(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Tabulated cumulative distribution, strictly increasing from 0 to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cdf {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// slopes dx/dF of the monotone cubic inverse
    slopes: Vec<f64>,
}

impl Cdf {
    /// F(x) by linear interpolation, 0 and 1 outside the table.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return 0.0;
        }
        if x >= self.x[n - 1] {
            return 1.0;
        }
        let k = self.x.partition_point(|&v| v <= x) - 1;
        let t = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.f[k] + t * (self.f[k + 1] - self.f[k])
    }

    /// x(u) from the monotone cubic Hermite interpolant of the inverse table.
    pub fn inverse(&self, u: f64) -> f64 {
        let n = self.f.len();
        let u = u.clamp(0.0, 1.0);
        let k = (self.f.partition_point(|&v| v <= u)).clamp(1, n - 1) - 1;
        let h = self.f[k + 1] - self.f[k];
        let t = (u - self.f[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.x[k]
            + h10 * h * self.slopes[k]
            + h01 * self.x[k + 1]
            + h11 * h * self.slopes[k + 1]
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Fritsch–Carlson slopes of y(t) for strictly increasing t and y.
fn pchip_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        let (w1, w2) = (2.0 * h[k] + h[k - 1], h[k] + 2.0 * h[k - 1]);
        m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    m
}

/// Cumulative trapezoid of a density sampled at increasing `nodes`,
/// normalized to end at 1, with flat runs removed.
pub fn build_cdf(nodes: &[f64], density: &[f64]) -> Result<Cdf> {
    if nodes.len() != density.len() || nodes.len() < 2 {
        return Err(Error::domain(
            "nodes and density must have equal length of at least 2",
        ));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("nodes must be strictly increasing"));
    }
    if let Some(v) = density
        .iter()
        .find(|v| !v.is_finite() || **v < -NEGATIVE_DENSITY_TOL)
    {
        return Err(Error::Integrity(format!(
            "density value {v:e} is not a probability density"
        )));
    }
    let p: Vec<f64> = density.iter().map(|v| v.max(0.0)).collect();
    let mut cum = Vec::with_capacity(p.len());
    cum.push(0.0);
    let mut acc = 0.0;
    let mut comp = 0.0;
    for k in 0..p.len() - 1 {
        let term = 0.5 * (p[k] + p[k + 1]) * (nodes[k + 1] - nodes[k]);
        // Neumaier running sum
        let t = acc + term;
        comp += if acc.abs() >= term.abs() {
            (acc - t) + term
        } else {
            (term - t) + acc
        };
        acc = t;
        cum.push(acc + comp);
    }
    let total = *cum.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::Integrity("density has no mass".into()));
    }
    let f: Vec<f64> = cum.iter().map(|v| (v / total).min(1.0)).collect();

    // keep the last point of the leading zero run and stop at the first 1
    let start = f.iter().rposition(|&v| v == 0.0).unwrap_or(0);
    let (mut xs, mut fs) = (vec![nodes[start]], vec![0.0]);
    for k in start + 1..f.len() {
        if f[k] > *fs.last().unwrap() {
            xs.push(nodes[k]);
            fs.push(f[k]);
            if f[k] >= 1.0 {
                break;
            }
        }
    }
    *fs.last_mut().unwrap() = 1.0;
    if xs.len() < 2 {
        return Err(Error::Integrity(
            "density concentrated on a single node".into(),
        ));
    }
    let slopes = pchip_slopes(&fs, &xs);
    Ok(Cdf {
        x: xs,
        f: fs,
        slopes,
    })
}

/// Density on the diagonal of the source's reduced state.
pub fn quadrature_cdf(source: &Source) -> Result<Cdf> {
    let (nodes, density) = match *source {
        Source::Pure { c } => {
            let g = GroundState::new(c)?;
            let l = default_window(variance(c)?, |x| g.density(x))?;
            let (x, _) = simpson_grid(l, CDF_NODES)?;
            let d = x.iter().map(|&y| g.density(y)).collect();
            (x, d)
        }
        Source::MixedIdenticalPi4 { c } => {
            let l = default_pair_window(&AnharmonicPair::identical_pi4(c)?)?;
            let (x, _) = simpson_grid(l, CDF_NODES)?;
            let d = x
                .iter()
                .map(|&y| reduced_identical_pi4(y, y, c))
                .collect::<Result<_>>()?;
            (x, d)
        }
        Source::MixedGeneral { c1, c2, theta } => {
            let k = reduced_numeric(&AnharmonicPair::new(c1, c2, theta)?, &GridConfig::default())?;
            let d = k.diagonal();
            (k.nodes, d)
        }
        Source::Harmonic {
            omega1p,
            omega2p,
            theta,
        } => {
            let r = harmonic_reduced(&HarmonicPair::new(omega1p, omega2p, theta)?, None, None)?;
            let var = r.variance;
            let l = 10.0 * var.sqrt();
            let (x, _) = simpson_grid(l, CDF_NODES)?;
            let norm = (2.0 * std::f64::consts::PI * var).sqrt();
            let d = x
                .iter()
                .map(|&y| (-y * y / (2.0 * var)).exp() / norm)
                .collect();
            (x, d)
        }
    };
    build_cdf(&nodes, &density)
}

/// Density kernel of the source, as handed to the number statistics.
pub fn source_kernel(source: &Source) -> Result<DensityKernel> {
    match *source {
        Source::Pure { c } => {
            let g = GroundState::new(c)?;
            let l = default_window(variance(c)?, |x| g.density(x))?;
            let k: KernelFn = Arc::new(move |x, y| g.psi(x) * g.psi(y));
            DensityKernel::from_analytic_even(k, l, DEFAULT_GRID_NODES)
        }
        Source::MixedIdenticalPi4 { c } => identical_pi4_kernel(c, &GridConfig::default()),
        Source::MixedGeneral { c1, c2, theta } => {
            let p = AnharmonicPair::new(c1, c2, theta)?;
            Ok(DensityKernel::from_grid(reduced_numeric(
                &p,
                &GridConfig::default(),
            )?))
        }
        Source::Harmonic {
            omega1p,
            omega2p,
            theta,
        } => Ok(harmonic_reduced(&HarmonicPair::new(omega1p, omega2p, theta)?, None, None)?.kernel),
    }
}

/// Level probabilities p_n normalized over the computed levels. Every source
/// is parity even, so odd levels are zero up to noise and are set to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDistribution {
    pub omega: f64,
    pub probabilities: Vec<f64>,
    /// mass above the last computed level, dropped before normalizing
    pub tail_mass: f64,
}

pub fn number_distribution(source: &Source, omega: Option<f64>) -> Result<LevelDistribution> {
    let stats = number_statistics(&source_kernel(source)?, omega, None)?;
    if let Some(p) = stats
        .populations
        .iter()
        .find(|p| **p < -NEGATIVE_DENSITY_TOL)
    {
        return Err(Error::Integrity(format!("negative population {p:e}")));
    }
    let odd = stats.max_odd();
    if odd > ODD_POPULATION_TOL {
        return Err(Error::Integrity(format!(
            "odd population {odd:e} on a parity-even state"
        )));
    }
    let p: Vec<f64> = stats
        .populations
        .iter()
        .enumerate()
        .map(|(n, v)| if n % 2 == 1 { 0.0 } else { v.max(0.0) })
        .collect();
    let total = neumaier(p.iter().copied());
    Ok(LevelDistribution {
        omega: stats.omega,
        probabilities: p.iter().map(|v| v / total).collect(),
        tail_mass: stats.tail_mass,
    })
}

/// What draws are taken from.
#[derive(Debug, Clone)]
pub enum Distribution {
    Quadrature(Cdf),
    Number(LevelDistribution),
}

impl Distribution {
    pub fn for_spec(spec: &DisorderSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec.observable {
            Observable::Quadrature => Distribution::Quadrature(quadrature_cdf(&spec.source)?),
            Observable::Number { omega } => {
                Distribution::Number(number_distribution(&spec.source, omega)?)
            }
        })
    }

    pub fn draw<R: Rng>(&self, count: usize, rng: &mut R) -> Result<SampleValues> {
        Ok(match self {
            Distribution::Quadrature(cdf) => {
                SampleValues::Quadrature((0..count).map(|_| cdf.inverse(rng.random())).collect())
            }
            Distribution::Number(levels) => {
                let alias = WeightedAliasIndex::new(levels.probabilities.clone())
                    .map_err(|e| Error::Integrity(format!("level probabilities: {e}")))?;
                SampleValues::Number((0..count).map(|_| alias.sample(rng) as u64).collect())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SampleValues {
    Quadrature(Vec<f64>),
    Number(Vec<u64>),
}

impl SampleValues {
    pub fn len(&self) -> usize {
        match self {
            SampleValues::Quadrature(v) => v.len(),
            SampleValues::Number(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        match self {
            SampleValues::Quadrature(v) => v.clone(),
            SampleValues::Number(v) => v.iter().map(|&n| n as f64).collect(),
        }
    }
}

/// Sample mean of xᵏ with its standard error and the analytic target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub value: f64,
    pub std_error: f64,
    pub target: f64,
}

impl MomentEstimate {
    pub fn from_samples(order: u32, xs: &[f64], target: f64) -> Self {
        let n = xs.len() as f64;
        let m = neumaier(xs.iter().map(|x| x.powi(order as i32))) / n;
        let m2 = neumaier(xs.iter().map(|x| x.powi(2 * order as i32))) / n;
        MomentEstimate {
            order,
            value: m,
            std_error: ((m2 - m * m).max(0.0) / (n - 1.0).max(1.0)).sqrt(),
            target,
        }
    }

    /// Deviation from the target in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.value - self.target) / self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalMoments {
    pub mu2: MomentEstimate,
    pub mu4: MomentEstimate,
}

impl EmpiricalMoments {
    pub fn within(&self, sigmas: f64) -> bool {
        self.mu2.z_score().abs() <= sigmas && self.mu4.z_score().abs() <= sigmas
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub spec: DisorderSpec,
    pub stream: u64,
    pub values: SampleValues,
    pub empirical_moments: EmpiricalMoments,
}

/// Analytic second and fourth moments of what the spec observes.
pub fn analytic_moments(spec: &DisorderSpec, dist: &Distribution) -> Result<(f64, f64)> {
    if let Distribution::Number(levels) = dist {
        let m = |k: i32| {
            neumaier(
                levels
                    .probabilities
                    .iter()
                    .enumerate()
                    .map(|(n, p)| (n as f64).powi(k) * p),
            )
        };
        return Ok((m(2), m(4)));
    }
    match spec.source {
        Source::Pure { c } => Ok((raw_moment(2, c)?, raw_moment(4, c)?)),
        Source::MixedIdenticalPi4 { c } => {
            let p = AnharmonicPair::identical_pi4(c)?;
            Ok((variance(c)?, reduced_moment_binomial(4, &p)?))
        }
        Source::MixedGeneral { c1, c2, theta } => {
            let p = AnharmonicPair::new(c1, c2, theta)?;
            Ok((
                reduced_moment_binomial(2, &p)?,
                reduced_moment_binomial(4, &p)?,
            ))
        }
        Source::Harmonic {
            omega1p,
            omega2p,
            theta,
        } => {
            let r = harmonic_reduced(&HarmonicPair::new(omega1p, omega2p, theta)?, None, None)?;
            Ok((r.variance, 3.0 * r.variance * r.variance))
        }
    }
}

/// Draws of stream `stream`; streams of one seed never share generator state.
pub fn sample_stream(spec: &DisorderSpec, stream: u64) -> Result<SampleSet> {
    let dist = Distribution::for_spec(spec)?;
    let mut rng = generator(spec.seed, stream);
    let values = dist.draw(spec.count, &mut rng)?;
    let (t2, t4) = analytic_moments(spec, &dist)?;
    let xs = values.as_f64();
    Ok(SampleSet {
        spec: *spec,
        stream,
        values,
        empirical_moments: EmpiricalMoments {
            mu2: MomentEstimate::from_samples(2, &xs, t2),
            mu4: MomentEstimate::from_samples(4, &xs, t4),
        },
    })
}

pub fn sample(spec: &DisorderSpec) -> Result<SampleSet> {
    sample_stream(spec, 0)
}

/// sup |F_n − F| of real draws against the table.
pub fn ks_distance(samples: &[f64], cdf: &Cdf) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf.eval(x);
        d.max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs())
    })
}

/// sup over levels of |F_n − F| for draws from a level distribution.
pub fn ks_distance_levels(samples: &[u64], probabilities: &[f64]) -> f64 {
    let mut counts = vec![0usize; probabilities.len()];
    for &s in samples {
        if let Some(c) = counts.get_mut(s as usize) {
            *c += 1;
        }
    }
    let n = samples.len() as f64;
    let (mut emp, mut model, mut d) = (0.0, 0.0, 0.0f64);
    for (c, p) in counts.iter().zip(probabilities) {
        emp += *c as f64 / n;
        model += p;
        d = d.max((emp - model).abs());
    }
    d
}

/// Two-sided 99% Kolmogorov–Smirnov critical distance for n draws.
pub fn ks_critical_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_is_exact_on_lines() {
        let t = [0.0, 0.3, 1.0];
        let m = pchip_slopes(&t, &[1.0, 1.6, 3.0]);
        assert!(m.iter().all(|v| (v - 2.0).abs() < 1e-14));
    }

    #[test]
    fn flat_tails_are_trimmed() {
        let cdf = build_cdf(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(cdf.x, vec![1.0, 2.0, 3.0]);
        assert_eq!(cdf.f, vec![0.0, 0.5, 1.0]);
    }
}

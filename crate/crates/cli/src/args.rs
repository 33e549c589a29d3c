use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Ground states, moments, Q-functions, Fock statistics and coupled-pair
/// reduced states of quasi-exactly solvable sextic oscillators.
#[derive(Debug, Parser, Serialize)]
#[command(name = "sextic", version, allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Data file to write; a directory receives the default file name.
    /// Defaults to $SEXTIC_OUT_DIR or the working directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Rescaled potential V(y) on a grid, with its shape class and extrema.
    #[command(allow_negative_numbers = true)]
    Potential(PotentialArgs),
    /// Raw, excess and successive-ratio moments of the ground state.
    #[command(allow_negative_numbers = true)]
    Moments(MomentsArgs),
    /// Husimi Q-function on a rectangle of phase space.
    #[command(allow_negative_numbers = true)]
    Qfunc(QfuncArgs),
    /// Zeros of G_c along the imaginary axis.
    #[command(allow_negative_numbers = true)]
    GcScan(GcScanArgs),
    /// Fock-level populations of a pure or mixed state.
    #[command(allow_negative_numbers = true)]
    Fock(FockArgs),
    /// Linearly coupled harmonic pair: reduced state and thermal reading.
    #[command(allow_negative_numbers = true)]
    Harmonic(HarmonicArgs),
    /// Coupled anharmonic pairs.
    #[command(subcommand)]
    Coupled(CoupledCommand),
    /// Seeded disorder realizations.
    #[command(allow_negative_numbers = true)]
    Sample(SampleArgs),
    /// Data series for a named figure.
    #[command(allow_negative_numbers = true)]
    Figure(FigureArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PotentialArgs {
    #[arg(long)]
    pub c: f64,
    /// Half-width of the y grid; defaults to 1.5 times the outermost extremum (at least 2.5).
    #[arg(long)]
    pub range: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    /// Closed forms in Bessel and confluent hypergeometric functions.
    Analytic,
    /// Adaptive quadrature of y^k |ψ|².
    Oracle,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub c: f64,
    /// Even orders as a range `lo:hi[:step]` (step 2 by default) or a list `2,4,8`.
    #[arg(long, value_parser = parse_orders, default_value = "2:16")]
    pub orders: Orders,
    #[arg(long, value_enum, default_value_t = MomentMethod::Analytic)]
    pub method: MomentMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// Single-oscillator ground state.
    Pure,
    /// One of an identical pair mixed at π/4, the other traced out.
    MixedPi4,
}

#[derive(Debug, Args, Serialize)]
pub struct QfuncArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = StateKind::Pure)]
    pub state: StateKind,
    #[arg(long, default_value_t = -4.0)]
    pub re_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub re_max: f64,
    #[arg(long, default_value_t = -4.0)]
    pub im_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub im_max: f64,
    /// Points along each axis.
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GcScanArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 12.0)]
    pub alpha2_max: f64,
    /// Initial scan step, halved until the zero count repeats.
    #[arg(long, default_value_t = sextic::husimi::DEFAULT_SCAN_STEP)]
    pub step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FockArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = StateKind::Pure)]
    pub state: StateKind,
    /// Fock frequency; taken from ⟨x²⟩ = 1/(2Ω) when absent.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Highest level; 60 extended to 128 on a heavy tail when absent.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    /// Odd number of Simpson nodes per axis.
    #[arg(long, default_value_t = sextic::quadrature::DEFAULT_GRID_NODES)]
    pub nodes: usize,
    /// Grid half-width; chosen from the densities when absent.
    #[arg(long)]
    pub half_width: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct HarmonicArgs {
    /// Decoupled frequency ω′₁.
    #[arg(long, requires_all = ["omega2p", "theta"], conflicts_with_all = ["omega1", "omega2", "lambda"])]
    pub omega1p: Option<f64>,
    /// Decoupled frequency ω′₂.
    #[arg(long)]
    pub omega2p: Option<f64>,
    /// Mixing angle in [0, π/2].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Coupled-frame frequency ω₁ of ½(ω₁²x₁² + ω₂²x₂² + λx₁x₂).
    #[arg(long, requires_all = ["omega2", "lambda"])]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Coupling λ, |λ| < 2ω₁ω₂.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoupledCommand {
    /// Reduced moments of x₁ for a pair mixed at angle θ.
    #[command(allow_negative_numbers = true)]
    Moments(CoupledMomentsArgs),
    /// Reduced density kernel ρ(x, x′) on its grid.
    #[command(allow_negative_numbers = true)]
    Kernel(KernelArgs),
    /// Eigenvalues, purity and entropy of the reduced kernel.
    #[command(allow_negative_numbers = true)]
    Spectrum(KernelArgs),
    /// Coupled-frame polynomial coefficients of the rotated potentials.
    #[command(allow_negative_numbers = true)]
    Expansion(ExpansionArgs),
    /// Variances of x₁ and x₂ against the piecewise prediction.
    #[command(allow_negative_numbers = true)]
    Variance(PairArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    #[arg(long)]
    pub c1: f64,
    #[arg(long)]
    pub c2: f64,
    /// Mixing angle in [0, π/2].
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CoupledMomentsArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_parser = parse_orders, default_value = "2:16")]
    pub orders: Orders,
    /// Also integrate each moment over the joint density as a check.
    #[arg(long)]
    pub quadrature: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct KernelArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Per-entry x₂ quadrature target relative to the kernel peak.
    #[arg(long, default_value_t = 1e-10)]
    pub x2_tol: f64,
    /// Write every (x, x′) entry instead of the diagonal.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpansionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a2: f64,
    #[arg(long)]
    pub b1: f64,
    #[arg(long)]
    pub b2: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Pure,
    MixedPi4,
    MixedGeneral,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservableKind {
    Quadrature,
    Number,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Read the whole disorder spec from a JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["source", "c", "c1", "c2", "theta", "omega1p", "omega2p", "observable", "omega", "count", "seed"])]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SourceKind::Pure)]
    pub source: SourceKind,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub omega1p: Option<f64>,
    #[arg(long)]
    pub omega2p: Option<f64>,
    #[arg(long, value_enum, default_value_t = ObservableKind::Quadrature)]
    pub observable: ObservableKind,
    /// Fock frequency for number draws; from the state's variance when absent.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent stream of the same seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FigureArgs {
    #[arg(long, required_unless_present = "list")]
    pub id: Option<String>,
    /// Print the figure ids and exit.
    #[arg(long)]
    pub list: bool,
}

/// Even moment orders in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Orders(pub Vec<u32>);

pub fn parse_orders(s: &str) -> Result<Orders, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{t}` is not a non-negative integer"))
    };
    let orders: Vec<u32> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (num(lo)?, num(hi)?, 2),
            [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
            _ => return Err(format!("`{s}` is not lo:hi or lo:hi:step")),
        };
        if step == 0 || lo > hi {
            return Err(format!("`{s}` is an empty range"));
        }
        (lo..=hi).step_by(step as usize).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if orders.is_empty() {
        return Err("no orders given".into());
    }
    if let Some(o) = orders.iter().find(|o| *o % 2 != 0) {
        return Err(format!("moment orders must be even, got {o}"));
    }
    Ok(Orders(orders))
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "erwd", version, about = "Excited random walk with opposing drifts")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Output file; overrides --output-dir.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Directory for output files named after the subcommand.
    #[arg(long, env = "ERWD_OUTPUT_DIR", global = true)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for Monte Carlo work (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Default sample sizes: `demo` finishes in well under a minute, `full` uses the 1000 x 7000 reference budget.
    #[arg(long, value_enum, default_value = "demo", global = true)]
    pub budget: Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Demo,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the velocity at one parameter point.
    Simulate(SimulateArgs),
    /// Sign of the velocity over a (beta, mu) grid.
    Sweep(SweepArgs),
    /// Green's function convolution powers G_d^{*n}(0).
    Greens(GreensArgs),
    /// Expansion bounds and certificates at dimension d.
    Bounds(BoundsArgs),
    /// Bracket the beta at which the velocity vanishes.
    FindBeta0(FindBeta0Args),
    /// Exact expansion coefficients by enumeration.
    Enumerate(EnumerateArgs),
    /// Run the cookie-replacement coupling.
    Couple(CoupleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub walks: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// z-score for a sign verdict.
    #[arg(long, default_value_t = erwd::estimator::DEFAULT_Z)]
    pub z: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub d: usize,
    /// Points per axis of a uniform grid on [0, 1].
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    /// Explicit beta values (comma separated); overrides --grid for beta.
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    /// Explicit mu values (comma separated); overrides --grid for mu.
    #[arg(long, value_delimiter = ',')]
    pub mu_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub walks: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = erwd::estimator::DEFAULT_Z)]
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GreensMethodArg {
    Integral,
    Series,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct GreensArgs {
    #[arg(long)]
    pub d: usize,
    /// Convolution power; all finite powers up to 3 when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value = "both")]
    pub method: GreensMethodArg,
    /// Steps summed exactly by the series method.
    #[arg(long, default_value_t = erwd::greens::DEFAULT_STEPS)]
    pub series_steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Use the published rigorous upper bounds on G where available.
    #[arg(long)]
    pub published: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FindBeta0Args {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.05)]
    pub width: f64,
    /// Walks at the first look at each point.
    #[arg(long)]
    pub walks: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub max_factor: usize,
    #[arg(long, default_value_t = 40)]
    pub max_points: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = erwd::estimator::DEFAULT_Z)]
    pub z: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub d: usize,
    /// Walk length m.
    #[arg(long)]
    pub m: usize,
    /// Expansion order N.
    #[arg(long = "N", alias = "order")]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Include every nonzero coefficient, not just totals.
    #[arg(long)]
    pub entries: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CoupleArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 100)]
    pub blocks: usize,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

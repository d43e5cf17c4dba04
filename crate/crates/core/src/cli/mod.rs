//! Command-line front end. Every subcommand validates its flags, runs one
//! library operation, and writes JSON (reports) or CSV (tables); with
//! `--out FILE` a `FILE.manifest.json` records parameters, seed, version,
//! timing and output digests.
//!
//! Exit codes: 0 success, 2 usage error, 3 computation error, 4 result
//! produced but flagged unreliable.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use thiserror::Error;

pub use output::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_FLAGGED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

macro_rules! computation_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Computation(e.to_string())
            }
        }
    )*};
}

computation_errors!(
    crate::graph::GraphError,
    crate::ensembles::EnsembleError,
    crate::zeta::ZetaError,
    crate::walks::WalkError,
    crate::detector::DetectorError,
    crate::largedev::LdpError,
    crate::ergodic::ErgodicError,
    crate::matching::MatchingError,
    serde_json::Error,
    csv::Error
);

#[derive(Debug, Parser, Serialize)]
#[command(name = "topoinfer", version, about = "Graph zeta invariants, random walks, connectivity detection and large deviations")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Sample a random graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Ihara zeta polynomial, loop counts and topological summary.
    Zeta(ZetaArgs),
    /// Random-walk occupancy and return probabilities.
    Walk(WalkArgs),
    /// Local connectivity detector; `detect sweep` runs a bridge-count sweep.
    Detect(DetectCommand),
    /// Large-deviation estimators.
    #[command(subcommand)]
    Ldp(LdpCommand),
    /// Birkhoff-average convergence curves.
    Ergodic(ErgodicArgs),
    /// Perfect matchings of a grid graph.
    Match(MatchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Er,
    Bipartite,
    Planted,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub ensemble: EnsembleKind,
    /// Vertex count (er).
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability (er).
    #[arg(long)]
    pub p: Option<f64>,
    /// Bit (variable) vertices (bipartite).
    #[arg(long)]
    pub n_bits: Option<usize>,
    /// Check vertices (bipartite).
    #[arg(long)]
    pub m_checks: Option<usize>,
    /// Bit degree (bipartite).
    #[arg(long)]
    pub q: Option<usize>,
    /// Check degree (bipartite).
    #[arg(long)]
    pub r: Option<usize>,
    /// Block sizes and cross-edge count (planted).
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Within-block edge probability (planted).
    #[arg(long)]
    pub p_intra: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ZetaArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub max_m: usize,
    /// Skip the exhaustive prime-loop census.
    #[arg(long)]
    pub no_oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub start: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trajectories: usize,
    #[arg(long)]
    pub seed: u64,
    /// Occupancy CSV; return probabilities go to `<stem>.returns.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct DetectCommand {
    #[command(subcommand)]
    pub sweep: Option<DetectSub>,
    #[command(flatten)]
    pub run: DetectArgs,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum DetectSub {
    /// Detection rate against the number of planted bridges.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct DetectorFlags {
    #[arg(long, default_value_t = 8)]
    pub pairs: usize,
    /// Walk length; defaults to ceil(4 ln(n)^2).
    #[arg(long)]
    pub walk_len: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 11)]
    pub reps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[arg(long = "in", required = true)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub flags: DetectorFlags,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Total vertex count, split into two equal blocks.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated bridge counts.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8,16,32")]
    pub k_values: Vec<usize>,
    /// Defaults to 2 ln(n) / n.
    #[arg(long)]
    pub p_intra: Option<f64>,
    #[command(flatten)]
    pub flags: DetectorFlags,
    /// Detector runs (fresh graphs) per bridge count.
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    Bernoulli,
    Gaussian,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct DistFlags {
    #[arg(long, value_enum, default_value_t = DistKind::Bernoulli)]
    pub dist: DistKind,
    /// Bernoulli success probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodFlag {
    PositionProduct,
    SumSamples,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct ScgfFlags {
    #[command(flatten)]
    pub dist: DistFlags,
    /// Summands per sample.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub t_step: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = MethodFlag::PositionProduct)]
    pub method: MethodFlag,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[command(flatten)]
    pub scgf: ScgfFlags,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub x_step: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorFlag {
    Direct,
    Tilted,
}

#[derive(Debug, Args, Serialize)]
pub struct DecayArgs {
    #[command(flatten)]
    pub dist: DistFlags,
    /// Threshold on the sample mean.
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, value_delimiter = ',', default_value = "20,50,100")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = EstimatorFlag::Direct)]
    pub estimator: EstimatorFlag,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiffusionArgs {
    /// Comma-separated starting positions; one particle each.
    #[arg(long, value_delimiter = ',', default_value = "1.0", allow_negative_numbers = true)]
    pub initial: Vec<f64>,
    /// `zero`, `linear:SLOPE` or `cubic:COEFF`, applied to eta_i - eta_j.
    #[arg(long, default_value = "zero", value_parser = parse_force)]
    pub pair_force: crate::largedev::ForceLaw,
    /// Same syntax, applied to eta_i.
    #[arg(long, default_value = "linear:-1", value_parser = parse_force)]
    pub self_force: crate::largedev::ForceLaw,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_force(s: &str) -> Result<crate::largedev::ForceLaw, String> {
    use crate::largedev::ForceLaw;
    let (kind, value) = s.split_once(':').unwrap_or((s, ""));
    let number = || value.parse::<f64>().map_err(|e| format!("bad coefficient in `{s}`: {e}"));
    match kind {
        "zero" if value.is_empty() => Ok(ForceLaw::Zero),
        "linear" => Ok(ForceLaw::Linear { slope: number()? }),
        "cubic" => Ok(ForceLaw::Cubic { coeff: number()? }),
        _ => Err(format!("unknown force `{s}`; expected zero, linear:SLOPE or cubic:COEFF")),
    }
}

#[derive(Debug, Subcommand, Serialize)]
pub enum LdpCommand {
    /// Empirical scaled cumulant generating function on a t grid.
    Scgf(ScgfFlags),
    /// Rate function by Legendre transform of the empirical SCGF.
    Rate(RateArgs),
    /// Tail-probability decay rates against the closed form.
    Decay(DecayArgs),
    /// Reweighted versus direct estimate of E[sum_i eta_i(T)^2].
    Diffusion(DiffusionArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFlag {
    Rotation,
    Doubling,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableFlag {
    X,
    Sin,
    Const,
}

#[derive(Debug, Args, Serialize)]
pub struct ErgodicArgs {
    #[arg(long, value_enum)]
    pub map: MapFlag,
    /// Rotation angle; defaults to the golden mean.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = ObservableFlag::X)]
    pub observable: ObservableFlag,
    /// Value of the constant observable.
    #[arg(long, default_value_t = 1.0)]
    pub constant: f64,
    /// Comma-separated, strictly increasing orbit lengths.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long)]
    pub seed: u64,
    /// Curve CSV; the fitted exponent goes to `<stem>.fit.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    /// Cross-check against exhaustive enumeration (at most 20 vertices).
    #[arg(long)]
    pub brute_force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a subcommand that ran to completion.
pub(crate) enum Status {
    Ok,
    Flagged(String),
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Flagged(reason)) => {
            eprintln!("warning: result flagged unreliable: {reason}");
            EXIT_FLAGGED
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_COMPUTATION
        }
    }
}

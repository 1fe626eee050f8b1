use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// LASSO regularization paths with single-fit leave-one-out error
/// estimates, synthetic-ensemble experiments, and analytic curves.
#[derive(Debug, Parser, Serialize)]
#[command(name = "loocv", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Fit a penalty path on CSV data and estimate leave-one-out errors.
    Path(PathArgs),
    /// Sweep synthetic ensembles over sizes and samples.
    Synth(SynthArgs),
    /// Emit analytic large-system curves for the Gaussian ensemble.
    Replica(ReplicaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorArg {
    /// The l1-penalized estimate.
    #[value(name = "1")]
    Type1,
    /// The least-squares refit on the active set.
    #[value(name = "2")]
    Type2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct CommonOutput {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: FormatArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverFlags {
    /// Active-set classification threshold.
    #[arg(long, default_value_t = 1e-6)]
    pub active_threshold: f64,
    /// KKT residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Damping for fixed-point iterations, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PathArgs {
    /// Design matrix CSV (M rows x N columns, headerless).
    #[arg(long = "a", value_name = "FILE")]
    pub a: PathBuf,
    /// Response CSV (M rows, one column).
    #[arg(long = "y", value_name = "FILE")]
    pub y: PathBuf,
    /// Skip one header line in both files.
    #[arg(long)]
    pub header: bool,
    /// Center columns of A and scale them to unit norm before fitting.
    #[arg(long)]
    pub standardize: bool,
    /// Penalty grid: `auto:K`, `log:HI:LO:K`, or a comma list.
    #[arg(long)]
    pub lambdas: String,
    #[arg(long, value_enum, default_value = "1")]
    pub estimator: EstimatorArg,
    /// approx1 | approx2 | naive | kfold:K
    #[arg(long, default_value = "approx1")]
    pub method: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub out: CommonOutput,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Comma list of system sizes N.
    #[arg(long = "n", value_name = "N[,N...]")]
    pub n: String,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub rho_hat: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_xi2: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Penalty grid: `log:HI:LO:K` or a comma list (shared across samples).
    #[arg(long)]
    pub lambdas: String,
    #[arg(long, value_enum, default_value = "1")]
    pub estimator: EstimatorArg,
    /// Also run the brute-force leave-one-out oracle per sample.
    #[arg(long)]
    pub naive: bool,
    /// Guard on total work, counted as N * M * samples cells.
    #[arg(long, default_value_t = 1e9)]
    pub max_cells: f64,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub out: CommonOutput,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplicaArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub rho_hat: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_xi2: f64,
    /// Penalty grid: `log:HI:LO:K` or a comma list.
    #[arg(long)]
    pub lambdas: String,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    #[command(flatten)]
    pub out: CommonOutput,
}

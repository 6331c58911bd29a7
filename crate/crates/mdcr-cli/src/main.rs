//! `mdcr`: generation, estimation pipeline, sweeps and bound tables for
//! multi-domain causal representation learning on unpaired data.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 no shared node
//! found with `--require-shared`, 4 numeric/stage failure.

mod commands;
mod dataio;
mod manifest;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use mdcr::ica::RankMatrix;
use mdcr::matching::Correction;

#[derive(Parser)]
#[command(name = "mdcr", version, about = "Multi-domain causal representation learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random model and unpaired per-domain sample CSVs.
    Generate(GenerateArgs),
    /// Run the estimation pipeline on per-domain CSVs (or a model, with
    /// --oracle).
    Pipeline(PipelineArgs),
    /// Run a seeded trial sweep over a (m, n) grid.
    Sweep(SweepArgs),
    /// Tabulate the false-discovery probability bound.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrectionArg {
    Bonferroni,
    None,
}

impl From<CorrectionArg> for Correction {
    fn from(value: CorrectionArg) -> Self {
        match value {
            CorrectionArg::Bonferroni => Correction::Bonferroni,
            CorrectionArg::None => Correction::None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RankMatrixArg {
    Cov,
    Gram,
}

impl From<RankMatrixArg> for RankMatrix {
    fn from(value: RankMatrixArg) -> Self {
        match value {
            RankMatrixArg::Cov => RankMatrix::Covariance,
            RankMatrixArg::Gram => RankMatrix::Gram,
        }
    }
}

/// Named built-in configurations.
#[derive(Clone, Copy, ValueEnum)]
pub enum Preset {
    /// Two domains, three shared latents, d = 30.
    TwoDomain,
    /// Three domains, same layout.
    ThreeDomain,
    /// Four domains, five shared latents, d = 48.
    FourDomainWide,
    /// Three domains with duplicated error distributions (violates the
    /// distinctness assumption).
    DuplicateNoise,
    /// Two domains without planted pure children (violates the sparsity
    /// assumption behind graph recovery).
    NoPureChildren,
}

#[derive(Args)]
struct GenerateArgs {
    /// Configuration file (JSON). Mutually exclusive with --preset.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the per-domain sample size.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Directory containing domain_*.csv files.
    #[arg(long, conflicts_with = "csv")]
    data: Option<PathBuf>,
    /// Explicit domain CSV paths (repeat per domain, order = domain order).
    #[arg(long)]
    csv: Vec<PathBuf>,
    /// Ground-truth model JSON; enables scoring (and required by --oracle).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Run the exact path on the model instead of estimating from data.
    #[arg(long, requires = "model")]
    oracle: bool,
    /// Input CSVs have samples as rows and variable labels in the header.
    #[arg(long)]
    transpose: bool,
    /// Singular-value threshold for rank decisions.
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    /// Matching test level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "bonferroni")]
    correction: CorrectionArg,
    /// Threshold on recovered coefficients (defaults to --gamma).
    #[arg(long)]
    edge_threshold: Option<f64>,
    /// Matrix the rank threshold applies to.
    #[arg(long, value_enum, default_value = "cov")]
    rank_matrix: RankMatrixArg,
    #[arg(long, default_value_t = 5)]
    ica_restarts: usize,
    #[arg(long, default_value_t = 1e-6)]
    ica_tol: f64,
    #[arg(long, default_value_t = 200)]
    ica_max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit with code 3 when no shared node is discovered.
    #[arg(long)]
    require_shared: bool,
    /// Worker threads (default: MDCR_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (JSON). Mutually exclusive with --preset.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Output directory (reuse to resume an interrupted sweep).
    #[arg(long)]
    out: PathBuf,
    /// Override the configured trial count per cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write SVG summary charts.
    #[arg(long)]
    svg: bool,
    /// Allow greedy scoring beyond the enumeration cap.
    #[arg(long)]
    approx: bool,
    /// Worker threads (default: MDCR_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000,2500,5000,10000,25000")]
    n: Vec<usize>,
    /// Separation constants kappa, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    kappa: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Wrongly-matched component counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    e_sizes: Vec<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Classified command failure, mapped onto the exit-code contract.
pub enum CliError {
    /// Exit 2: bad usage, unreadable or inconsistent configuration/input.
    Config(String),
    /// Exit 3: pipeline found no shared node and --require-shared was set.
    NoShared,
    /// Exit 4: a numeric stage failed (the message names the stage).
    Stage(String),
    /// Exit 1: I/O or internal error outside the contract categories.
    Other(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(value: anyhow::Error) -> Self {
        CliError::Other(value)
    }
}

pub type CliResult = Result<(), CliError>;

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let count = match threads {
        Some(t) if t > 0 => t,
        Some(_) => return Err(CliError::Config("--threads must be positive".into())),
        None => match std::env::var("MDCR_THREADS") {
            Ok(value) => value
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| CliError::Config(format!("invalid MDCR_THREADS: {value}")))?,
            Err(_) => 0, // rayon default: all cores
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if count > 0 {
        builder = builder.num_threads(count);
    }
    builder.build().map_err(|e| CliError::Other(e.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Pipeline(args) => commands::pipeline::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Bounds(args) => commands::bounds::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NoShared) => {
            eprintln!("no shared latent node discovered");
            ExitCode::from(3)
        }
        Err(CliError::Stage(msg)) => {
            eprintln!("stage failure: {msg}");
            ExitCode::from(4)
        }
        Err(CliError::Other(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

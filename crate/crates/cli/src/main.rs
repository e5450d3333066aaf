//! `entgap`: evaluate the four-factor entropy inequality from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use entgap::LogBase;

#[derive(Debug, Parser)]
#[command(
    name = "entgap",
    version,
    about = "Entropy-inequality counterexamples, deformations, scans and searches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Canonical counterexample with its product and entangled decompositions.
    Counterexample,
    /// Counterexample with tilted, pairwise distinct Schmidt coefficients.
    Deform,
    /// Seeded batch of Haar-random states with their SVD decompositions.
    Scan,
    /// Evaluate a state file with its SVD decomposition.
    Check,
    /// Maximize the right-hand side over degenerate Schmidt blocks.
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// Local dimension d of every factor.
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,

    /// Deformation strength in (0, 1); required by `deform`.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Number of scan samples.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,

    /// Master seed for scan and maximize.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Entropy logarithm base.
    #[arg(long = "log-base", global = true, value_enum, default_value = "e")]
    log_base: BaseArg,

    /// Reconstruction-residual gate for decompositions.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// State file (JSON with `dims` and `amplitudes`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Comma-separated factor dimensions for `scan`; defaults to four copies of --dim.
    #[arg(long, global = true, value_delimiter = ',')]
    shape: Option<Vec<usize>>,

    /// Random restarts for `maximize`.
    #[arg(long, global = true, default_value_t = 20)]
    restarts: usize,

    /// Rotation sweeps per restart for `maximize`.
    #[arg(long, global = true, default_value_t = 50)]
    sweeps: usize,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dim: usize,
    pub eps: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub log_base: LogBase,
    pub tol: Option<f64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub shape: Option<Vec<usize>>,
    pub restarts: usize,
    pub sweeps: usize,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<entgap::Error> for CliError {
    fn from(e: entgap::Error) -> Self {
        // decompositions are always built internally here, so a failed
        // reconstruction gate is a numerical problem, not a user one
        if e.is_numerical() || matches!(e, entgap::Error::DecompositionMismatch { .. }) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = cli.opts;
    let config = RunConfig {
        dim: o.dim,
        eps: o.eps,
        samples: o.samples,
        seed: o.seed,
        log_base: match o.log_base {
            BaseArg::E => LogBase::Natural,
            BaseArg::Two => LogBase::Two,
        },
        tol: o.tol,
        input: o.input,
        output: o.output,
        format: o.format,
        shape: o.shape,
        restarts: o.restarts,
        sweeps: o.sweeps,
    };
    let result = match cli.command {
        Command::Counterexample => commands::run_counterexample(&config),
        Command::Deform => commands::run_deform(&config),
        Command::Scan => commands::run_scan(&config),
        Command::Check => commands::run_check(&config),
        Command::Maximize => commands::run_maximize(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entgap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

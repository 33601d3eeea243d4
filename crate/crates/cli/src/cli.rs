//! Argument surface and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "grandsim", version, about = "Guesswork exponent curves and GRAND eavesdropper sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Settings file (or a bundled config name); flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for CSV, manifest and SVG files
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed for trial randomness
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Seed of the random code draw
    #[arg(long = "code-seed", global = true)]
    pub code_seed: Option<u64>,

    /// Monte Carlo trials per grid point
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Number of channel grid points
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// Also write SVG plots
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,

    /// Worker threads (0 = auto)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic curves: entropy rates, success-probability estimates and
    /// confident-query exponents over a BSC grid
    Exponents {
        /// Code rate R
        #[arg(long)]
        rate: Option<f64>,
        /// Block lengths, comma separated
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        /// Grid start (defaults to the capacity point of R)
        #[arg(long)]
        p_min: Option<f64>,
        /// Grid end (defaults to the min-capacity point of R)
        #[arg(long)]
        p_max: Option<f64>,
    },
    /// Monte Carlo sweep over (flip probability, abandonment threshold)
    Simulate,
    /// Theoretical vs empirical confident-query thresholds
    Thresholds {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Explicit grid, comma separated
        #[arg(long = "p-grid", value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        /// Conditional-success level defining the empirical threshold
        #[arg(long)]
        target: Option<f64>,
    },
    /// Brute-force validation suites (ML equivalence, guesswork moments,
    /// conjugate oracle)
    OracleCheck,
}

/// Errors mapped onto process exit codes: 2 for config problems, 3 for
/// partial data failures, 1 otherwise.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Partial(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Partial(_) => 3,
            CliError::Failure(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Partial(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("io error: {e}"))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads > 0 {
            // ignore the error when a pool already exists (tests, reruns)
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    match &cli.command {
        Command::Exponents { .. } => crate::cmd_exponents::run(&cli),
        Command::Simulate => crate::cmd_simulate::run(&cli),
        Command::Thresholds { .. } => crate::cmd_thresholds::run(&cli),
        Command::OracleCheck => crate::oracle::run(&cli),
    }
}

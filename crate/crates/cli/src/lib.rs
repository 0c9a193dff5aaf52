//! Command-line front end: configuration ingestion, experiment execution,
//! and deterministic figure/table emission.

pub mod commands;
pub mod config;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Errors carrying their process exit code: 2 config, 3 I/O, 4 numeric.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<propsim_core::Error> for CliError {
    fn from(e: propsim_core::Error) -> Self {
        use propsim_core::Error as E;
        match e {
            E::InvalidData(_) | E::UnknownScenario(_) | E::Domain(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "propsim",
    version,
    about = "Proportional treatment effect simulation lab"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo experiment described by a JSON config.
    Simulate(SimulateArgs),
    /// Render a figure from run outputs.
    Plot {
        #[command(subcommand)]
        kind: PlotCommand,
    },
    /// Inspect the built-in scenario catalog.
    Scenarios {
        #[command(subcommand)]
        action: ScenariosCommand,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the configured replicate count.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the worker count (0 = automatic; default also honors
    /// PROPSIM_WORKERS).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory for replicates.csv, summary.json, summary.csv, and
    /// config-echo.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum PlotCommand {
    /// Rejection-rate curves per control mean from a cross summary CSV.
    Power {
        /// summary.csv of a cross-sectional run.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Ranked estimate/CI display from a replicates CSV.
    Zipper {
        /// replicates.csv of either experiment.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Sort key: largest standardized bias or smallest p first.
        #[arg(long, value_enum, default_value_t = SortArg::P)]
        sort: SortArg,
        /// Fraction of records shown, in (0, 1].
        #[arg(long, default_value_t = 0.25)]
        fraction: f64,
        /// True effect value for bias and coverage.
        #[arg(long, default_value_t = 0.0)]
        truth: f64,
        /// Row filters `column=value`, repeatable (e.g. `--where scenario=A
        /// --where hypothesis=null`).
        #[arg(long = "where")]
        filters: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SortArg {
    /// standardized bias, largest first
    Bias,
    /// p-value, smallest first
    P,
}

#[derive(Debug, Subcommand)]
pub enum ScenariosCommand {
    /// Print the scenario catalog as JSON.
    List {
        /// Visit schedule in months (comma separated), e.g. 0,6,12,18.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
    },
}

/// Execute a parsed command; printed output goes to stdout.
pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Plot { kind } => commands::plot(&kind),
        Command::Scenarios { action } => commands::scenarios(&action),
    }
}

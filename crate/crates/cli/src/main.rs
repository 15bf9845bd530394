//! Command-line front end: single-dataset estimation, analytical asymptotics,
//! risk sweeps, and one-command regeneration of the reference tables as CSV.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{bias, cov, estimate, reproduce, risk};
use output::{write_csv, write_json};

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "grouptest",
    version,
    about = "Two-trait pooled-testing estimation: MLE (EM on the boundary), restricted \
             method of moments, Burrows shrinkage, asymptotics, and exact finite-sample risk"
)]
struct Cli {
    /// Output format for results printed to stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads for enumeration sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Decimal places for floating values in CSV output (default 4;
    /// reproduce targets default to their table's printed precision)
    #[arg(long, global = true)]
    precision: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate prevalence from one observed set of pool counts
    Estimate(estimate::EstimateArgs),
    /// Exact or Monte-Carlo finite-sample risk of an estimator at a true prevalence
    Risk(risk::RiskArgs),
    /// Closed-form large-sample covariance matrix of the estimators
    Cov(cov::CovArgs),
    /// First-order bias coefficients of the estimators
    Bias(bias::BiasArgs),
    /// Regenerate a reference table (or the figure data series) as CSV files
    Reproduce(reproduce::ReproduceArgs),
}

/// Usage errors exit with 2, runtime failures with 1.
pub enum CliError {
    Usage(String),
    Run(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn run(msg: impl Into<String>) -> Self {
        CliError::Run(msg.into())
    }
}

pub type CmdResult = Result<(output::Table, output::Metadata), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let precision = cli.precision;
    let result = match cli.command {
        Command::Estimate(args) => estimate::run(args),
        Command::Risk(args) => risk::run(args),
        Command::Cov(args) => cov::run(args),
        Command::Bias(args) => bias::run(args),
        Command::Reproduce(args) => {
            return match reproduce::run(args, precision, cli.threads) {
                Ok(()) => ExitCode::SUCCESS,
                Err(CliError::Usage(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
                Err(CliError::Run(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::FAILURE
                }
            };
        }
    };
    match result {
        Ok((table, metadata)) => {
            let stdout = std::io::stdout().lock();
            let written = match cli.format {
                Format::Csv => write_csv(stdout, &table, precision.unwrap_or(4)),
                Format::Json => write_json(stdout, &table, &metadata),
            };
            if let Err(e) = written {
                eprintln!("error: failed to write output: {e}");
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

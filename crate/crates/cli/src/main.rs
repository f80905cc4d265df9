mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "slq", version, about = "Eigenvalues of Sturm–Liouville problems with distributional coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Problem configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Highest eigenvalue index, overriding the configuration.
    #[arg(long)]
    n_max: Option<usize>,
    /// Relative integration tolerance, overriding the configuration.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate eigenvalues.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Write eigenfunction samples to PREFIX_n<k>.csv.
        #[arg(long, value_name = "PREFIX")]
        dump: Option<PathBuf>,
        /// Sample count for eigenfunction dumps.
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Run verification suites; exits nonzero on any failed assertion.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suites: chains, oscillation, derivatives, mollify, jumps, transmission.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
    },
    /// Eigenvalues over a family of boundary conditions.
    Scan {
        #[command(flatten)]
        common: Common,
        /// `AxB` grid over (α, β); selects the grid scan when given.
        #[arg(long)]
        grid: Option<String>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<slq_core::Error> for Failure {
    fn from(e: slq_core::Error) -> Self {
        Failure::Solver(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(e.into())
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SLQ_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("SLQ_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("SLQ_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> std::result::Result<bool, Failure> {
    configure_threads().map_err(Failure::Config)?;
    match cli.command {
        Command::Solve { common, dump, samples } => {
            let p = commands::load(&common)?;
            commands::solve(&p, common.out.as_deref(), dump.as_deref(), samples)?;
            Ok(true)
        }
        Command::Verify { common, suite } => {
            let p = commands::load(&common)?;
            commands::verify(&p, &suite, common.out.as_deref())
        }
        Command::Scan { common, grid } => {
            let p = commands::load(&common)?;
            commands::scan(&p, grid.as_deref(), common.out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e:#}");
            ExitCode::from(3)
        }
    }
}

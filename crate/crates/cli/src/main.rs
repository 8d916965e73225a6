//! `mixlab`: batch experiments on chains with complete connections.
//!
//! Every command reads a JSON config, writes CSV/JSON into `--out`, and
//! places a `<file>.meta.json` sidecar next to each output. Exit codes:
//! 0 success, 2 configuration error, 3 numerical failure, 4 bound violated.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "mixlab", version, about = "Couplings, renewal chains and correlation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for stochastic commands; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true, env = "MIXLAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Sample a trajectory of the chain.
    Simulate,
    /// Sample a maximally coupled pair and estimate disagreement rates.
    Couple,
    /// Return probabilities, first-return law and decay classification.
    Renewal,
    /// Measure correlations and check them against the upper bounds.
    Verify,
    /// Decay regime of the continuity sequence.
    Classify,
    /// Normalize a finite-memory potential.
    Normalize,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Couple => "couple",
            Command::Renewal => "renewal",
            Command::Verify => "verify",
            Command::Classify => "classify",
            Command::Normalize => "normalize",
        }
    }
}

/// A failed run with its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub const CONFIG: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const VIOLATION: u8 = 4;

    pub fn config(message: impl Into<String>) -> Self {
        Failure { code: Self::CONFIG, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Failure { code: Self::NUMERIC, message: message.into() }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        Failure { code: Self::VIOLATION, message: message.into() }
    }
}

impl From<mixlab::Error> for Failure {
    fn from(e: mixlab::Error) -> Self {
        use mixlab::Error as E;
        let config = e.is_config_error()
            || matches!(e, E::InfiniteMemory(_) | E::NotNormalized { .. } | E::BudgetExceeded { .. });
        Failure { code: if config { Self::CONFIG } else { Self::NUMERIC }, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Settings shared by every command.
pub struct Run {
    pub loaded: config::Loaded,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub exec: mixlab::par::Execution,
}

impl Run {
    pub fn seed(&self) -> Result<u64, Failure> {
        self.seed.ok_or_else(|| Failure::config("this command needs a seed (--seed or \"seed\" in the config)"))
    }
}

fn setup_threads(threads: Option<usize>) -> Result<mixlab::par::Execution, Failure> {
    use mixlab::par::Execution;
    match threads {
        Some(0) => Err(Failure::config("--threads must be at least 1")),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::config(format!("cannot start {n} threads: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::default()),
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    let path = cli.config.ok_or_else(|| Failure::config("--config is required"))?;
    let loaded = config::load(&path)?;
    let seed = cli.seed.or(loaded.config.seed);
    let exec = setup_threads(cli.threads)?;
    let run = Run { loaded, out: cli.out, seed, exec };
    let name = cli.command.name();
    match cli.command {
        Command::Simulate => commands::simulate(&run, name),
        Command::Couple => commands::couple(&run, name),
        Command::Renewal => commands::renewal(&run, name),
        Command::Verify => commands::verify(&run, name),
        Command::Classify => commands::classify(&run, name),
        Command::Normalize => commands::normalize(&run, name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mixlab: {e}");
            ExitCode::from(e.code)
        }
    }
}

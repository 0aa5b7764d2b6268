//! `srht`: batch driver for data generation, detector training, evaluation,
//! worst-case recovery and numerical diagnostics.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration error, 3 solver
//! budget exhausted (outputs are still written), 4 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use srht::diagnostics::DiagKind;
use srht::pipeline::Method;

use config::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver budget exhausted: {0}")]
    Budget(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<srht::Error> for CliError {
    fn from(e: srht::Error) -> Self {
        use srht::Error as E;
        match e {
            E::Config(_) | E::Argument(_) | E::Dimension { .. } => CliError::Config(e.to_string()),
            E::Io { .. } | E::Json(_) | E::Parse { .. } => CliError::Io(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "srht", version, about = "Sinkhorn-robust hypothesis testing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, env = "SRHT_CONFIG")]
    config: Option<PathBuf>,
    /// Master seed; replaces every seed in the configuration.
    #[arg(long, global = true, env = "SRHT_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "SRHT_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "SRHT_METHOD")]
    method: Option<MethodArg>,
    /// Branch-and-bound node budget.
    #[arg(long, global = true, env = "SRHT_BUDGET_NODES")]
    budget_nodes: Option<usize>,
    /// Branch-and-bound time budget in seconds.
    #[arg(long, global = true, env = "SRHT_BUDGET_SECS")]
    budget_secs: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate (or load) the dataset and write train/test CSVs.
    Gen,
    /// Train a detector, optionally cross-validating (ε, ρ̄).
    Train,
    /// Evaluate a trained detector on the test split.
    Eval,
    /// Write importance-weighted worst-case clouds for both hypotheses.
    WorstCase,
    /// Run a numerical property sweep.
    Diag {
        #[arg(value_enum)]
        which: DiagArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Cvar,
    Genfun,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Cvar => Method::Cvar,
            MethodArg::Genfun => Method::Genfun,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiagArg {
    Prop1,
    Prop4,
    Prop5,
    Consistency,
}

impl From<DiagArg> for DiagKind {
    fn from(d: DiagArg) -> Self {
        match d {
            DiagArg::Prop1 => DiagKind::Prop1,
            DiagArg::Prop4 => DiagKind::Prop4,
            DiagArg::Prop5 => DiagKind::Prop5,
            DiagArg::Consistency => DiagKind::Consistency,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        method: cli.method.map(Method::from),
        budget_nodes: cli.budget_nodes,
        budget_secs: cli.budget_secs,
    };
    let load = || -> Result<config::RunConfig, CliError> {
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| CliError::Config("--config (or SRHT_CONFIG) is required for this command".into()))?;
        config::RunConfig::load(path)?.resolve(&overrides)
    };
    match cli.command {
        Command::Gen => commands::gen(&load()?),
        Command::Train => commands::train(&load()?),
        Command::Eval => commands::eval(&load()?),
        Command::WorstCase => commands::worst_case(&load()?),
        Command::Diag { which } => {
            let cfg = match &cli.config {
                Some(_) => Some(load()?),
                None => None,
            };
            let out = overrides.out.clone().or_else(|| cfg.as_ref().map(|c| c.out.clone()));
            commands::diag(which.into(), cfg.as_ref(), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("srht: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

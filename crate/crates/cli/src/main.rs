//! `afd`: collect, split, train, analyze, evaluate and correlate Articles for
//! Deletion discussions.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;

/// Harvest and analyze Wikipedia Articles for Deletion discussions.
#[derive(Debug, Parser)]
#[command(name = "afd", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML config file (default: ./afd.toml when present).
    #[arg(long, global = true, env = "AFD_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch and parse AfD log pages into discussion records.
    Collect(commands::collect::CollectArgs),
    /// Build stratified train/validation/test splits from collected records.
    BuildDataset(commands::dataset::BuildArgs),
    /// Per-label counts and length statistics of a dataset.
    Stats(commands::dataset::StatsArgs),
    /// Train the TF-IDF logistic-regression baseline.
    TrainBaseline(commands::train::TrainArgs),
    /// Analyze one discussion (by URL) or a piece of text.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Score predictions against gold labels.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Correlate per-sentence sentiment or stance with outcomes.
    Correlate(commands::evaluate::CorrelateArgs),
}

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NO_CREDENTIALS: u8 = 3;

pub trait WithCode<T> {
    fn code(self, code: u8) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> WithCode<T> for Result<T, E> {
    fn code(self, code: u8) -> CmdResult<T> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

pub fn fail<T>(code: u8, msg: impl fmt::Display) -> CmdResult<T> {
    Err(Failure { code, error: anyhow::anyhow!("{msg}") })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    let config = match Config::load(cli.global.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let ctx = commands::Ctx { config, format: cli.global.format };
    let result = match cli.command {
        Command::Collect(a) => commands::collect::run(&ctx, a),
        Command::BuildDataset(a) => commands::dataset::build(&ctx, a),
        Command::Stats(a) => commands::dataset::stats(&ctx, a),
        Command::TrainBaseline(a) => commands::train::run(&ctx, a),
        Command::Analyze(a) => commands::analyze::run(&ctx, a),
        Command::Evaluate(a) => commands::evaluate::evaluate(&ctx, a),
        Command::Correlate(a) => commands::evaluate::correlate(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

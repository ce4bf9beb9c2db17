//! `moneygas`: simulate, solve, fit and measure inequality from the command line.
//!
//! Data files are two-column CSV, reports are JSON, diagnostics go to stderr.

mod config;
mod fit;
mod fp;
mod gini;
mod output;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "moneygas", version, about = "Statistical mechanics of money and income")]
struct Cli {
    /// TOML file with [simulate], [fp], [fit] or [gini] tables keyed by flag name
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More diagnostics (-v debug, -vv trace)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only warnings and errors
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Simulate(simulate::SimulateArgs),
    Fp(fp::FpArgs),
    Fit(fit::FitArgs),
    Gini(gini::GiniArgs),
}

fn dispatch(cli: Cli) -> Result<()> {
    let table = cli.config.as_deref().map(config::load).transpose()?;
    let table = table.as_ref();
    match cli.command {
        Command::Simulate(args) => {
            let args = config::merge(args, table, "simulate")?;
            let Some(seed) = args.seed else {
                Cli::command()
                    .error(ErrorKind::MissingRequiredArgument, "simulate needs --seed (on the command line or in the config)")
                    .exit()
            };
            simulate::run_simulate(args, seed)
        }
        Command::Fp(args) => fp::run_fp(config::merge(args, table, "fp")?),
        Command::Fit(args) => fit::run_fit(config::merge(args, table, "fit")?),
        Command::Gini(args) => gini::run_gini(config::merge(args, table, "gini")?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Warn,
        (false, 0) => log::LevelFilter::Info,
        (false, 1) => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    // Built without reading the environment: runs depend on flags and config only.
    env_logger::Builder::new().filter_level(level).format_timestamp(None).target(env_logger::Target::Stderr).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}

//! `sturmian`: batch experiments over Sturmian slopes.
//!
//! Every subcommand resolves a configuration (file, then flags), validates
//! it before touching any slope, and writes a report that embeds the
//! resolved configuration.

mod commands;
mod config;
mod emit;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Module, Overrides};

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "sturmian", version, about = "Exact experiments on Sturmian words and their slopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite against independent oracles
    Verify(Common),
    /// Growth classification of the slope's entries
    Classify(Common),
    /// Prefixes, substitution words and branching indices
    Words(Common),
    /// Repetitivity, repulsiveness and power tables
    Complexity(Common),
    /// Spectral distances, their regularity and summability
    Metric(Common),
    /// Approximation queries and cover dimension estimates
    Dimension(Common),
}

#[derive(clap::Args)]
struct Common {
    /// TOML experiment file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit
    #[arg(long)]
    print_config: bool,
    #[command(flatten)]
    overrides: Overrides,
}

fn resolve(module: Module, args: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(module),
    };
    cfg.module = module;
    cfg.apply(&args.overrides);
    cfg.validate()?;
    Ok(cfg)
}

fn exit_for(e: &sturmian_core::Error) -> u8 {
    use sturmian_core::Error::*;
    match e {
        BudgetExceeded { .. } => EXIT_BUDGET,
        InvalidEntries(_) | InvalidArgument(_) | NotNormalized | InsufficientDepth { .. } => EXIT_USAGE,
        _ => EXIT_CHECK,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (module, args) = match &cli.command {
        Command::Verify(a) => (Module::Verify, a),
        Command::Classify(a) => (Module::Classify, a),
        Command::Words(a) => (Module::Words, a),
        Command::Complexity(a) => (Module::Complexity, a),
        Command::Metric(a) => (Module::Metric, a),
        Command::Dimension(a) => (Module::Dimension, a),
    };
    let cfg = match resolve(module, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sturmian {}: {e}", module.as_str());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if args.print_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    let cf = match cfg.slope.build() {
        Ok(cf) => cf,
        Err(e) => {
            eprintln!("sturmian {}: {e}", module.as_str());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let (report, code) = match module {
        Module::Verify => {
            let (report, _) = verify::run(&cf, &cfg);
            let code = verify::status(&report) as u8;
            if let Some(name) = report.summary["first_failure"].as_str() {
                eprintln!("sturmian verify: first failing check: {name}");
            }
            (report, code)
        }
        _ => {
            let run = match module {
                Module::Classify => commands::classify,
                Module::Words => commands::words,
                Module::Complexity => commands::complexity,
                Module::Metric => commands::metric,
                Module::Dimension => commands::dimension,
                Module::Verify => unreachable!(),
            };
            match run(&cf, &cfg) {
                Ok(r) => (r, 0),
                Err(e) => {
                    eprintln!("sturmian {}: {e}", module.as_str());
                    return ExitCode::from(exit_for(&e));
                }
            }
        }
    };
    if let Err(e) = emit::emit(&report) {
        eprintln!("sturmian {}: cannot write output: {e}", module.as_str());
        return ExitCode::from(EXIT_CHECK);
    }
    ExitCode::from(code)
}

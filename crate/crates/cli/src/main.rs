//! `ptlab`: JSON/CSV front end for the ptlab library.

mod classify;
mod construct;
mod convert;
mod count;
mod error;
mod grid;
mod io;
mod jordan;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ptlab::exec::Execution;
use ptlab::ToleranceConfig;

use crate::error::{CliError, CliResult};
use crate::io::{Format, Sink};

#[derive(Debug, Parser)]
#[command(name = "ptlab", version, about = "Build, classify and convert PT-symmetric, pseudo-Hermitian and generalized PT-symmetric matrices")]
struct Cli {
    /// Absolute residual tolerance.
    #[arg(long, global = true, default_value_t = ToleranceConfig::default().abs_tol)]
    tol_abs: f64,
    /// Relative residual tolerance.
    #[arg(long, global = true, default_value_t = ToleranceConfig::default().rel_tol)]
    tol_rel: f64,
    /// Seed for every randomized search.
    #[arg(long, global = true, env = "PTLAB_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run data-parallel work on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symmetry verdict, spectrum, Segre characteristics and metric existence.
    Classify(classify::Args),
    /// Build a matrix family member with its operator and metric.
    Construct(construct::Args),
    /// Evaluate a family over a parameter grid.
    Sweep(sweep::Args),
    /// Reproduce the real parameter counts.
    Count(count::Args),
    /// Convert between symmetry classes.
    Convert(convert::Args),
    /// Extract Jordan chains.
    Jordan(jordan::Args),
}

pub struct Ctx {
    pub tol: ToleranceConfig,
    pub seed: u64,
    pub exec: Execution,
    pub sink: Sink,
}

fn run(cli: Cli) -> CliResult<()> {
    let tol = ToleranceConfig::new(cli.tol_abs, cli.tol_rel, ToleranceConfig::default().rank_tol_factor)?;
    let ctx = Ctx {
        tol,
        seed: cli.seed,
        exec: if cli.sequential { Execution::Sequential } else { Execution::Parallel },
        sink: Sink {
            format: cli.format,
            out: cli.out,
        },
    };
    match cli.command {
        Command::Classify(a) => classify::run(&ctx, a),
        Command::Construct(a) => construct::run(&ctx, a),
        Command::Sweep(a) => sweep::run(&ctx, a),
        Command::Count(a) => count::run(&ctx, a),
        Command::Convert(a) => convert::run(&ctx, a),
        Command::Jordan(a) => jordan::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

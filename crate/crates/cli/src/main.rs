//! `gcq`: command-line front end for the gcq-core experiments.
//!
//! Every run writes its data files and a `manifest.json` into `--out`. Exit codes: 0 on
//! success, 1 when a numerical check fails (the failing invariants are named on stderr),
//! 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{flag::FlagCmd, flow::FlowCmd, lab::LabCmd, polytope::PolytopeCmd, toric::ToricCmd};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "gcq",
    version,
    about = "Gelfand-Cetlin toric degeneration experiments"
)]
struct Cli {
    /// Output directory for data files and the run manifest.
    #[arg(long, global = true, default_value = "gcq-out")]
    out: PathBuf,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gelfand-Cetlin and Pluecker polytopes.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Toric potentials and section concentration.
    #[command(subcommand)]
    Toric(ToricCmd),
    /// Random flags, GC values and Pluecker coordinates.
    #[command(subcommand)]
    Flag(FlagCmd),
    /// Gradient-Hamiltonian flow on the n = 3 family.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Combined experiments.
    #[command(subcommand)]
    Lab(LabCmd),
}

fn dispatch(cli: &Cli) -> Result<Vec<String>, CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(error::usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| error::usage(format!("thread pool: {e}")))?;
    }
    match &cli.cmd {
        Command::Polytope(c) => commands::polytope::run(c, &cli.out),
        Command::Toric(c) => commands::toric::run(c, &cli.out),
        Command::Flag(c) => commands::flag::run(c, &cli.out),
        Command::Flow(c) => commands::flow::run(c, &cli.out),
        Command::Lab(c) => commands::lab::run(c, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(failed) if failed.is_empty() => ExitCode::SUCCESS,
        Ok(failed) => {
            for name in &failed {
                eprintln!("tolerance failure: {name}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("gcq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

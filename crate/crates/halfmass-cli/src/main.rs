//! Batch driver for the mass functionals: radius schedules, convergence
//! fits, and the validation suite, with CSV or JSONL output.

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

mod config;
mod output;
mod run;

/// Exit codes: 0 success, 1 validation failure, 2 configuration error.
#[derive(Parser)]
#[command(
    name = "halfmass",
    version,
    about = "Evaluate ADM, Hawking and isoperimetric masses on half-space model metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the metric family registry.
    Metrics,
    /// Evaluate functionals at a single radius.
    Evaluate(run::EvaluateArgs),
    /// Evaluate functionals over a radius schedule and fit convergence.
    Converge(run::ConvergeArgs),
    /// Evaluate the boundary-graph mass over a radius schedule.
    Graph(run::GraphArgs),
    /// Run the invariant suites against configured tolerances.
    Validate(run::ValidateArgs),
}

/// Options shared by every data-producing subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Configuration file (flags override its values).
    #[arg(long, value_name = "PATH")]
    config: Option<std::path::PathBuf>,

    /// Output format.
    #[arg(long, value_parser = ["csv", "jsonl"])]
    format: Option<String>,

    /// Output path (defaults to stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<std::path::PathBuf>,

    /// Quadrature order (defaults to 64 in dimension three, 32 above).
    #[arg(long)]
    order: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Metrics => {
            run::print_metrics();
            Ok(true)
        }
        Command::Evaluate(args) => run::evaluate(args),
        Command::Converge(args) => run::converge(args),
        Command::Graph(args) => run::graph(args),
        Command::Validate(args) => run::validate(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

//! `crnrealc`: compile, simulate, verify and analyze reaction networks that compute real numbers.
//!
//! Exit codes: 0 success, 2 input error, 3 integration failure, 4 verification failure,
//! 5 inconclusive or unstable stability verdict.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "crnrealc", version, about = "Compile and certify reaction networks computing real numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a number into a `.crn` file.
    Compile(CompileArgs),
    /// Simulate a `.crn` file from the all-zero state.
    Simulate(SimulateArgs),
    /// Check integrality, boundedness and real-time convergence.
    Verify(VerifyArgs),
    /// Locate the reachable fixed point and classify its stability.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Exact rational `n/d`.
    #[arg(long, group = "source")]
    rational: Option<String>,
    /// Integer polynomial such as `x^2 - 2`, or a file holding one.
    #[arg(long, group = "source")]
    poly: Option<String>,
    /// Arithmetic expression over rationals, `sqrt(..)` and `root(poly, lo, hi)`.
    #[arg(long, group = "source")]
    expr: Option<String>,
    /// The built-in transcendental construction.
    #[arg(long, group = "source")]
    transcendental: bool,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    source: Source,
    /// Isolating interval `lo,hi` for `--poly`; without it the smallest positive root is used.
    #[arg(long, requires = "poly")]
    interval: Option<String>,
    /// `auto` or a positive integer rate multiplier.
    #[arg(long)]
    speedup: Option<String>,
    /// Output `.crn` path; prints to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Tolerances {
    #[arg(long, default_value = "1e-10")]
    rel_tol: String,
    #[arg(long, default_value = "1e-12")]
    abs_tol: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    crn_file: PathBuf,
    #[arg(long, default_value = "20")]
    t_end: String,
    #[command(flatten)]
    tolerances: Tolerances,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    crn_file: PathBuf,
    /// Target value (rational, decimal or expression), or `manifest` to use the compiled claim.
    #[arg(long, default_value = "manifest")]
    target: String,
    #[arg(long, default_value = "20")]
    t_end: String,
    #[command(flatten)]
    tolerances: Tolerances,
    /// Write the convergence report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    crn_file: PathBuf,
    /// Simulation horizon used to reach the fixed point.
    #[arg(long, default_value = "50")]
    t_end: String,
    #[arg(long, default_value = "1e-9")]
    margin: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(a) => commands::compile(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Analyze(a) => commands::analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

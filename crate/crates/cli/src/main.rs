//! Command-line front end: dataset generation, design solving, benchmarking,
//! and report summaries over the odoem library.

mod benchmark;
mod config;
mod design;
mod emit;
mod error;
mod generate;
mod input;
mod report;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use error::{CliError, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "odoem",
    version,
    about = "Graph-regularized optimal design: generate datasets, solve designs, benchmark selection strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset CSV
    Generate(generate::Args),
    /// Solve a continuous or discrete design on a dataset
    Design(design::Args),
    /// Run selection strategies and write learning curves
    Benchmark(benchmark::Args),
    /// Summarize learning-curve CSVs
    Report(report::Args),
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Design(args) => design::run(args),
        Command::Benchmark(args) => benchmark::run(args),
        Command::Report(args) => report::run(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            err.print().expect("writing clap diagnostics");
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

mod cmd_bench;
mod cmd_ingest;
mod cmd_probe;
mod cmd_repro;
mod output;

use clap::{Parser, Subcommand};

/// Benchmark runner for electronic-nose template-matching classifiers.
///
/// Builds template libraries (from the public wind-tunnel dataset or a
/// synthetic generator), runs the probe panels and the seeded Monte Carlo
/// benchmark, and writes deterministic JSON/CSV reports.
#[derive(Parser)]
#[command(name = "enose-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a template library (synthetic or from a dataset directory).
    Ingest(cmd_ingest::IngestArgs),
    /// Run the seeded benchmark protocol with one classifier.
    Bench(cmd_bench::BenchArgs),
    /// Reproduce one of the probe panels with its default parameters.
    Repro(cmd_repro::ReproArgs),
    /// Classify a single signature with every classifier and dump all scores.
    Probe(cmd_probe::ProbeArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest::run(args),
        Command::Bench(args) => cmd_bench::run(args),
        Command::Repro(args) => cmd_repro::run(args),
        Command::Probe(args) => cmd_probe::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

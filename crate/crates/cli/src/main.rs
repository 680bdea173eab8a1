//! Command-line front end: detection, hotspot identification, benchmark
//! simulation, threshold-cache management, and a synthetic illustration
//! workflow, over CSV inputs with fully seeded reproducibility.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{cache, detect, hotspot, illustrate, simulate};

#[derive(Parser)]
#[command(
    name = "hotspot",
    version,
    about = "Joint and cross-series MOSUM change-point detection with hotspot identification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect change points and write detector traces per kind.
    Detect(detect::DetectArgs),
    /// Identify hotspots with the thresholding or confidence-interval rule.
    Hotspot(hotspot::HotspotArgs),
    /// Run a benchmark table over synthetic scenarios.
    Simulate(simulate::SimulateArgs),
    /// Inspect, precompute, or rebuild the critical-value cache.
    ThresholdCache(cache::CacheArgs),
    /// Generate a synthetic stress/sensing pair and run the full pipeline.
    Illustrate(illustrate::IllustrateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => detect::run(args),
        Command::Hotspot(args) => hotspot::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::ThresholdCache(args) => cache::run(args),
        Command::Illustrate(args) => illustrate::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

//! `nqs` — command-line driver for neural-quantum-state spin-chain
//! simulation.
//!
//! Each subcommand reads an optional `key=value` configuration file, applies
//! flag overrides, and writes its results to an output directory: numeric
//! artifacts (CSV tables, checkpoints, text scalars) are byte-reproducible
//! for a fixed configuration and seed, while wall-clock timings are confined
//! to `manifest.json`.

mod checkpoint;
mod commands;
mod config;
mod error;
mod model;
mod outdir;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{CommandKind, Overrides, RunConfig};
use error::{io_err, Result};

#[derive(Parser)]
#[command(name = "nqs", version, about = "Neural-quantum-state spin-chain toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Variational ground-state search.
    Gs(RunArgs),
    /// Real- or imaginary-time evolution of a variational state.
    Evolve(RunArgs),
    /// Apply a sequence of single-site gates to a variational state.
    Gate(RunArgs),
    /// Reconstruct a state from measurement snapshots.
    Tomo(RunArgs),
    /// Exact-diagonalization reference results.
    Exact(RunArgs),
    /// Draw Monte Carlo samples or measurement snapshots.
    Sample(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the `out` key).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the `seed` key).
    #[arg(long)]
    seed: Option<u64>,
    /// Markov-chain count (overrides the `chains` key).
    #[arg(long)]
    chains: Option<usize>,
    /// Replace the output directory if it already exists.
    #[arg(long)]
    force: bool,
    /// Extra key=value override, applied after the file (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Gs(a) => (CommandKind::Gs, a),
        Command::Evolve(a) => (CommandKind::Evolve, a),
        Command::Gate(a) => (CommandKind::Gate, a),
        Command::Tomo(a) => (CommandKind::Tomo, a),
        Command::Exact(a) => (CommandKind::Exact, a),
        Command::Sample(a) => (CommandKind::Sample, a),
    };
    if let Err(err) = run(kind, args) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(kind: CommandKind, args: &RunArgs) -> Result<()> {
    let file_text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| io_err(path, e))?),
        None => None,
    };
    let overrides = Overrides {
        out: args.out.clone(),
        seed: args.seed,
        chains: args.chains,
        force: args.force,
        set: args.set.clone(),
    };
    let cfg = RunConfig::assemble(kind, file_text.as_deref(), &overrides)?;
    commands::run(&cfg)
}

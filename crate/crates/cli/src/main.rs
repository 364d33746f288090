//! `circlab`: config-driven experiment runs with CSV/JSON outputs and a manifest per run.

mod commands;
mod config;
mod run;

use clap::{Parser, Subcommand};
use run::{Globals, UsageError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "circlab", version, about = "Monitored-circuit and random-circuit experiments")]
struct Cli {
    /// Master seed; overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides the config's `out` and `CIRCLAB_OUT`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entanglement observables of monitored Clifford circuits over an (L, p) grid.
    MiptScan { config: PathBuf },
    /// Finite-size collapse of scan output.
    Collapse {
        /// `summary.csv` or raw scan CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "i3")]
        observable: String,
        /// Bootstrap replicates for the error bars (raw input only).
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
        /// TOML file with collapse options.
        #[arg(long)]
        options: Option<PathBuf>,
    },
    /// Purification of a maximally mixed initial state.
    Purify { config: PathBuf },
    /// Single reference-qubit probe, `S(R)`.
    ProbeBeta { config: PathBuf },
    /// Two reference-qubit probes, `I2(R1:R2)`.
    ProbeEta { config: PathBuf },
    /// Heisenberg-chain spin correlations by typicality.
    Hydro { config: PathBuf },
    /// Random grid circuits: bitstring samples, Porter-Thomas and XEB.
    Sample { config: PathBuf },
    /// Re-runs the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let globals = Globals { seed: cli.seed, out: cli.out, threads: cli.threads };
    match dispatch(cli.command, &globals) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(command: Command, g: &Globals) -> anyhow::Result<()> {
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| UsageError::new(format!("thread pool: {e}")))?;
    }
    use commands::*;
    match command {
        Command::MiptScan { config } => mipt_scan(config::load(&config)?, g),
        Command::Collapse { inputs, observable, bootstrap, options } => {
            let options = match options {
                Some(p) => config::load(&p)?,
                None => Default::default(),
            };
            collapse(config::CollapseConfig { inputs, observable, bootstrap, seed: None, out: None, options }, g)
        }
        Command::Purify { config } => purify(config::load(&config)?, g),
        Command::ProbeBeta { config } => probe_beta(config::load(&config)?, g),
        Command::ProbeEta { config } => probe_eta(config::load(&config)?, g),
        Command::Hydro { config } => hydro(config::load(&config)?, g),
        Command::Sample { config } => sample(config::load(&config)?, g),
        Command::Replay { manifest } => replay(&manifest, g),
    }
}

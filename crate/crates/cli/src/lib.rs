//! Command-line front end: reports, reflection-curve datasets, parameter
//! sweeps, raw amplitude tables and dressed coordinates.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::{Parser, Subcommand};

pub use config::{Flags, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "mazer",
    version,
    about = "One-photon mazer: dressed-channel scattering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Populations, photon statistics and R/T for one initial state
    Report,
    /// Trapping-state reflection curves R+ and R- over |gamma| in [0, 0.99]
    Figure1,
    /// Observables along one axis: gamma_abs, k_over_kappa or kappa_L
    Sweep,
    /// Raw channel amplitude table
    Scatter,
    /// Dressed coordinates of the initial state
    Coords,
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<String, CliError> {
    match command {
        Command::Report => commands::report(cfg),
        Command::Figure1 => commands::figure1(cfg),
        Command::Sweep => commands::sweep(cfg),
        Command::Scatter => commands::scatter(cfg),
        Command::Coords => commands::coords(cfg),
    }
}

/// Resolves the configuration, runs the command and writes its output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(&cli.flags)?;
    let text = execute(cli.command, &cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

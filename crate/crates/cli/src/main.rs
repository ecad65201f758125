//! `enersim`: command-line driver for the synthetic-data, mean-field-game and
//! morphology engines.
//!
//! Exit codes: 0 success, 1 runtime or numerical failure, 2 invalid
//! configuration or input, 3 finished without convergence.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{MfgArgs, MorphMcArgs, MorphPdeArgs, SynthArgs};

#[derive(Debug, Parser)]
#[command(name = "enersim", version, about = "Energy-systems simulation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit binned conditional tables to a CSV and sample a synthetic table.
    Synth(SynthArgs),
    /// Solve the thermostatic cooling mean-field game.
    Mfg(MfgArgs),
    /// Kawasaki Monte Carlo of the three-species lattice mixture.
    MorphMc(MorphMcArgs),
    /// Integrate the nonlocal two-field continuum system.
    MorphPde(MorphPdeArgs),
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn config(msg: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            msg: msg.to_string(),
        }
    }

    pub fn runtime(msg: impl std::fmt::Display) -> Self {
        Failure {
            code: 1,
            msg: msg.to_string(),
        }
    }
}

impl From<enersim_core::Error> for Failure {
    fn from(e: enersim_core::Error) -> Self {
        use enersim_core::Error as E;
        match e {
            E::Numerical { .. } | E::Io { .. } | E::Csv(_) => Failure::runtime(e),
            _ => Failure::config(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Mfg(a) => commands::mfg(a),
        Command::MorphMc(a) => commands::morph_mc(a),
        Command::MorphPde(a) => commands::morph_pde(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("enersim: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

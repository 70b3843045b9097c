//! `tlq`: build thin-layer quantization operators on curved surfaces, verify
//! their identities, and evolve states.
//!
//! Exit codes: 0 on success (all checks passed), 1 when a verification
//! fails or a computation is rejected, 2 for usage, configuration and
//! parse errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable chart files, out-of-range parameters.
    Usage(anyhow::Error),
    /// Checks failed or the numerics refused the input.
    Verification(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

impl From<tlq_core::Error> for Failure {
    fn from(e: tlq_core::Error) -> Failure {
        use tlq_core::Error as E;
        match e {
            E::Parse { .. }
            | E::InvalidChart(_)
            | E::ChartFile { .. }
            | E::Resolution(_)
            | E::UnsupportedChart(_)
            | E::InvalidArgument(_) => Failure::Usage(e.into()),
            other => Failure::Verification(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Usage(e.into())
    }
}

pub type CmdResult = Result<ExitCode, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow::anyhow!(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Curvature(a) => commands::curvature(a),
        Command::Verify(a) => commands::verify(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Export(a) => commands::export(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let (Failure::Usage(e) | Failure::Verification(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}

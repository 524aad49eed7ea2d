//! `qdm`: simulations of the protected double-dot state and the dissipative
//! Deutsch protocol, emitting plot-ready CSV or JSON.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdm_core::{BinaryFunction, Error};

use commands::Output;
use config::{CommonArgs, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "qdm", version, about = "Dissipative state protection and Deutsch protocol in a double quantum dot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the master equation: t_ps,p00,p11,p22,purity,trace_err.
    Simulate(CommonArgs),
    /// Closed-form vs exact steady state, F(∞), θ, φ, t_ss.
    Steady(CommonArgs),
    /// Stationary fidelity over a list of Γ₂/Γ₁.
    Fidelity(CommonArgs),
    /// ΔP₀₀ grid compared with the published tables.
    Tables(CommonArgs),
    /// Readout populations for φ = 0 and φ = π.
    Figure1(CommonArgs),
    /// Decide whether f: {0,1} → {0,1} is constant or balanced.
    Deutsch(DeutschArgs),
}

#[derive(Debug, clap::Args)]
struct DeutschArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    f0: Option<u8>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    f2: Option<u8>,
    #[command(flatten)]
    common: CommonArgs,
}

enum Failure {
    Config(ConfigError),
    Model(Error),
    Io(io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Model(Error::AmbiguousReadout { .. }) => 3,
            Failure::Model(
                Error::IntegrationFailure { .. }
                | Error::InvariantViolation { .. }
                | Error::SolveFailure(_)
                | Error::ConvergenceTimeout { .. },
            )
            | Failure::Io(_) => 1,
            Failure::Model(_) | Failure::Config(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(e) => e.to_string(),
            Failure::Model(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (cfg, output) = match &cli.command {
        Command::Simulate(a) => {
            let cfg = RunConfig::resolve(a)?;
            cfg.single_point()?;
            let out = commands::simulate(&cfg)?;
            (cfg, out)
        }
        Command::Steady(a) => {
            let cfg = RunConfig::resolve(a)?;
            cfg.single_point()?;
            let out = commands::steady(&cfg)?;
            (cfg, out)
        }
        Command::Fidelity(a) => {
            let cfg = RunConfig::resolve(a)?;
            let out = commands::fidelity_scan(&cfg)?;
            (cfg, out)
        }
        Command::Tables(a) => {
            let cfg = RunConfig::resolve(a)?;
            let out = commands::tables(&cfg)?;
            (cfg, out)
        }
        Command::Figure1(a) => {
            let cfg = RunConfig::resolve(a)?;
            let out = commands::figure1(&cfg)?;
            (cfg, out)
        }
        Command::Deutsch(a) => {
            let cfg = RunConfig::resolve(&a.common)?;
            cfg.single_point()?;
            let (Some(f0), Some(f2)) = (a.f0.or(cfg.f0), a.f2.or(cfg.f2)) else {
                return Err(ConfigError::Invalid("deutsch needs both --f0 and --f2".into()).into());
            };
            let f = BinaryFunction::new(f0, f2)?;
            let out = commands::deutsch(&cfg, f)?;
            (cfg, out)
        }
    };

    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match output {
        Output::Table(t) => t.write(cfg.emit, &mut sink)?,
        Output::Record(r) => r.write(cfg.emit, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

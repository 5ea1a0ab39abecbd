//! `aiii-quench`: experiment driver for the chiral-insulator quench simulator.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] aiii_quench::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "aiii-quench", version, about = "Quench-dynamics detection of the 3D winding number")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-averaged spin textures on a fixed-kz slice.
    Textures(Overrides),
    /// Band-inversion surface: slice contours and the 3D mesh.
    Bis(Overrides),
    /// Dynamical field on the BIS and its winding number.
    Winding(Overrides),
    /// Winding number and texture magnitude under static dephasing.
    Noise {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated amplitudes in units of xi_so.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Compile one Trotter slice to NMR primitives.
    Pulse {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated h0,h1,h2,h3 in rad/s.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<f64>>,
    },
}

type Job = fn(&RunConfig) -> Result<Vec<PathBuf>, CliError>;

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let (overrides, job): (&Overrides, Job) = match &cli.command {
        Command::Textures(o) => (o, commands::textures),
        Command::Bis(o) => (o, commands::bis),
        Command::Winding(o) => (o, commands::winding),
        Command::Noise { overrides, .. } => (overrides, commands::noise),
        Command::Pulse { overrides, .. } => (overrides, commands::pulse),
    };
    let mut cfg = RunConfig::resolve(overrides)?;
    match &cli.command {
        Command::Noise { levels: Some(l), .. } => cfg.noise_levels = l.clone(),
        Command::Pulse { h: Some(h), .. } => {
            cfg.pulse_h = h
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Config(format!("--h needs 4 values (got {})", h.len())))?;
        }
        _ => {}
    }
    cfg.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    pool.install(|| job(&cfg))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", output::display(&p));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

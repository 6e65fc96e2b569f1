//! Batch front-end: parse the nonlinearity and configuration, dispatch a
//! subcommand and persist its outputs under `--out` with a `manifest.json`.

pub mod config;
pub mod parse;
pub mod run;

pub use config::RunConfig;
pub use parse::{parse_nonlinearity, ParseError};
pub use run::{execute, main_with_args, Outcome};

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::energy::EnergyError;
use crate::experiments::ExperimentError;
use crate::gauge::GaugeError;
use crate::solver::SolverError;
use crate::spectral::SpectralError;

pub const THREADS_ENV: &str = "TORUS_NLS_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Debug, Parser)]
#[command(name = "torus-nls", version, about = "Well-posedness classifier and spectral experiments for derivative NLS on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat TOML run configuration; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid size n.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Comma-separated viscosities.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Decide well-/ill-posedness of a nonlinearity.
    Classify { nonlinearity: Option<String> },
    /// Evolve initial data and store the trajectory.
    Solve { nonlinearity: Option<String> },
    /// Check the gauge identities along a trajectory.
    GaugeCheck { nonlinearity: Option<String> },
    /// Energy trace and empirical growth constant with an n to 2n refinement.
    Energy { nonlinearity: Option<String> },
    /// Vanishing-viscosity rate study.
    EpsConverge { nonlinearity: Option<String> },
    /// Frequency-truncation (Bona–Smith) rate study.
    BonaSmith { nonlinearity: Option<String> },
    /// One-sided smoothing probe for an ill-posed nonlinearity.
    SmoothProbe { nonlinearity: Option<String> },
    /// Sampled inequality probes (all four when no name is given).
    IneqProbe { probe: Option<String> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Solve { .. } => "solve",
            Command::GaugeCheck { .. } => "gauge-check",
            Command::Energy { .. } => "energy",
            Command::EpsConverge { .. } => "eps-converge",
            Command::BonaSmith { .. } => "bona-smith",
            Command::SmoothProbe { .. } => "smooth-probe",
            Command::IneqProbe { .. } => "ineq-probe",
        }
    }

    fn positional(&self) -> Option<&str> {
        match self {
            Command::Classify { nonlinearity }
            | Command::Solve { nonlinearity }
            | Command::GaugeCheck { nonlinearity }
            | Command::Energy { nonlinearity }
            | Command::EpsConverge { nonlinearity }
            | Command::BonaSmith { nonlinearity }
            | Command::SmoothProbe { nonlinearity } => nonlinearity.as_deref(),
            Command::IneqProbe { probe } => probe.as_deref(),
        }
    }
}

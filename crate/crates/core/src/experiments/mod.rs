//! Rate studies, the one-sided smoothing probe, and inequality probes.

pub mod bona_smith;
pub mod eps;
pub mod fit;
pub mod inequality;
pub mod report;
pub mod smoothing;

pub use bona_smith::{bona_smith_study, BonaSmithParams};
pub use eps::{eps_convergence_study, EpsStudyParams};
pub use inequality::{inequality_probe, InequalityParams, Probe};
pub use report::{Comparison, Criterion, ExperimentReport, FitKind, Series, Verdict};
pub use smoothing::{smoothing_diagnostics, smoothing_probe, SmoothingParams};

use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::energy::EnergyError;
use crate::gauge::GaugeError;
use crate::nonlin_poly::{ComplexPolynomial4, VAR_NAMES};
use crate::solver::SolverError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("precondition violated: {0}")]
    Precondition(String),
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

/// JSON description of a nonlinearity for report inputs.
pub fn describe_nonlinearity(f: &ComplexPolynomial4) -> serde_json::Value {
    serde_json::json!({
        "expression": f.format_with(&VAR_NAMES),
        "terms": f,
    })
}

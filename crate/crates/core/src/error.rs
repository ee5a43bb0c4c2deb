//! Typed failures shared by every module.

use thiserror::Error;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode the library can surface.
///
/// The variants map onto three exit-code families used by the command-line
/// tool: validation (2), numerical failure (3) and precondition or hypothesis
/// failure (4).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value not representable; value = {mantissa:e} * exp({log_scale})")]
    Overflow { log_scale: f64, mantissa: f64 },

    #[error("numerical failure in {context}: residual estimate {residual:e}")]
    NumericalFailure { context: String, residual: f64 },

    #[error("classification uncertain at {side} endpoint: {detail}")]
    ClassificationUncertain { side: String, detail: String },

    #[error("not an S-fraction: coefficient u_{index} = {value} is not positive")]
    NotAnSFraction { index: usize, value: f64 },

    #[error("convergent pole at level {level}")]
    ConvergentPole { level: usize },

    #[error("continued fraction did not converge within {depth} levels")]
    NonConvergence { depth: usize },

    #[error("no single-signed integration constant at level {level}: {detail}")]
    SignSelectionFailure { level: usize, detail: String },

    #[error("inconsistent branch: atom mass {value} is negative")]
    InconsistentBranch { value: f64 },

    #[error("atom suspected near z = {z}")]
    AtomSuspected { z: f64 },

    #[error("negative density {value:e} at z = {z}")]
    NegativeDensity { z: f64, value: f64 },

    #[error("pole density exceeds grid resolution near z = {z}; refine the grid")]
    RefineGrid { z: f64 },

    #[error("tail truncation budget exceeded; estimated deficit {deficit:e}")]
    ExtendGrid { deficit: f64 },

    #[error("moment of order {order} diverges")]
    MomentDivergence { order: i32 },

    #[error("invalid h: h(x) = {value} at x = {x}")]
    InvalidH { x: f64, value: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypotheses failed: {failed:?} ({detail})")]
    HypothesisFailure { failed: Vec<u8>, detail: String },

    #[error("coordinate blow-up at x = {x}")]
    BlowUp { x: f64 },

    #[error("{censored} of {total} paths censored; horizon too short")]
    HorizonTooShort { censored: usize, total: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable name printed on stderr by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain-error",
            Error::Overflow { .. } => "overflow",
            Error::NumericalFailure { .. } => "numerical-failure",
            Error::ClassificationUncertain { .. } => "classification-uncertain",
            Error::NotAnSFraction { .. } => "not-an-s-fraction",
            Error::ConvergentPole { .. } => "convergent-pole",
            Error::NonConvergence { .. } => "non-convergence",
            Error::SignSelectionFailure { .. } => "sign-selection-failure",
            Error::InconsistentBranch { .. } => "inconsistent-branch",
            Error::AtomSuspected { .. } => "atom-suspected",
            Error::NegativeDensity { .. } => "negative-density",
            Error::RefineGrid { .. } => "refine-grid",
            Error::ExtendGrid { .. } => "extend-grid",
            Error::MomentDivergence { .. } => "moment-divergence",
            Error::InvalidH { .. } => "invalid-h",
            Error::Precondition(_) => "precondition-error",
            Error::HypothesisFailure { .. } => "hypothesis-failure",
            Error::BlowUp { .. } => "blow-up",
            Error::HorizonTooShort { .. } => "horizon-too-short",
            Error::Validation(_) => "validation-error",
            Error::Io(_) => "io-error",
        }
    }

    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Domain(_) | Error::Io(_) => 2,
            Error::Precondition(_)
            | Error::HypothesisFailure { .. }
            | Error::NotAnSFraction { .. }
            | Error::InvalidH { .. }
            | Error::InconsistentBranch { .. }
            | Error::MomentDivergence { .. }
            | Error::HorizonTooShort { .. } => 4,
            _ => 3,
        }
    }

    pub(crate) fn numerical(context: impl Into<String>, residual: f64) -> Self {
        Error::NumericalFailure {
            context: context.into(),
            residual,
        }
    }
}

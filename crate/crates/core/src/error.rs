use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series flavor mismatch: cannot combine exact and floating-point series")]
    FlavorMismatch,

    #[error("series has nonzero constant term ({0}); operation requires zero constant term")]
    ConstantTerm(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("unknown class {0:?}")]
    Lookup(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Domain(String),

    #[error("class is not subcritical: {0}")]
    NotSubcritical(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("retry budget exhausted after {attempts} attempts (estimated acceptance rate {acceptance_estimate:.3e})")]
    RetryBudget { attempts: u64, acceptance_estimate: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FlavorMismatch => "flavor_mismatch",
            Error::ConstantTerm(_) => "constant_term",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::ModelViolation(_) => "model_violation",
            Error::Lookup(_) => "lookup",
            Error::Validation(_) => "validation",
            Error::AssumptionViolation(_) => "assumption_violation",
            Error::Parse(_) => "parse",
            Error::Domain(_) => "domain",
            Error::NotSubcritical(_) => "not_subcritical",
            Error::Precision(_) => "precision",
            Error::RetryBudget { .. } => "retry_budget",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Failures surfaced by every computational route.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HawkesError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("unsupported model for this route: {0}")]
    Unsupported(String),

    #[error("stability requires rho < 1, got rho = {rho}")]
    Instability { rho: f64 },

    #[error("mark moment E[B^{order}] is infinite")]
    MomentUnavailable { order: u32 },

    #[error("grid mismatch: expected {expected}, got {found}")]
    GridMismatch { expected: String, found: String },

    #[error("evaluator breaks conjugate symmetry: imaginary residue {residue:.3e}")]
    SymmetryViolation { residue: f64 },

    #[error("CDF bounds cross at k = {k} by {gap:.3e}")]
    Ordering { k: usize, gap: f64 },

    #[error("runaway cluster: {events} events exceed the cap of {cap} (supercritical load, rho = {rho:.4})")]
    Runaway { events: usize, cap: usize, rho: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

/// Coarse failure classes, used by the command-line harness for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Precondition,
    Numeric,
    Io,
}

impl HawkesError {
    pub fn class(&self) -> ErrorClass {
        match self {
            HawkesError::Config(_) => ErrorClass::Config,
            HawkesError::Domain(_)
            | HawkesError::Unsupported(_)
            | HawkesError::Instability { .. }
            | HawkesError::MomentUnavailable { .. }
            | HawkesError::Runaway { .. } => ErrorClass::Precondition,
            HawkesError::GridMismatch { .. }
            | HawkesError::SymmetryViolation { .. }
            | HawkesError::Ordering { .. }
            | HawkesError::Numeric(_) => ErrorClass::Numeric,
            HawkesError::Io(_) => ErrorClass::Io,
        }
    }
}

impl From<std::io::Error> for HawkesError {
    fn from(e: std::io::Error) -> Self {
        HawkesError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HawkesError>;

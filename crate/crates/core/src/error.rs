use thiserror::Error;

/// Errors raised by evaluation, design and scenario handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible uptransform: {0}")]
    InfeasibleUptransform(String),
    #[error("infeasible downtransform: {0}")]
    InfeasibleDowntransform(String),
    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },
    #[error("degenerate sidebands: {0}")]
    Degenerate(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

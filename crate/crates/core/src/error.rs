use thiserror::Error;

/// Errors raised by the solvers and validators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid coefficient: {0}")]
    Coefficient(String),
    #[error("invalid boundary condition: {0}")]
    Boundary(String),
    #[error("integration failed at x = {at}: {reason}")]
    Integration { at: f64, reason: String },
    #[error("eigenvalue search left the admissible range [{lo}, {hi}] for index {index}")]
    SearchRange { index: usize, lo: f64, hi: f64 },
    #[error("root finding did not converge: {0}")]
    Convergence(String),
    #[error("eigenvalue indexing inconsistent: {0}")]
    Indexing(String),
    #[error("eigenfunction consistency error: {0}")]
    Consistency(String),
    #[error("degenerate sampling near x = {at}: eigenfunction stays below the zero threshold")]
    DegenerateSampling { at: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameterization error: {0}")]
    Parameterization(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

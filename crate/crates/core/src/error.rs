use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("incompatible group and norm: {0}")]
    IncompatibleSpec(String),

    /// A parameter tuple violates the admissibility conditions. The message
    /// names the violated condition.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("geometry configuration: {0}")]
    GeometryConfig(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("sampling failure: {0}")]
    Sampling(String),

    #[error("inadmissible test-function family: {0}")]
    InadmissibleFamily(String),

    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    Convergence { iterations: usize, last: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

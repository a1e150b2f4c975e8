use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result cannot be represented as a finite, nonzero `f64`.
    #[error("range error: {0}")]
    Range(String),

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// The sample cannot support a maximum-likelihood fit.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// An iterative solver stopped without meeting its tolerance.
    #[error("no convergence after {iterations} iterations (last value {last:e}, residual {residual:e})")]
    Convergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    /// Invalid user-supplied configuration (alternative specs, study configs, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Failure inside the Monte Carlo engine.
    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the solvers and configuration loaders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("root bracketing failed: {message}")]
    Convergence {
        message: String,
        /// Grid samples `(lambda, value)` around the failed bracket.
        diagnostic: Vec<(f64, f64)>,
    },

    #[error("integration singularity at r = {r:e}: {message}")]
    Singularity { r: f64, message: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    /// Configuration errors are user input problems; everything else comes
    /// from a solver.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

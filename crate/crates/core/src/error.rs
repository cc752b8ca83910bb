use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate weights: every log-weight is -inf or NaN")]
    DegenerateWeights,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("filter failed at step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                step,
                source: Box::new(e),
            },
        }
    }

    /// True when the underlying cause is a failed SPD factorization or a
    /// singular solve, i.e. the numerical-stability guarantee was violated.
    pub fn is_numerical_breakdown(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. } | Error::Singular(_) | Error::NotSymmetric(_) => true,
            Error::Step { source, .. } => source.is_numerical_breakdown(),
            _ => false,
        }
    }
}

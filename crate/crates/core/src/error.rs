use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or model parameter outside its admissible range.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    /// A Gibbs block failed; `iteration` is the zero-based sweep index.
    #[error("chain failed at iteration {iteration}: {source}")]
    Chain {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("a retained draw is not monotone")]
    NotMonotone,

    #[error("invalid data: {0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("rejection oracle infeasible: acceptance rate {rate:e} after {proposals} proposals")]
    Infeasible { rate: f64, proposals: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        match self {
            e @ Error::Chain { .. } => e,
            e => Error::Chain {
                iteration,
                source: Box::new(e),
            },
        }
    }
}

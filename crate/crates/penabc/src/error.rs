//! Crate-wide error type.

use crate::ModelId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter out of support for {model:?}: {detail}")]
    OutOfSupport { model: ModelId, detail: String },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("simulator failure at table index {index}: {source}")]
    Simulator {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite summary at table index {0}")]
    NonFiniteSummary(usize),

    #[error("retention count is zero; increase percentile_x or n_tilde")]
    EmptyRetention,

    #[error("training diverged: non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("Metropolis chain accepted no proposals over {0} steps; check proposal_scale")]
    ZeroAcceptance(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("bad file format in {path}: {detail}")]
    Format { path: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

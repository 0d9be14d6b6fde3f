use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid shape: {0}")]
    InvalidShape(String),

    #[error("mask has no inside voxels")]
    EmptyMask,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    #[error("invalid cluster count k={k}: must satisfy 1 <= k <= p={p}")]
    InvalidK { k: usize, p: usize },

    #[error("cannot produce k={k} clusters: {reason}")]
    InfeasibleK { k: usize, reason: String },

    #[error("topology spans {trees} disconnected trees, more than the requested k={k}")]
    DisconnectedTopology { trees: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate pair: the two samples are identical")]
    DegeneratePair,

    #[error("malformed volume file: {0}")]
    Format(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by asking for a number of clusters the input
    /// cannot support.
    pub fn is_feasibility(&self) -> bool {
        matches!(
            self,
            Error::InvalidK { .. } | Error::InfeasibleK { .. } | Error::DisconnectedTopology { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

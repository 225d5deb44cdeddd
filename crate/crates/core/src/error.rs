use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{what}: n = {n} exceeds the capacity limit of {limit}")]
    Capacity {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("set function value {value} exceeds the declared bound M = {bound}")]
    BoundExceeded { value: f64, bound: f64 },

    #[error("problem stream exhausted after {got} of {expected} rounds")]
    Truncated { expected: usize, got: usize },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("no spanning tree: the graph is disconnected")]
    NoSpanningTree,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

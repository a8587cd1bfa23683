use thiserror::Error;

/// Errors raised while building instances or running checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} out of range for {len} marginals")]
    Index { index: usize, len: usize },

    #[error("marginal pair ({i}, {j}) must satisfy i < j")]
    IndexOrder { i: usize, j: usize },

    #[error("invalid index subset: {0}")]
    Subset(String),

    #[error("operation not supported for this representation: {0}")]
    Unsupported(String),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget must be positive")]
    Budget,

    #[error("grid too large: {nodes} nodes exceeds limit {limit}")]
    GridTooLarge { nodes: u128, limit: u128 },

    #[error(
        "resolvent of A_{index} is not single-valued: points {first} and {second} share S(x) but differ in block {index}"
    )]
    IllDefinedResolvent {
        index: usize,
        first: usize,
        second: usize,
    },

    #[error("matrices do not commute: ||Q_{i} Q_{j} - Q_{j} Q_{i}|| = {norm:e}")]
    NonCommuting { i: usize, j: usize, norm: f64 },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

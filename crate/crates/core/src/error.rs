use thiserror::Error;

/// Errors raised by the model, the LP solver and the precoders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} exceeds the cap of {cap}")]
    SizeCap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("LP solver hit the iteration limit ({0} iterations)")]
    IterationLimit(usize),

    #[error("LP at branch-and-bound level {level}, node {node} failed: {reason}")]
    Node {
        level: usize,
        node: usize,
        reason: String,
    },

    #[error("channel matrix is rank deficient; zero-forcing needs full row rank")]
    RankDeficient,

    #[error("survivor set grew to {0} nodes, above the configured limit")]
    SurvivorOverflow(usize),

    #[error("{precoder} failed on trial {trial}: {reason}")]
    Trial {
        precoder: String,
        trial: usize,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

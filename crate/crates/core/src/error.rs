use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed profile: {0}")]
    MalformedProfile(String),

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("out of range: {0}")]
    Range(String),

    #[error("infeasible committed allocation: {0}")]
    InfeasibleCommitted(String),

    #[error("exhaustive search over {size} candidates exceeds the limit of {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("{what} over {agents} agents exceeds the exact limit of {limit}; use sampled mode")]
    ExactLimit {
        what: &'static str,
        agents: usize,
        limit: usize,
    },

    #[error("malformed order: {0}")]
    MalformedOrder(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

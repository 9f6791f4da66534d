use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("action index {index} out of range for {len} actions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid action set: {0}")]
    InvalidActions(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("action set is rank deficient: numerical rank {rank} < dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("empty reward sequence")]
    EmptyRewards,

    #[error("pull counts sum to {got}, expected {expected}")]
    CountMismatch { expected: u64, got: u64 },

    #[error("action count {count} exceeds cap {cap}")]
    CapExceeded { count: u128, cap: usize },

    #[error("invalid order-routing spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("invalid policy config: {0}")]
    InvalidConfig(String),

    #[error("internal error: {0}")]
    Internal(String),
}

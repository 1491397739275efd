use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("outcome {outcome} out of range for a set of cardinality {n}")]
    OutcomeOutOfRange { outcome: usize, n: usize },

    #[error("cardinality must be at least 1")]
    EmptySet,

    #[error("distribution has no entries")]
    EmptyDistribution,

    #[error("negative or non-finite weight {weight} for outcome {outcome}")]
    InvalidWeight { outcome: usize, weight: f64 },

    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("cardinality mismatch: expected {expected}, found {found}")]
    CardinalityMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid fixpoint configuration: {0}")]
    InvalidConfig(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("discount factor {0} outside [0, 1)")]
    InvalidDiscount(f64),

    #[error("state {state} out of range ({n_states} states)")]
    StateOutOfRange { state: usize, n_states: usize },

    #[error("action {action} out of range at state {state} ({n_actions} actions)")]
    ActionOutOfRange {
        state: usize,
        action: usize,
        n_actions: usize,
    },

    #[error("state {state} has no actions")]
    NoActions { state: usize },

    #[error("non-finite reward at ({state}, {action}, {next})")]
    NonFiniteReward { state: usize, action: usize, next: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("step {k} exceeds sequence length {len}")]
    StepOutOfRange { k: usize, len: usize },

    #[error("enumeration of {count} sequences exceeds the limit of {limit}")]
    EnumerationTooLarge { count: f64, limit: usize },

    #[error("singular system during exact policy evaluation")]
    SingularSystem,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

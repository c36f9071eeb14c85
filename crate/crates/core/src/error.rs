//! Error types shared across the engine.

use thiserror::Error;

/// Rejections raised while validating and canonicalizing a game instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("instance needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("cp_price must be > 0")]
    NonPositivePrice,
    #[error("agent {id}: penalty must be > 0")]
    NonPositivePenalty { id: String },
    #[error("agent {id}: {field} must be >= 0")]
    NegativeDemand { id: String, field: &'static str },
    #[error("agent {id}: {field} must be finite")]
    NonFinite { id: String, field: &'static str },
    #[error("duplicate agent id {0:?}")]
    DuplicateId(String),
    #[error("shift profile has {got} entries, instance has {want} agents")]
    ShiftLengthMismatch { got: usize, want: usize },
}

/// Errors from the closed-form equilibrium routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeError {
    #[error("two_agent_ne requires exactly 2 agents, got {0}")]
    NotTwoAgents(usize),
    #[error("hybrid equilibrium conditions not met: {0}")]
    OutsideHybridConditions(String),
}

/// Errors from the switched gradient-play solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("start point lies outside the stability set")]
    StartOutsideStabilitySet,
    #[error("invalid solver config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Errors from the benchmark module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchmarkError {
    #[error("marginal-gap identity is defined only for balanced (quasiconcave or non-concave) two-agent equilibria")]
    NotBalancedTwoAgent,
}

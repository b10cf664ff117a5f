//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by scenario loading, map construction, and the solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The scenario document does not parse against the schema.
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// A vector field has the wrong length for the declared game.
    #[error("dimension mismatch at `{path}`: {message}")]
    DimensionMismatch { path: String, message: String },

    /// A field value is out of its admissible range.
    #[error("invalid value at `{path}`: {message}")]
    InvalidValue { path: String, message: String },

    #[error("leader index {index} out of range (game has {n} leaders)")]
    LeaderIndexOutOfRange { index: usize, n: usize },

    /// The decision-dependent interval collapsed past empty.
    #[error("uncertainty set is empty: lo = {lo} > hi = {hi}")]
    EmptyUncertaintySet { lo: f64, hi: f64 },

    /// The coupled follower best-response system has no unique solution.
    #[error("follower equilibrium indeterminate: coupling system is singular (det = {det:e})")]
    SingularFollowerSystem { det: f64 },

    /// The inner LP of a follower is unbounded above.
    #[error("follower {follower} problem unbounded: reduced cost {coeff} on the free direction is positive")]
    UnboundedFollower { follower: usize, coeff: f64 },

    /// The inner LP cannot be reduced to closed form.
    #[error("follower {follower} reaction undefined: second component of h is zero")]
    IllPosedFollower { follower: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("infeasible profile: leader {leader} violates its box by {violation}")]
    InfeasibleProfile { leader: usize, violation: f64 },

    /// Every candidate strategy of a leader empties the uncertainty set.
    #[error("leader {leader} has no candidate with a nonempty uncertainty set")]
    AllCandidatesInfeasible { leader: usize },

    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),

    #[error("{0}")]
    Unsupported(String),
}

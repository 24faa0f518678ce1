use crate::epset::Universe;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("universe mismatch: {left} vs {right}")]
    UniverseMismatch { left: Universe, right: Universe },

    #[error("period {period} exceeds the limit {limit}")]
    PeriodLimit { period: usize, limit: usize },

    #[error("too many generators: {given} (at most {max})")]
    TooManyGenerators { given: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    /// A value violates a structural invariant of its type (negative weight,
    /// finite density carrier, overlapping elements, ...).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// An operation was called outside its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("sequence is not decreasing: coordinate {index} is not contained in coordinate {previous}")]
    NotDecreasing { index: usize, previous: usize },

    #[error("member {member} is not singular with respect to the reference charge")]
    NotSingular { member: usize },

    #[error("members {first} and {second} are not quasi-disjoint")]
    NotQuasiDisjoint { first: usize, second: usize },

    #[error("sequence is not eventually constant for the charge: at n = {n}, k = {k} the symmetric difference has mass {mass}")]
    RateHypothesis { n: usize, k: usize, mass: String },

    #[error("internal error: {0}")]
    Internal(String),
}

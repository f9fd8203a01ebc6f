use crate::model::VertexId;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("dimension {dimension} has no vertices left after scoping or pruning")]
    EmptyLayer { dimension: usize },

    #[error("include vertex {vertex} cannot be part of any full configuration")]
    UnsatisfiableInclude { vertex: VertexId },

    #[error("clique cover needs {cover} configurations but only {budget} are allowed")]
    CoverExceedsBudget { cover: usize, budget: usize },

    #[error("target distribution for {group} has no remaining mass")]
    DegenerateTarget { group: String },

    #[error("schedule contains a unit with no target entry: {0}")]
    UnitMismatch(String),

    #[error("schedule is empty")]
    EmptySchedule,

    #[error("no schedule satisfies the constraints")]
    Infeasible,

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("mapped solution is not a valid clique cover: {0}")]
    InvalidSolution(String),

    #[error("checkpoint does not match this run: {0}")]
    CheckpointMismatch(String),

    #[error("unknown algorithm id `{0}`")]
    UnknownAlgorithm(String),
}

impl Error {
    /// Errors that mean the instance admits no schedule, as opposed to
    /// malformed input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::EmptyLayer { .. }
                | Error::UnsatisfiableInclude { .. }
                | Error::CoverExceedsBudget { .. }
                | Error::Infeasible
        )
    }
}

//! Test-environment schedule design.
//!
//! A schedule is `n` node configurations, each picking one compatible value
//! per dimension (a clique in a multipartite compatibility graph). Schedules
//! must cover every in-scope value and should match a target distribution of
//! values, value pairs or whole configurations as closely as possible.
//!
//! The [`pipeline`] prepares the graph ([`graph`]), builds a clique cover,
//! pads it to length `n` and improves it with simulated annealing
//! ([`annealing`]) or branch and bound ([`bnb`]). [`oracle`] holds an
//! exhaustive solver for small instances and a reduction from general clique
//! cover.

pub mod annealing;
pub mod bnb;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod pipeline;
pub mod space;

pub use error::{Error, Result};
pub use model::{
    check_schedule, validate_instance, CompatibilityGraph, ConstraintReport, IncludeMode, Instance,
    NodeConfiguration, Schedule, Scope, VertexId,
};
pub use objective::{cost, lower_bound, ObjectiveKind, TargetSpec, Unit, Weights};
pub use pipeline::{prepare, run_pipeline, Algorithm, Checkpoint, RunConfig, RunOutput};
pub use space::{Budget, SearchSpace};

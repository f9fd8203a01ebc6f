//! End-to-end runs: graph preparation, optimizer selection, resumable
//! checkpoints and node packing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annealing::{AnnealState, Annealer, NeighborMode, SaConfig};
use crate::bnb::{BnbConfig, BnbState, BranchAndBound, Family, Strategy};
use crate::error::{Error, Result};
use crate::graph::{clique_cover, prune_graph_with, restrict_dimension_size, scope_graph};
use crate::model::{
    check_schedule, validate_instance, ConstraintReport, IncludeMode, Instance, NodeConfiguration,
    Schedule, VertexId,
};
use crate::objective::adjust_targets;
use crate::space::{Budget, SearchSpace};

/// Largest frontier kept in a branch-and-bound checkpoint.
pub const FRONTIER_SNAPSHOT_LIMIT: usize = 10_000;
pub const CHECKPOINT_VERSION: u32 = 1;

/// Runs scoping, pruning, clique cover and the optional layer size limit,
/// drops values no configuration can hold, and renormalizes the target.
pub fn prepare<R: Rng>(inst: &Instance, rng: &mut R) -> Result<SearchSpace> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidInstance(msgs.join("; ")));
    }
    let exclusive = inst.scope.mode == IncludeMode::Exclusive;
    let includes = inst.scope.include_union();
    let cover_for = |g: &_, rng: &mut R| {
        if exclusive {
            clique_cover(g, &includes, rng)
        } else {
            let mut cover = crate::graph::CliqueCover::default();
            cover.extend(g, includes.iter().copied(), &includes, rng)?;
            Ok(cover)
        }
    };

    let scoped = scope_graph(&inst.graph, &inst.scope)?;
    let mut graph = prune_graph_with(&scoped, &includes, exclusive)?;
    let mut cover = cover_for(&graph, rng)?;

    if let Some(max) = inst.max_dimension_size {
        if graph.layers().iter().any(|l| l.len() > max) {
            let mut protected = includes.clone();
            for c in cover
                .cliques
                .iter()
                .filter(|c| c.values().iter().any(|v| includes.contains(v)))
            {
                protected.extend(c.values().iter().copied());
            }
            let restricted = restrict_dimension_size(&graph, &inst.target, max, &protected);
            graph = prune_graph_with(&restricted, &includes, exclusive)?;
            cover = cover_for(&graph, rng)?;
        }
    }

    if !cover.uncoverable.is_empty() {
        graph = graph.without_vertices(&cover.uncoverable);
        if let Some(dimension) = graph.first_empty_layer() {
            return Err(Error::EmptyLayer { dimension });
        }
    }
    if cover.is_empty() {
        return Err(Error::Infeasible);
    }
    if cover.len() > inst.n {
        return Err(Error::CoverExceedsBudget {
            cover: cover.len(),
            budget: inst.n,
        });
    }
    let target = adjust_targets(&inst.target, &graph)?;
    let required: BTreeSet<VertexId> = if exclusive {
        graph.vertices().collect()
    } else {
        includes
    };
    Ok(SearchSpace::new(graph, required, cover, target, inst.n))
}

/// One of the eighteen optimizer variants, identified as `"1.1"` to `"3.6"`.
///
/// Family 1 is annealing, family 2 is branch and bound from scratch and
/// family 3 is branch and bound refining the expanded cover. Within family 1
/// odd variants drop the coverage guard and the pairs use the random-vertex,
/// all-but-one and single-vertex neighbourhoods. Within families 2 and 3 odd
/// variants are traditional, even ones look ahead, and the pairs use
/// depth-first, depth-first-best-first and best-first-depth-first selection.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Algorithm {
    family: u8,
    variant: u8,
}

impl Algorithm {
    pub fn new(family: u8, variant: u8) -> Result<Self> {
        if (1..=3).contains(&family) && (1..=6).contains(&variant) {
            Ok(Algorithm { family, variant })
        } else {
            Err(Error::UnknownAlgorithm(format!("{family}.{variant}")))
        }
    }

    pub fn all() -> Vec<Algorithm> {
        (1..=3)
            .flat_map(|family| (1..=6).map(move |variant| Algorithm { family, variant }))
            .collect()
    }

    pub fn is_annealing(self) -> bool {
        self.family == 1
    }

    fn pair(self) -> usize {
        (self.variant as usize - 1) / 2
    }

    fn even(self) -> bool {
        self.variant.is_multiple_of(2)
    }

    /// Annealing settings, or `None` for branch-and-bound ids.
    pub fn annealing_config(self, seed: u64) -> Option<SaConfig> {
        let mode = [
            NeighborMode::RandomVertex,
            NeighborMode::AllButOne,
            NeighborMode::SingleVertex,
        ][self.pair()];
        self.is_annealing()
            .then(|| SaConfig::new(mode, self.even(), seed))
    }

    /// Branch-and-bound settings, or `None` for annealing ids.
    pub fn bnb_config(self, seed: u64) -> Option<BnbConfig> {
        let strategy = [
            Strategy::DepthFirst,
            Strategy::DepthFirstBestFirst,
            Strategy::BestFirstDepthFirst,
        ][self.pair()];
        let family = match self.family {
            2 => Family::Scratch,
            3 => Family::Refine,
            _ => return None,
        };
        Some(BnbConfig::new(family, self.even(), strategy, seed))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.family, self.variant)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownAlgorithm(s.to_string());
        let (a, b) = s.trim().split_once('.').ok_or_else(unknown)?;
        let family = a.parse().map_err(|_| unknown())?;
        let variant = b.parse().map_err(|_| unknown())?;
        Algorithm::new(family, variant).map_err(|_| unknown())
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub budget: Budget,
    /// Overrides the strategy's default branch factor.
    pub branch_factor: Option<usize>,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, seed: u64, budget: Budget) -> Self {
        RunConfig {
            algorithm,
            seed,
            budget,
            branch_factor: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverState {
    Annealing(AnnealState),
    BranchAndBound(BnbState),
}

/// Everything needed to continue a run where it stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    /// Digest of the instance the run was started on.
    pub digest: String,
    pub algorithm: Algorithm,
    /// Seed used for graph preparation, so a resumed run sees the same cover.
    pub prep_seed: u64,
    pub best: Schedule,
    pub best_cost: f64,
    pub state: SolverState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub schedule: Schedule,
    pub cost: f64,
    /// Cost of the expanded cover the optimizer started from.
    pub initial_cost: f64,
    pub required: BTreeSet<VertexId>,
    pub report: ConstraintReport,
    pub checkpoint: Checkpoint,
}

/// Prepares the instance and runs the selected optimizer, resuming from
/// `checkpoint` when one is given.
pub fn run_pipeline(
    inst: &Instance,
    cfg: &RunConfig,
    checkpoint: Option<&Checkpoint>,
) -> Result<RunOutput> {
    let digest = crate::io::instance_digest(inst);
    if let Some(ck) = checkpoint {
        if ck.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "version {} (expected {CHECKPOINT_VERSION})",
                ck.version
            )));
        }
        if ck.digest != digest {
            return Err(Error::CheckpointMismatch(
                "checkpoint was written for a different instance".into(),
            ));
        }
        if ck.algorithm != cfg.algorithm {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint is for algorithm {}, not {}",
                ck.algorithm, cfg.algorithm
            )));
        }
    }
    let prep_seed = checkpoint.map_or(cfg.seed, |c| c.prep_seed);
    let space = prepare(inst, &mut ChaCha8Rng::seed_from_u64(prep_seed))?;
    let initial = crate::annealing::expand_cover(&space.cover, space.n)?;
    let initial_cost = space.cost(&initial)?;

    let (schedule, cost, state) = if let Some(sa) = cfg.algorithm.annealing_config(cfg.seed) {
        let mut annealer = match checkpoint.map(|c| &c.state) {
            Some(SolverState::Annealing(s)) => Annealer::resume(&space, sa, s.clone()),
            Some(_) => return Err(Error::CheckpointMismatch("solver state kind".into())),
            None => Annealer::new(&space, sa)?,
        };
        let out = annealer.run(cfg.budget)?;
        (
            out.schedule,
            out.cost,
            SolverState::Annealing(annealer.into_state()),
        )
    } else {
        let mut bc = cfg
            .algorithm
            .bnb_config(cfg.seed)
            .expect("branch-and-bound id");
        if let Some(b) = cfg.branch_factor {
            bc.branch_factor = b.max(1);
        }
        let mut solver = match checkpoint.map(|c| &c.state) {
            Some(SolverState::BranchAndBound(s)) => BranchAndBound::resume(&space, bc, s.clone())?,
            Some(_) => return Err(Error::CheckpointMismatch("solver state kind".into())),
            None => BranchAndBound::new(&space, bc)?,
        };
        let out = solver.run(cfg.budget)?;
        let mut state = solver.state();
        state.truncate_frontier(FRONTIER_SNAPSHOT_LIMIT);
        (out.schedule, out.cost, SolverState::BranchAndBound(state))
    };

    let report = check_schedule(&schedule, inst, &space.required);
    Ok(RunOutput {
        checkpoint: Checkpoint {
            version: CHECKPOINT_VERSION,
            digest,
            algorithm: cfg.algorithm,
            prep_seed,
            best: schedule.clone(),
            best_cost: cost,
            state,
        },
        schedule,
        cost,
        initial_cost,
        required: space.required,
        report,
    })
}

/// How many VMs of a type fit on one node of a hardware type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackingTable {
    /// Dimension holding VM types; hardware is always dimension 0.
    pub vm_dimension: usize,
    /// Keyed by (hardware value, VM value). Missing entries mean 1.
    pub capacity: BTreeMap<(VertexId, VertexId), u32>,
}

impl PackingTable {
    pub fn capacity_of(&self, config: &NodeConfiguration) -> u32 {
        let key = (config.get(0), config.get(self.vm_dimension));
        self.capacity.get(&key).copied().unwrap_or(1).max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackedSchedule {
    pub configs: Vec<NodeConfiguration>,
    /// Indices into `configs` of the configurations sharing each node.
    pub node_groups: Vec<Vec<usize>>,
    pub node_count: usize,
}

/// Fills every node with as many copies of its configuration as its VM
/// capacity allows.
pub fn pack_schedule(schedule: &Schedule, packing: Option<&PackingTable>) -> PackedSchedule {
    let mut configs = Vec::new();
    let mut node_groups = Vec::with_capacity(schedule.len());
    for c in schedule.iter() {
        let w = packing.map_or(1, |p| p.capacity_of(c)) as usize;
        let start = configs.len();
        configs.extend(std::iter::repeat_n(c.clone(), w));
        node_groups.push((start..start + w).collect());
    }
    PackedSchedule {
        configs,
        node_groups,
        node_count: schedule.len(),
    }
}

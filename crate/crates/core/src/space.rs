//! The prepared search problem shared by both optimizer families.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::graph::CliqueCover;
use crate::model::{CompatibilityGraph, NodeConfiguration, Schedule, VertexId};
use crate::objective::{self, TargetSpec};

/// A scoped and pruned graph together with its clique cover, the set of
/// values every schedule must cover and the renormalized target.
#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub graph: CompatibilityGraph,
    pub required: BTreeSet<VertexId>,
    pub cover: CliqueCover,
    pub target: TargetSpec,
    pub n: usize,
    vertices: Vec<VertexId>,
}

impl SearchSpace {
    pub fn new(
        graph: CompatibilityGraph,
        required: BTreeSet<VertexId>,
        cover: CliqueCover,
        target: TargetSpec,
        n: usize,
    ) -> Self {
        let vertices = graph.vertices().collect();
        SearchSpace {
            graph,
            required,
            cover,
            target,
            n,
            vertices,
        }
    }

    /// All vertices in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn cost(&self, schedule: &Schedule) -> Result<f64> {
        objective::cost(schedule, &self.target)
    }

    pub fn covers_required(&self, configs: &[NodeConfiguration]) -> bool {
        let covered: BTreeSet<VertexId> = configs
            .iter()
            .flat_map(|c| c.values().iter().copied())
            .collect();
        self.required.is_subset(&covered)
    }

    /// Required values not covered by `configs`.
    pub fn uncovered(&self, configs: &[NodeConfiguration]) -> BTreeSet<VertexId> {
        let mut left = self.required.clone();
        for c in configs {
            for v in c.values() {
                left.remove(v);
            }
        }
        left
    }

    /// How many configurations cover each required value.
    pub fn coverage_counts(&self, configs: &[NodeConfiguration]) -> BTreeMap<VertexId, usize> {
        let mut counts: BTreeMap<VertexId, usize> = self.required.iter().map(|v| (*v, 0)).collect();
        for c in configs {
            for v in c.values() {
                if let Some(k) = counts.get_mut(v) {
                    *k += 1;
                }
            }
        }
        counts
    }
}

/// Stopping rule for an optimizer run. Iteration caps count annealing
/// iterations or branch-and-bound node expansions. With neither limit set a
/// run only stops when its search is exhausted.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub iterations: Option<u64>,
    pub time: Option<Duration>,
}

impl Budget {
    pub fn iterations(n: u64) -> Self {
        Budget {
            iterations: Some(n),
            time: None,
        }
    }

    pub fn time(limit: Duration) -> Self {
        Budget {
            iterations: None,
            time: Some(limit),
        }
    }

    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub(crate) fn clock(&self) -> BudgetClock {
        BudgetClock {
            budget: *self,
            started: Instant::now(),
            used: 0,
        }
    }
}

pub(crate) struct BudgetClock {
    budget: Budget,
    started: Instant,
    used: u64,
}

impl BudgetClock {
    pub fn exhausted(&self) -> bool {
        self.budget.iterations.is_some_and(|cap| self.used >= cap)
            || self
                .budget
                .time
                .is_some_and(|t| self.started.elapsed() >= t)
    }

    pub fn tick(&mut self) {
        self.used += 1;
    }
}

/// Serde form of a ChaCha8 generator that survives buffered (internally
/// tagged) deserialization, which cannot carry the u128 word position.
pub(crate) mod rng_serde {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct RngDoc {
        seed: String,
        stream: u64,
        word_pos: String,
    }

    pub fn serialize<S: Serializer>(rng: &ChaCha8Rng, s: S) -> Result<S::Ok, S::Error> {
        RngDoc {
            seed: hex::encode(rng.get_seed()),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ChaCha8Rng, D::Error> {
        let doc = RngDoc::deserialize(d)?;
        let mut seed = [0u8; 32];
        hex::decode_to_slice(&doc.seed, &mut seed).map_err(D::Error::custom)?;
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(doc.stream);
        rng.set_word_pos(doc.word_pos.parse().map_err(D::Error::custom)?);
        Ok(rng)
    }
}

//! JSON documents for instances, schedules and general graphs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    CompatibilityGraph, ConstraintReport, DimensionValue, IncludeMode, Instance, NodeConfiguration,
    Schedule, Scope, VertexId,
};
use crate::objective::{GroupKey, ObjectiveKind, TargetSpec, Unit, Weights};
use crate::pipeline::{PackedSchedule, PackingTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueDoc {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScopeDoc {
    #[serde(default)]
    pub include: Vec<Vec<u32>>,
    #[serde(default)]
    pub exclude: Vec<Vec<u32>>,
    #[serde(default)]
    pub mode: IncludeMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWeightDoc {
    pub dimensions: (usize, usize),
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetDoc {
    /// One id for dimension objectives, two for relationship objectives and
    /// one per dimension for combination objectives.
    pub unit: Vec<u32>,
    /// A count or probability; each group is normalized on load.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveDoc {
    pub kind: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_weights: Option<Vec<PairWeightDoc>>,
    pub targets: Vec<TargetDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityDoc {
    pub hardware: u32,
    pub vm: u32,
    pub capacity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingDoc {
    pub vm_dimension: usize,
    pub capacities: Vec<CapacityDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub dimensions: Vec<String>,
    pub values: Vec<Vec<ValueDoc>>,
    pub edges: Vec<(u32, u32)>,
    #[serde(default)]
    pub scope: ScopeDoc,
    pub n: usize,
    pub objective: ObjectiveDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dimension_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packing: Option<PackingDoc>,
}

fn id_set(ids: &[u32]) -> BTreeSet<VertexId> {
    ids.iter().copied().map(VertexId).collect()
}

fn unit_from_ids(kind: ObjectiveKind, ids: &[u32], graph: &CompatibilityGraph) -> Result<Unit> {
    let bad = || {
        Error::InvalidInstance(format!(
            "target unit {ids:?} does not fit a {kind} objective"
        ))
    };
    match (kind, ids) {
        (ObjectiveKind::Dimension, [v]) => Ok(Unit::Value(VertexId(*v))),
        (ObjectiveKind::Relationship, [a, b]) => Ok(Unit::Pair(VertexId(*a), VertexId(*b))),
        (ObjectiveKind::Combination, ids) if ids.len() == graph.dimension_count() => {
            let mut vs: Vec<VertexId> = ids.iter().copied().map(VertexId).collect();
            vs.sort_by_key(|v| graph.dimension_of(*v).unwrap_or(usize::MAX));
            Ok(Unit::Config(NodeConfiguration::from_ids_unchecked(vs)))
        }
        _ => Err(bad()),
    }
}

fn unit_ids(unit: &Unit) -> Vec<u32> {
    match unit {
        Unit::Value(v) => vec![v.0],
        Unit::Pair(a, b) => vec![a.0, b.0],
        Unit::Config(c) => c.values().iter().map(|v| v.0).collect(),
    }
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<Instance> {
        let d = self.dimensions.len();
        let mut values = Vec::new();
        for (dimension, layer) in self.values.iter().enumerate() {
            for v in layer {
                values.push(DimensionValue {
                    id: VertexId(v.id),
                    dimension,
                    label: v.label.clone().unwrap_or_else(|| v.id.to_string()),
                });
            }
        }
        let edges = self.edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b)));
        let graph = CompatibilityGraph::new(self.dimensions.clone(), values, edges);

        let sets = |v: &Vec<Vec<u32>>| -> Vec<BTreeSet<VertexId>> {
            if v.is_empty() {
                vec![BTreeSet::new(); d]
            } else {
                v.iter().map(|ids| id_set(ids)).collect()
            }
        };
        let scope = Scope {
            include: sets(&self.scope.include),
            exclude: sets(&self.scope.exclude),
            mode: self.scope.mode,
        };

        let obj = &self.objective;
        let weights = match (obj.kind, &obj.weights, &obj.pair_weights) {
            (_, Some(_), Some(_)) => {
                return Err(Error::InvalidInstance(
                    "objective has both weights and pair_weights".into(),
                ))
            }
            (_, Some(w), None) => Weights::PerDimension(w.clone()),
            (_, None, Some(p)) => {
                Weights::PerPair(p.iter().map(|p| (p.dimensions, p.weight)).collect())
            }
            (_, None, None) => Weights::Uniform,
        };
        let targets = obj
            .targets
            .iter()
            .map(|t| Ok((unit_from_ids(obj.kind, &t.unit, &graph)?, t.value)))
            .collect::<Result<Vec<_>>>()?;
        let target = TargetSpec::new(obj.kind, weights, targets, &graph)?;

        let packing = self.packing.as_ref().map(|p| PackingTable {
            vm_dimension: p.vm_dimension,
            capacity: p
                .capacities
                .iter()
                .map(|c| ((VertexId(c.hardware), VertexId(c.vm)), c.capacity))
                .collect(),
        });
        if let Some(p) = &packing {
            if p.vm_dimension >= d {
                return Err(Error::InvalidInstance(format!(
                    "packing vm_dimension {} out of range",
                    p.vm_dimension
                )));
            }
            if p.capacity.values().any(|&c| c == 0) {
                return Err(Error::InvalidInstance(
                    "packing capacities must be at least 1".into(),
                ));
            }
        }

        Ok(Instance {
            graph,
            scope,
            n: self.n,
            target,
            max_dimension_size: self.max_dimension_size,
            packing,
        })
    }

    /// The document for an instance. Lists are in ascending order, so equal
    /// instances give equal documents.
    pub fn from_instance(inst: &Instance) -> Self {
        let g = &inst.graph;
        let values = g
            .layers()
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|&v| ValueDoc {
                        id: v.0,
                        label: g
                            .label(v)
                            .filter(|l| *l != v.0.to_string())
                            .map(str::to_string),
                    })
                    .collect()
            })
            .collect();
        let ids = |sets: &[BTreeSet<VertexId>]| -> Vec<Vec<u32>> {
            sets.iter()
                .map(|s| s.iter().map(|v| v.0).collect())
                .collect()
        };
        let t = &inst.target;
        let (weights, pair_weights) = match t.kind() {
            ObjectiveKind::Dimension => (Some(t.groups().iter().map(|g| g.weight).collect()), None),
            ObjectiveKind::Relationship => {
                let pw = t
                    .groups()
                    .iter()
                    .filter_map(|g| match g.key {
                        GroupKey::Pair(i, j) => Some(PairWeightDoc {
                            dimensions: (i, j),
                            weight: g.weight,
                        }),
                        _ => None,
                    })
                    .collect();
                (None, Some(pw))
            }
            ObjectiveKind::Combination => (None, None),
        };
        let targets = t
            .groups()
            .iter()
            .flat_map(|g| g.raw().iter())
            .map(|(u, value)| TargetDoc {
                unit: unit_ids(u),
                value: *value,
            })
            .collect();
        InstanceDoc {
            dimensions: g.dimension_names().to_vec(),
            values,
            edges: g.edges().map(|(a, b)| (a.0, b.0)).collect(),
            scope: ScopeDoc {
                include: ids(&inst.scope.include),
                exclude: ids(&inst.scope.exclude),
                mode: inst.scope.mode,
            },
            n: inst.n,
            objective: ObjectiveDoc {
                kind: t.kind(),
                weights,
                pair_weights,
                targets,
            },
            max_dimension_size: inst.max_dimension_size,
            packing: inst.packing.as_ref().map(|p| PackingDoc {
                vm_dimension: p.vm_dimension,
                capacities: p
                    .capacity
                    .iter()
                    .map(|(&(h, v), &c)| CapacityDoc {
                        hardware: h.0,
                        vm: v.0,
                        capacity: c,
                    })
                    .collect(),
            }),
        }
    }
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    let doc: InstanceDoc =
        serde_json::from_str(json).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    doc.into_instance()
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("serializable")
}

/// Hex SHA-256 of the instance's canonical compact JSON document.
pub fn instance_digest(inst: &Instance) -> String {
    let bytes = serde_json::to_vec(&InstanceDoc::from_instance(inst)).expect("serializable");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub ids: Vec<u32>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageDoc {
    pub all_satisfied: bool,
    /// Numbers (1 to 6) of violated schedule constraints.
    pub violated: Vec<usize>,
    pub required: Vec<u32>,
    pub uncovered: Vec<u32>,
}

impl CoverageDoc {
    pub fn new(report: &ConstraintReport, required: &BTreeSet<VertexId>) -> Self {
        CoverageDoc {
            all_satisfied: report.all_satisfied(),
            violated: report.violated(),
            required: required.iter().map(|v| v.0).collect(),
            uncovered: report.uncovered.iter().map(|v| v.0).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub algorithm: String,
    pub seed: Option<u64>,
    pub n: usize,
    pub cost: f64,
    pub configs: Vec<ConfigDoc>,
    /// Indices into `configs` of the configurations run on each node.
    pub node_groups: Vec<Vec<usize>>,
    pub coverage_report: CoverageDoc,
}

fn config_doc(c: &NodeConfiguration, g: &CompatibilityGraph) -> ConfigDoc {
    ConfigDoc {
        ids: c.values().iter().map(|v| v.0).collect(),
        labels: c
            .values()
            .iter()
            .map(|&v| g.label(v).map_or_else(|| v.0.to_string(), str::to_string))
            .collect(),
    }
}

impl ScheduleDoc {
    /// One node per configuration.
    pub fn new(
        schedule: &Schedule,
        graph: &CompatibilityGraph,
        algorithm: String,
        seed: Option<u64>,
        cost: f64,
        coverage_report: CoverageDoc,
    ) -> Self {
        ScheduleDoc {
            algorithm,
            seed,
            n: schedule.len(),
            cost,
            configs: schedule.iter().map(|c| config_doc(c, graph)).collect(),
            node_groups: (0..schedule.len()).map(|i| vec![i]).collect(),
            coverage_report,
        }
    }

    /// The schedule with one configuration per node, taking the first
    /// configuration of each node group.
    pub fn schedule(&self) -> Schedule {
        let per_node: Vec<&ConfigDoc> = if self.node_groups.is_empty() {
            self.configs.iter().collect()
        } else {
            self.node_groups
                .iter()
                .filter_map(|g| g.first().and_then(|&i| self.configs.get(i)))
                .collect()
        };
        per_node
            .into_iter()
            .map(|c| {
                NodeConfiguration::from_ids_unchecked(c.ids.iter().copied().map(VertexId).collect())
            })
            .collect()
    }

    /// Replaces the configurations with their packed expansion.
    pub fn packed(mut self, packed: &PackedSchedule, graph: &CompatibilityGraph) -> Self {
        self.configs = packed
            .configs
            .iter()
            .map(|c| config_doc(c, graph))
            .collect();
        self.node_groups = packed.node_groups.clone();
        self.n = packed.node_count;
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

/// Reads a general graph document: `{"vertices": [...], "edges": [[a, b], ...]}`.
pub fn parse_graph(json: &str) -> Result<crate::oracle::GeneralGraph> {
    let doc: crate::oracle::GeneralGraph =
        serde_json::from_str(json).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    let vs: BTreeSet<u32> = doc.vertices.iter().copied().collect();
    if let Some((a, b)) = doc
        .edges
        .iter()
        .find(|(a, b)| !vs.contains(a) || !vs.contains(b))
    {
        return Err(Error::InvalidInstance(format!(
            "edge ({a}, {b}) has an unknown endpoint"
        )));
    }
    if let Some((a, _)) = doc.edges.iter().find(|(a, b)| a == b) {
        return Err(Error::InvalidInstance(format!("self loop on {a}")));
    }
    Ok(crate::oracle::GeneralGraph::new(doc.vertices, doc.edges))
}

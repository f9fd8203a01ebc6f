//! Instance data model: the multipartite compatibility graph, scope, node
//! configurations and schedules, plus the input and schedule constraint checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::TargetSpec;
use crate::pipeline::PackingTable;

/// Globally unique vertex identifier. Ids are unique across all layers.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// A single dimension value as it appears in an input document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionValue {
    pub id: VertexId,
    pub dimension: usize,
    pub label: String,
}

/// A d-partite undirected graph whose layers are dimensions and whose edges
/// are compatibility relationships between values of different dimensions.
///
/// Construction is permissive so that malformed inputs can be diagnosed by
/// [`validate_instance`]; solvers only run on validated instances.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityGraph {
    dimensions: Vec<String>,
    layers: Vec<BTreeSet<VertexId>>,
    labels: BTreeMap<VertexId, String>,
    dim_of: BTreeMap<VertexId, usize>,
    duplicates: Vec<VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl CompatibilityGraph {
    pub fn new<E>(dimensions: Vec<String>, values: Vec<DimensionValue>, edges: E) -> Self
    where
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut layers = vec![BTreeSet::new(); dimensions.len()];
        let mut labels = BTreeMap::new();
        let mut dim_of = BTreeMap::new();
        let mut duplicates = Vec::new();
        for value in values {
            if dim_of.contains_key(&value.id) {
                duplicates.push(value.id);
                continue;
            }
            if value.dimension >= layers.len() {
                layers.resize(value.dimension + 1, BTreeSet::new());
            }
            layers[value.dimension].insert(value.id);
            dim_of.insert(value.id, value.dimension);
            labels.insert(value.id, value.label);
        }
        let mut graph = CompatibilityGraph {
            dimensions,
            layers,
            labels,
            dim_of,
            duplicates,
            edges: BTreeSet::new(),
            adjacency: BTreeMap::new(),
        };
        for (a, b) in edges {
            graph.insert_edge(a, b);
        }
        graph
    }

    /// Builds a graph from plain id layers; labels default to the id.
    pub fn from_layers<E>(layers: Vec<Vec<u32>>, edges: E) -> Self
    where
        E: IntoIterator<Item = (u32, u32)>,
    {
        let dimensions = (0..layers.len()).map(|i| format!("dim{i}")).collect();
        let values = layers
            .iter()
            .enumerate()
            .flat_map(|(dimension, ids)| {
                ids.iter().map(move |&id| DimensionValue {
                    id: VertexId(id),
                    dimension,
                    label: id.to_string(),
                })
            })
            .collect();
        let edges = edges.into_iter().map(|(a, b)| (VertexId(a), VertexId(b)));
        Self::new(dimensions, values, edges)
    }

    fn insert_edge(&mut self, a: VertexId, b: VertexId) {
        let key = if a <= b { (a, b) } else { (b, a) };
        if self.edges.insert(key) {
            self.adjacency.entry(a).or_default().insert(b);
            self.adjacency.entry(b).or_default().insert(a);
        }
    }

    pub fn dimension_count(&self) -> usize {
        self.layers.len()
    }

    pub fn dimension_names(&self) -> &[String] {
        &self.dimensions
    }

    pub fn layer(&self, dimension: usize) -> &BTreeSet<VertexId> {
        &self.layers[dimension]
    }

    pub fn layers(&self) -> &[BTreeSet<VertexId>] {
        &self.layers
    }

    pub fn dimension_of(&self, v: VertexId) -> Option<usize> {
        self.dim_of.get(&v).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.dim_of.contains_key(&v)
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.dim_of.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.dim_of.len()
    }

    /// Normalized `(min, max)` edge pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    /// Returns a copy of the graph without `removed` and their incident edges.
    pub fn without_vertices(&self, removed: &BTreeSet<VertexId>) -> Self {
        if removed.is_empty() {
            return self.clone();
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| layer.difference(removed).copied().collect())
            .collect();
        let keep = |v: &VertexId| !removed.contains(v);
        let labels = self
            .labels
            .iter()
            .filter(|(v, _)| keep(v))
            .map(|(v, l)| (*v, l.clone()))
            .collect();
        let dim_of = self
            .dim_of
            .iter()
            .filter(|(v, _)| keep(v))
            .map(|(v, d)| (*v, *d))
            .collect();
        let mut graph = CompatibilityGraph {
            dimensions: self.dimensions.clone(),
            layers,
            labels,
            dim_of,
            duplicates: self.duplicates.clone(),
            edges: BTreeSet::new(),
            adjacency: BTreeMap::new(),
        };
        for &(a, b) in &self.edges {
            if keep(&a) && keep(&b) {
                graph.insert_edge(a, b);
            }
        }
        graph
    }

    /// True when some size-d configuration could still be assembled, i.e. no
    /// layer is empty.
    pub fn first_empty_layer(&self) -> Option<usize> {
        self.layers.iter().position(BTreeSet::is_empty)
    }
}

/// How include sets constrain a schedule.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncludeMode {
    /// Include sets must be covered and, in dimensions where they are given,
    /// no other value may appear. Every value that survives scoping and can
    /// appear in some configuration must be covered.
    #[default]
    Exclusive,
    /// Include sets are coverage requirements only; nothing else has to be
    /// covered and other values remain usable. Used by reduced instances.
    CoverOnly,
}

/// Per-dimension include and exclude sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub include: Vec<BTreeSet<VertexId>>,
    pub exclude: Vec<BTreeSet<VertexId>>,
    #[serde(default)]
    pub mode: IncludeMode,
}

impl Scope {
    pub fn empty(dimensions: usize) -> Self {
        Scope {
            include: vec![BTreeSet::new(); dimensions],
            exclude: vec![BTreeSet::new(); dimensions],
            mode: IncludeMode::Exclusive,
        }
    }

    pub fn include_union(&self) -> BTreeSet<VertexId> {
        self.include.iter().flatten().copied().collect()
    }

    pub fn exclude_union(&self) -> BTreeSet<VertexId> {
        self.exclude.iter().flatten().copied().collect()
    }
}

/// One value per dimension, position `i` drawn from layer `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeConfiguration(Vec<VertexId>);

impl NodeConfiguration {
    /// Checked constructor: exactly one value per dimension, pairwise adjacent.
    pub fn new(graph: &CompatibilityGraph, values: Vec<VertexId>) -> Result<Self> {
        let config = NodeConfiguration(values);
        if config.is_clique_in(graph) {
            Ok(config)
        } else {
            Err(Error::InvalidInstance(format!(
                "{config} is not a full configuration of compatible values"
            )))
        }
    }

    pub fn from_ids_unchecked(values: Vec<VertexId>) -> Self {
        NodeConfiguration(values)
    }

    pub fn from_raw(values: &[u32]) -> Self {
        NodeConfiguration(values.iter().copied().map(VertexId).collect())
    }

    pub fn values(&self) -> &[VertexId] {
        &self.0
    }

    pub fn get(&self, dimension: usize) -> VertexId {
        self.0[dimension]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    pub fn one_per_dimension(&self, graph: &CompatibilityGraph) -> bool {
        self.0.len() == graph.dimension_count()
            && self
                .0
                .iter()
                .enumerate()
                .all(|(i, &v)| graph.dimension_of(v) == Some(i))
    }

    pub fn pairwise_compatible(&self, graph: &CompatibilityGraph) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &a)| self.0[i + 1..].iter().all(|&b| graph.adjacent(a, b)))
    }

    pub fn is_clique_in(&self, graph: &CompatibilityGraph) -> bool {
        self.one_per_dimension(graph) && self.pairwise_compatible(graph)
    }
}

impl fmt::Display for NodeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Ordered list of node configurations. Constraint checks treat it as a
/// multiset; the order only matters for reproducibility. A schedule shorter
/// than the instance budget is a partial schedule.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    pub configs: Vec<NodeConfiguration>,
}

impl Schedule {
    pub fn new(configs: Vec<NodeConfiguration>) -> Self {
        Schedule { configs }
    }

    pub fn from_raw(configs: &[&[u32]]) -> Self {
        Schedule {
            configs: configs
                .iter()
                .map(|c| NodeConfiguration::from_raw(c))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, NodeConfiguration> {
        self.configs.iter()
    }

    pub fn covered(&self) -> BTreeSet<VertexId> {
        self.configs
            .iter()
            .flat_map(|c| c.values().iter().copied())
            .collect()
    }

    /// The configurations sorted, i.e. the canonical multiset form.
    pub fn sorted(&self) -> Vec<NodeConfiguration> {
        let mut v = self.configs.clone();
        v.sort();
        v
    }
}

impl FromIterator<NodeConfiguration> for Schedule {
    fn from_iter<T: IntoIterator<Item = NodeConfiguration>>(iter: T) -> Self {
        Schedule {
            configs: iter.into_iter().collect(),
        }
    }
}

/// A full problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: CompatibilityGraph,
    pub scope: Scope,
    pub n: usize,
    pub target: TargetSpec,
    pub max_dimension_size: Option<usize>,
    pub packing: Option<PackingTable>,
}

/// One input invariant violation reported by [`validate_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewDimensions(usize),
    DuplicateVertex(VertexId),
    SelfLoop(VertexId),
    DanglingEdge(VertexId, VertexId),
    IntraLayerEdge {
        a: VertexId,
        b: VertexId,
        dimension: usize,
    },
    ScopeShape {
        include: usize,
        exclude: usize,
        dimensions: usize,
    },
    IncludeExcludeOverlap {
        dimension: usize,
    },
    ScopeVertexOutsideLayer {
        vertex: VertexId,
        dimension: usize,
    },
    ZeroBudget,
    Target(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewDimensions(d) => write!(f, "need at least 2 dimensions, got {d}"),
            Violation::DuplicateVertex(v) => write!(f, "duplicate vertex id {v}"),
            Violation::SelfLoop(v) => write!(f, "self loop on vertex {v}"),
            Violation::DanglingEdge(a, b) => write!(f, "dangling edge ({a}, {b})"),
            Violation::IntraLayerEdge { a, b, dimension } => {
                write!(f, "intra-layer edge ({a}, {b}) in dimension {dimension}")
            }
            Violation::ScopeShape {
                include,
                exclude,
                dimensions,
            } => write!(
                f,
                "scope has {include} include and {exclude} exclude sets for {dimensions} dimensions"
            ),
            Violation::IncludeExcludeOverlap { dimension } => {
                write!(f, "include/exclude overlap, dimension {dimension}")
            }
            Violation::ScopeVertexOutsideLayer { vertex, dimension } => {
                write!(f, "scope vertex {vertex} is not in dimension {dimension}")
            }
            Violation::ZeroBudget => write!(f, "n must be at least 1"),
            Violation::Target(msg) => write!(f, "target: {msg}"),
        }
    }
}

/// Reports every violated input invariant; an empty report means valid.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let g = &inst.graph;
    let d = g.dimension_count();
    let mut out = Vec::new();
    if d < 2 {
        out.push(Violation::TooFewDimensions(d));
    }
    out.extend(g.duplicates.iter().copied().map(Violation::DuplicateVertex));
    for (a, b) in g.edges() {
        if a == b {
            out.push(Violation::SelfLoop(a));
            continue;
        }
        match (g.dimension_of(a), g.dimension_of(b)) {
            (Some(da), Some(db)) if da == db => out.push(Violation::IntraLayerEdge {
                a,
                b,
                dimension: da,
            }),
            (Some(_), Some(_)) => {}
            _ => out.push(Violation::DanglingEdge(a, b)),
        }
    }

    let scope = &inst.scope;
    if scope.include.len() != d || scope.exclude.len() != d {
        out.push(Violation::ScopeShape {
            include: scope.include.len(),
            exclude: scope.exclude.len(),
            dimensions: d,
        });
    } else {
        for i in 0..d {
            if !scope.include[i].is_disjoint(&scope.exclude[i]) {
                out.push(Violation::IncludeExcludeOverlap { dimension: i });
            }
            let mut seen = BTreeSet::new();
            for &v in scope.include[i].iter().chain(&scope.exclude[i]) {
                if g.dimension_of(v) != Some(i) && seen.insert(v) {
                    out.push(Violation::ScopeVertexOutsideLayer {
                        vertex: v,
                        dimension: i,
                    });
                }
            }
        }
    }

    if inst.n < 1 {
        out.push(Violation::ZeroBudget);
    }
    out.extend(
        inst.target
            .validate_against(g)
            .into_iter()
            .map(Violation::Target),
    );
    out
}

/// Outcome of checking a schedule against the six schedule constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// |S| = n.
    pub length: bool,
    /// Every configuration holds exactly one value per dimension.
    pub one_per_dimension: bool,
    /// All values inside a configuration are pairwise compatible.
    pub pairwise_compatible: bool,
    /// No excluded value appears.
    pub excludes_avoided: bool,
    /// Every required value (and every include value) appears.
    pub includes_covered: bool,
    /// In dimensions with an exclusive include set, nothing outside it appears.
    pub include_exclusive: bool,
    pub uncovered: Vec<VertexId>,
}

impl ConstraintReport {
    pub fn all_satisfied(&self) -> bool {
        self.flags().iter().all(|&f| f)
    }

    pub fn flags(&self) -> [bool; 6] {
        [
            self.length,
            self.one_per_dimension,
            self.pairwise_compatible,
            self.excludes_avoided,
            self.includes_covered,
            self.include_exclusive,
        ]
    }

    /// 1-based numbers of the violated constraints.
    pub fn violated(&self) -> Vec<usize> {
        self.flags()
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Checks `schedule` against the schedule constraints. `required` is the set
/// of values that must be covered; include values are always required.
pub fn check_schedule(
    schedule: &Schedule,
    inst: &Instance,
    required: &BTreeSet<VertexId>,
) -> ConstraintReport {
    let g = &inst.graph;
    let scope = &inst.scope;
    let covered = schedule.covered();
    let excluded = scope.exclude_union();

    let uncovered: Vec<VertexId> = required
        .iter()
        .chain(scope.include_union().iter())
        .filter(|v| !covered.contains(v))
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let include_exclusive = match scope.mode {
        IncludeMode::CoverOnly => true,
        IncludeMode::Exclusive => schedule.iter().all(|c| {
            c.values().iter().enumerate().all(|(i, v)| {
                scope
                    .include
                    .get(i)
                    .is_none_or(|inc| inc.is_empty() || inc.contains(v))
            })
        }),
    };

    ConstraintReport {
        length: schedule.len() == inst.n,
        one_per_dimension: schedule.iter().all(|c| c.one_per_dimension(g)),
        pairwise_compatible: schedule.iter().all(|c| c.pairwise_compatible(g)),
        excludes_avoided: covered.is_disjoint(&excluded),
        includes_covered: uncovered.is_empty(),
        include_exclusive,
        uncovered,
    }
}

//! Reduction from clique cover on general graphs to schedule design, and an
//! exhaustive solver for small instances.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CompatibilityGraph, IncludeMode, Instance, NodeConfiguration, Schedule, Scope, VertexId,
};
use crate::objective::{adjust_targets, cost, TargetSpec};

/// Largest number of candidate configurations (product of layer sizes) the
/// exhaustive solver accepts.
pub const MAX_CONFIGURATIONS: u64 = 1_000;
/// Largest number of clique multisets the exhaustive solver accepts.
pub const MAX_MULTISETS: u64 = 1_000_000;

/// An undirected simple graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralGraph {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl GeneralGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Self {
        let vertices: BTreeSet<u32> = vertices.into_iter().collect();
        let edges: BTreeSet<(u32, u32)> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        GeneralGraph {
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&key).is_ok()
    }

    pub fn is_clique(&self, set: &BTreeSet<u32>) -> bool {
        let vs: Vec<u32> = set.iter().copied().collect();
        vs.iter()
            .enumerate()
            .all(|(i, &a)| vs[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }
}

/// Builds the schedule instance whose feasible schedules of length `n` are
/// exactly the covers of `g` by at most `n` cliques of two or more vertices.
///
/// Dimension `i` holds one copy of every vertex of `g`; copy `j` of dimension
/// `i` gets id `i * |V| + j`. Copies of adjacent vertices are joined across
/// dimensions, and copies of the same vertex are joined across every
/// dimension pair except `(0, 1)`. Dimension `i` must cover the copy of
/// vertex `i`. The objective is constant zero.
pub fn reduce(g: &GeneralGraph, n: usize) -> Result<Instance> {
    let k = g.vertices.len();
    if k < 2 {
        return Err(Error::InvalidInstance(format!(
            "reduction needs at least 2 vertices, got {k}"
        )));
    }
    let id = |dim: usize, j: usize| (dim * k + j) as u32;
    let layers: Vec<Vec<u32>> = (0..k).map(|i| (0..k).map(|j| id(i, j)).collect()).collect();
    let mut edges = Vec::new();
    for di in 0..k {
        for dj in di + 1..k {
            for p in 0..k {
                for q in 0..k {
                    let joined = if p == q {
                        (di, dj) != (0, 1)
                    } else {
                        g.adjacent(g.vertices[p], g.vertices[q])
                    };
                    if joined {
                        edges.push((id(di, p), id(dj, q)));
                    }
                }
            }
        }
    }
    let graph = CompatibilityGraph::from_layers(layers, edges);
    let mut scope = Scope::empty(k);
    scope.mode = IncludeMode::CoverOnly;
    for i in 0..k {
        scope.include[i].insert(VertexId(id(i, i)));
    }
    let targets: Vec<(VertexId, f64)> = graph.vertices().map(|v| (v, 1.0)).collect();
    let target = TargetSpec::dimension(Some(vec![0.0; k]), targets, &graph)?;
    Ok(Instance {
        graph,
        scope,
        n,
        target,
        max_dimension_size: None,
        packing: None,
    })
}

/// Maps a schedule of `reduce(g, n)` back to a clique cover of `g`.
///
/// Each configuration becomes the set of original vertices it holds copies
/// of; repeated sets are dropped.
pub fn map_back(schedule: &Schedule, g: &GeneralGraph) -> Result<Vec<BTreeSet<u32>>> {
    let k = g.vertices.len();
    if k == 0 {
        return Err(Error::InvalidSolution("graph has no vertices".into()));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in schedule.iter() {
        let set: BTreeSet<u32> = c
            .values()
            .iter()
            .map(|v| g.vertices.get(v.0 as usize % k).copied())
            .collect::<Option<_>>()
            .ok_or_else(|| {
                Error::InvalidSolution(format!("{c} has an id outside the reduction"))
            })?;
        if !g.is_clique(&set) {
            return Err(Error::InvalidSolution(format!("{set:?} is not a clique")));
        }
        if seen.insert(set.clone()) {
            out.push(set);
        }
    }
    let covered: BTreeSet<u32> = out.iter().flatten().copied().collect();
    if let Some(v) = g.vertices.iter().find(|v| !covered.contains(v)) {
        return Err(Error::InvalidSolution(format!("vertex {v} is not covered")));
    }
    Ok(out)
}

/// Exact optimum of a small instance by enumeration of clique multisets.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub schedule: Schedule,
    pub cost: f64,
    /// Values every schedule has to cover.
    pub required: BTreeSet<VertexId>,
    /// The objective after dropping values no allowed configuration holds.
    pub target: TargetSpec,
}

/// Every configuration allowed by the scope, in lexicographic order.
pub fn allowed_configurations(inst: &Instance) -> Result<Vec<NodeConfiguration>> {
    let g = &inst.graph;
    let total = g
        .layers()
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64))
        .unwrap_or(u64::MAX);
    if total > MAX_CONFIGURATIONS {
        return Err(Error::TooLarge(format!(
            "{total} candidate configurations (limit {MAX_CONFIGURATIONS})"
        )));
    }
    let excluded = inst.scope.exclude_union();
    let allowed = |dim: usize, v: VertexId| {
        !excluded.contains(&v)
            && (inst.scope.mode == IncludeMode::CoverOnly
                || inst.scope.include[dim].is_empty()
                || inst.scope.include[dim].contains(&v))
    };
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(g.dimension_count());
    fn walk(
        g: &CompatibilityGraph,
        allowed: &dyn Fn(usize, VertexId) -> bool,
        current: &mut Vec<VertexId>,
        out: &mut Vec<NodeConfiguration>,
    ) {
        let dim = current.len();
        if dim == g.dimension_count() {
            out.push(NodeConfiguration::from_ids_unchecked(current.clone()));
            return;
        }
        for &v in g.layer(dim) {
            if allowed(dim, v) && current.iter().all(|&u| g.adjacent(u, v)) {
                current.push(v);
                walk(g, allowed, current, out);
                current.pop();
            }
        }
    }
    walk(g, &allowed, &mut current, &mut out);
    Ok(out)
}

fn multiset_count(kinds: u64, n: u64) -> u64 {
    // C(kinds + n - 1, n), saturating
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc * (kinds + i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Finds a minimum-cost schedule by trying every multiset of `n` allowed
/// configurations. The constraints are checked directly; the search stops
/// early once a schedule of cost zero is found.
pub fn brute_force(inst: &Instance) -> Result<OracleSolution> {
    let configs = allowed_configurations(inst)?;
    let count = multiset_count(configs.len() as u64, inst.n as u64);
    if count > MAX_MULTISETS {
        return Err(Error::TooLarge(format!(
            "{count} clique multisets (limit {MAX_MULTISETS})"
        )));
    }
    let coverable: BTreeSet<VertexId> = configs.iter().flat_map(|c| c.values().to_vec()).collect();
    let includes = inst.scope.include_union();
    if configs.is_empty() || !includes.is_subset(&coverable) || inst.n == 0 {
        return Err(Error::Infeasible);
    }
    let required = match inst.scope.mode {
        IncludeMode::Exclusive => coverable.clone(),
        IncludeMode::CoverOnly => includes,
    };
    let surviving = inst.graph.without_vertices(
        &inst
            .graph
            .vertices()
            .filter(|v| !coverable.contains(v))
            .collect(),
    );
    let target = adjust_targets(&inst.target, &surviving)?;

    let n = inst.n;
    let mut idx = vec![0usize; n];
    let mut best: Option<(f64, Schedule)> = None;
    loop {
        let schedule = Schedule::new(idx.iter().map(|&i| configs[i].clone()).collect());
        if required.is_subset(&schedule.covered()) {
            let c = cost(&schedule, &target)?;
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, schedule));
                if c == 0.0 {
                    break;
                }
            }
        }
        // next non-decreasing index sequence
        let Some(pos) = (0..n).rev().find(|&p| idx[p] + 1 < configs.len()) else {
            break;
        };
        let v = idx[pos] + 1;
        for slot in &mut idx[pos..] {
            *slot = v;
        }
    }
    let (cost, schedule) = best.ok_or(Error::Infeasible)?;
    Ok(OracleSolution {
        schedule,
        cost,
        required,
        target,
    })
}

//! Graph preparation and clique construction: scoping, pruning, layer size
//! restriction, depth-first clique extension and clique cover.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{CompatibilityGraph, IncludeMode, NodeConfiguration, Scope, VertexId};
use crate::objective::TargetSpec;

fn check_layers(g: &CompatibilityGraph) -> Result<()> {
    match g.first_empty_layer() {
        Some(dimension) => Err(Error::EmptyLayer { dimension }),
        None => Ok(()),
    }
}

/// Removes excluded values and, for exclusive include sets, every value of
/// that dimension outside the include set.
pub fn scope_graph(g: &CompatibilityGraph, scope: &Scope) -> Result<CompatibilityGraph> {
    let mut removed = BTreeSet::new();
    for (i, layer) in g.layers().iter().enumerate() {
        let exclude = scope.exclude.get(i);
        let include = scope.include.get(i).filter(|inc| !inc.is_empty());
        for v in layer {
            let excluded = exclude.is_some_and(|x| x.contains(v));
            let outside =
                scope.mode == IncludeMode::Exclusive && include.is_some_and(|inc| !inc.contains(v));
            if excluded || outside {
                removed.insert(*v);
            }
        }
    }
    let scoped = g.without_vertices(&removed);
    check_layers(&scoped)?;
    Ok(scoped)
}

/// Removes values that cannot take part in any configuration under the given
/// include set, repeating until nothing changes.
///
/// A value outside `include_union` goes when it has no neighbour in some other
/// layer, or (when `include_union` is non-empty) no neighbour in
/// `include_union` at all.
pub fn prune_graph(
    g: &CompatibilityGraph,
    include_union: &BTreeSet<VertexId>,
) -> Result<CompatibilityGraph> {
    prune_graph_with(g, include_union, true)
}

/// [`prune_graph`] with the include-neighbour rule optional. The rule only
/// holds when include sets are exclusive.
pub fn prune_graph_with(
    g: &CompatibilityGraph,
    include_union: &BTreeSet<VertexId>,
    require_include_neighbor: bool,
) -> Result<CompatibilityGraph> {
    let d = g.dimension_count();
    let mut current = g.clone();
    loop {
        let includes: BTreeSet<VertexId> = include_union
            .iter()
            .copied()
            .filter(|v| current.contains(*v))
            .collect();
        let mut removed = BTreeSet::new();
        for v in current.vertices() {
            let dim = current.dimension_of(v).expect("vertex has a layer");
            let mut reached = vec![false; d];
            let mut touches_include = false;
            for w in current.neighbors(v) {
                if let Some(dw) = current.dimension_of(w) {
                    reached[dw] = true;
                }
                touches_include |= includes.contains(&w);
            }
            let spans = (0..d).all(|i| i == dim || reached[i]);
            if includes.contains(&v) {
                if !spans {
                    return Err(Error::UnsatisfiableInclude { vertex: v });
                }
            } else if !spans
                || (require_include_neighbor && !includes.is_empty() && !touches_include)
            {
                removed.insert(v);
            }
        }
        if removed.is_empty() {
            return Ok(current);
        }
        current = current.without_vertices(&removed);
        check_layers(&current)?;
    }
}

/// How much target mass each value carries; for pair and configuration
/// targets a value collects the mass of every unit it appears in.
pub fn vertex_prevalence(target: &TargetSpec) -> BTreeMap<VertexId, f64> {
    use crate::objective::Unit;
    let mut out = BTreeMap::new();
    for group in target.groups() {
        for (unit, t) in &group.targets {
            let vs: Vec<VertexId> = match unit {
                Unit::Value(v) => vec![*v],
                Unit::Pair(a, b) => vec![*a, *b],
                Unit::Config(c) => c.values().to_vec(),
            };
            for v in vs {
                *out.entry(v).or_insert(0.0) += t;
            }
        }
    }
    out
}

/// Shrinks every layer larger than `max_size` to its `max_size` most
/// prevalent values (ties by ascending id). Values in `protected` are always
/// kept, so a layer may stay above the limit.
pub fn restrict_dimension_size(
    g: &CompatibilityGraph,
    target: &TargetSpec,
    max_size: usize,
    protected: &BTreeSet<VertexId>,
) -> CompatibilityGraph {
    let prevalence = vertex_prevalence(target);
    let mut removed = BTreeSet::new();
    for layer in g.layers() {
        if layer.len() <= max_size {
            continue;
        }
        let kept_protected = layer.iter().filter(|v| protected.contains(v)).count();
        let mut rest: Vec<VertexId> = layer
            .iter()
            .copied()
            .filter(|v| !protected.contains(v))
            .collect();
        rest.sort_by(|a, b| {
            let pa = prevalence.get(a).copied().unwrap_or(0.0);
            let pb = prevalence.get(b).copied().unwrap_or(0.0);
            pb.total_cmp(&pa).then(a.cmp(b))
        });
        let slots = max_size.saturating_sub(kept_protected);
        removed.extend(rest.into_iter().skip(slots));
    }
    g.without_vertices(&removed)
}

struct Frame {
    dim: usize,
    candidates: Vec<VertexId>,
    next: usize,
}

/// Lazily enumerates every full configuration that contains `seed`, by
/// depth-first extension one dimension at a time.
///
/// At each depth the dimension with the fewest compatible candidates is
/// filled next. Candidates in `uncovered` are tried before the others, and
/// the order inside each class is shuffled with `rng`. Every configuration
/// containing the seed is produced exactly once.
pub struct Extensions<'a, R: Rng> {
    graph: &'a CompatibilityGraph,
    uncovered: &'a BTreeSet<VertexId>,
    rng: &'a mut R,
    slots: Vec<Option<VertexId>>,
    seeded: usize,
    stack: Vec<Frame>,
    started: bool,
    finished: bool,
}

impl<'a, R: Rng> Extensions<'a, R> {
    /// An invalid seed (values sharing a dimension, not pairwise adjacent or
    /// not in the graph) yields nothing. An empty seed enumerates every
    /// configuration of the graph.
    pub fn new(
        graph: &'a CompatibilityGraph,
        seed: &[VertexId],
        uncovered: &'a BTreeSet<VertexId>,
        rng: &'a mut R,
    ) -> Self {
        let d = graph.dimension_count();
        let mut slots = vec![None; d];
        let mut valid = true;
        for (i, &v) in seed.iter().enumerate() {
            match graph.dimension_of(v) {
                Some(dim) if slots[dim].is_none() => slots[dim] = Some(v),
                _ => valid = false,
            }
            if !seed[..i].iter().all(|&u| graph.adjacent(u, v)) {
                valid = false;
            }
        }
        Extensions {
            graph,
            uncovered,
            rng,
            slots,
            seeded: seed.len(),
            stack: Vec::new(),
            started: false,
            finished: !valid,
        }
    }

    fn current(&self) -> NodeConfiguration {
        NodeConfiguration::from_ids_unchecked(
            self.slots
                .iter()
                .map(|s| s.expect("all slots filled"))
                .collect(),
        )
    }

    fn push_frame(&mut self) {
        let members: Vec<VertexId> = self.slots.iter().flatten().copied().collect();
        let mut best: Option<(usize, Vec<VertexId>)> = None;
        for (dim, slot) in self.slots.iter().enumerate() {
            if slot.is_some() {
                continue;
            }
            let candidates: Vec<VertexId> = self
                .graph
                .layer(dim)
                .iter()
                .copied()
                .filter(|&c| members.iter().all(|&m| self.graph.adjacent(m, c)))
                .collect();
            if best
                .as_ref()
                .is_none_or(|(_, b)| candidates.len() < b.len())
            {
                let empty = candidates.is_empty();
                best = Some((dim, candidates));
                if empty {
                    break;
                }
            }
        }
        let (dim, mut candidates) = best.expect("an unfilled dimension exists");
        candidates.shuffle(self.rng);
        let (mut first, rest): (Vec<_>, Vec<_>) = candidates
            .into_iter()
            .partition(|c| self.uncovered.contains(c));
        first.extend(rest);
        self.stack.push(Frame {
            dim,
            candidates: first,
            next: 0,
        });
    }
}

impl<R: Rng> Iterator for Extensions<'_, R> {
    type Item = NodeConfiguration;

    fn next(&mut self) -> Option<NodeConfiguration> {
        if self.finished {
            return None;
        }
        let d = self.slots.len();
        if !self.started {
            self.started = true;
            if self.seeded == d {
                self.finished = true;
                return Some(self.current());
            }
            self.push_frame();
        }
        while let Some(frame) = self.stack.last_mut() {
            if frame.next < frame.candidates.len() {
                let v = frame.candidates[frame.next];
                frame.next += 1;
                let dim = frame.dim;
                self.slots[dim] = Some(v);
                if self.seeded + self.stack.len() == d {
                    return Some(self.current());
                }
                self.push_frame();
            } else {
                let dim = frame.dim;
                self.slots[dim] = None;
                self.stack.pop();
            }
        }
        self.finished = true;
        None
    }
}

/// Extends `seed` to a full configuration, preferring values in `uncovered`.
/// Returns `None` when no configuration contains the seed.
pub fn build_clique<R: Rng>(
    g: &CompatibilityGraph,
    seed: &[VertexId],
    uncovered: &BTreeSet<VertexId>,
    rng: &mut R,
) -> Option<NodeConfiguration> {
    Extensions::new(g, seed, uncovered, rng).next()
}

/// A set of configurations whose union covers every coverable value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CliqueCover {
    pub cliques: Vec<NodeConfiguration>,
    pub covered: BTreeSet<VertexId>,
    /// Values no configuration can contain; callers drop them from the graph.
    pub uncoverable: BTreeSet<VertexId>,
}

impl CliqueCover {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Runs clique construction from each seed that is still uncovered, in
    /// the given order. A seed in `protected` that cannot be covered is an
    /// error; any other such seed is recorded as uncoverable.
    pub fn extend<R: Rng>(
        &mut self,
        g: &CompatibilityGraph,
        seeds: impl IntoIterator<Item = VertexId>,
        protected: &BTreeSet<VertexId>,
        rng: &mut R,
    ) -> Result<()> {
        for v in seeds {
            if self.covered.contains(&v) || self.uncoverable.contains(&v) || !g.contains(v) {
                continue;
            }
            let uncovered: BTreeSet<VertexId> = g
                .vertices()
                .filter(|u| !self.covered.contains(u) && !self.uncoverable.contains(u))
                .collect();
            match build_clique(g, &[v], &uncovered, rng) {
                Some(clique) => {
                    self.covered.extend(clique.values().iter().copied());
                    self.cliques.push(clique);
                }
                None if protected.contains(&v) => {
                    return Err(Error::UnsatisfiableInclude { vertex: v })
                }
                None => {
                    self.uncoverable.insert(v);
                }
            }
        }
        Ok(())
    }
}

/// Covers every value of `g`: include values first, then the rest, each in
/// ascending id order.
pub fn clique_cover<R: Rng>(
    g: &CompatibilityGraph,
    include_union: &BTreeSet<VertexId>,
    rng: &mut R,
) -> Result<CliqueCover> {
    let mut cover = CliqueCover::default();
    cover.extend(g, include_union.iter().copied(), include_union, rng)?;
    let rest: Vec<VertexId> = g
        .vertices()
        .filter(|v| !include_union.contains(v))
        .collect();
    cover.extend(g, rest, include_union, rng)?;
    Ok(cover)
}

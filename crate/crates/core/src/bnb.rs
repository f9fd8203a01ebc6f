//! Branch and bound over schedules built one configuration at a time.
//!
//! Two families share the search loop. `Scratch` grows schedules from the
//! empty schedule and completes them greedily from the clique cover.
//! `Refine` rewrites the expanded cover position by position, always keeping
//! the remaining suffix of the expanded cover as the completion.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annealing::expand_cover;
use crate::error::{Error, Result};
use crate::graph::Extensions;
use crate::model::{CompatibilityGraph, NodeConfiguration, Schedule, VertexId};
use crate::objective::lower_bound;
use crate::space::{Budget, SearchSpace};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Scratch,
    Refine,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// LIFO; the best child of an expansion is expanded next.
    DepthFirst,
    /// Always continue from the deepest level, best bound first.
    DepthFirstBestFirst,
    /// Global priority on bound, deeper nodes first on ties.
    BestFirstDepthFirst,
}

impl Strategy {
    /// Default branch factor for the strategy.
    pub fn default_branch_factor(self) -> usize {
        match self {
            Strategy::DepthFirst | Strategy::DepthFirstBestFirst => 500,
            Strategy::BestFirstDepthFirst => 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BnbConfig {
    pub family: Family,
    /// Complete every expanded node to find incumbents early.
    pub look_ahead: bool,
    pub strategy: Strategy,
    pub branch_factor: usize,
    pub seed: u64,
}

impl BnbConfig {
    pub fn new(family: Family, look_ahead: bool, strategy: Strategy, seed: u64) -> Self {
        BnbConfig {
            family,
            look_ahead,
            strategy,
            branch_factor: strategy.default_branch_factor(),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchNode {
    pub partial: Schedule,
    /// Lower bound on the cost of any full-length completion.
    pub bound: f64,
}

impl SearchNode {
    pub fn depth(&self) -> usize {
        self.partial.len()
    }
}

fn with_bound(space: &SearchSpace, partial: Schedule) -> Result<SearchNode> {
    let bound = lower_bound(&partial, space.n, &space.target)?;
    Ok(SearchNode { partial, bound })
}

fn extend(node: &SearchNode, clique: NodeConfiguration) -> Schedule {
    let mut configs = Vec::with_capacity(node.partial.len() + 1);
    configs.extend(node.partial.configs.iter().cloned());
    configs.push(clique);
    Schedule::new(configs)
}

/// Collects up to `limit` distinct configurations by taking one extension of
/// each seed in turn.
fn round_robin<R: Rng>(
    g: &CompatibilityGraph,
    seeds: &[Vec<VertexId>],
    priority: &BTreeSet<VertexId>,
    limit: usize,
    rng: &mut R,
) -> Vec<NodeConfiguration> {
    let mut rngs: Vec<ChaCha8Rng> = seeds
        .iter()
        .map(|_| ChaCha8Rng::seed_from_u64(rng.gen()))
        .collect();
    let mut iters: Vec<Extensions<'_, ChaCha8Rng>> = seeds
        .iter()
        .zip(rngs.iter_mut())
        .map(|(s, r)| Extensions::new(g, s, priority, r))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < limit && !iters.is_empty() {
        let mut i = 0;
        while i < iters.len() && out.len() < limit {
            match iters[i].next() {
                Some(c) => {
                    if seen.insert(c.clone()) {
                        out.push(c);
                    }
                    i += 1;
                }
                None => {
                    iters.remove(i);
                }
            }
        }
    }
    out
}

/// Seeds that reach every configuration exactly once: the values of the
/// smallest layer, shuffled.
fn any_clique_seeds<R: Rng>(g: &CompatibilityGraph, rng: &mut R) -> Vec<Vec<VertexId>> {
    let layer = g
        .layers()
        .iter()
        .min_by_key(|l| l.len())
        .expect("graph has layers");
    let mut seeds: Vec<Vec<VertexId>> = layer.iter().map(|v| vec![*v]).collect();
    seeds.shuffle(rng);
    seeds
}

/// Children of a from-scratch node.
///
/// While required values are uncovered, each child appends a configuration
/// that covers at least one of them. Afterwards any configuration may be
/// appended.
pub fn branch_scratch<R: Rng>(
    node: &SearchNode,
    space: &SearchSpace,
    branch_factor: usize,
    rng: &mut R,
) -> Result<Vec<SearchNode>> {
    let configs = &node.partial.configs;
    let uncovered = space.uncovered(configs);
    let cliques = if !uncovered.is_empty() {
        let mut seeds: Vec<Vec<VertexId>> = uncovered.iter().map(|v| vec![*v]).collect();
        seeds.shuffle(rng);
        round_robin(&space.graph, &seeds, &uncovered, branch_factor, rng)
    } else {
        let seeds = any_clique_seeds(&space.graph, rng);
        let none = BTreeSet::new();
        round_robin(&space.graph, &seeds, &none, branch_factor, rng)
    };
    cliques
        .into_iter()
        .map(|c| with_bound(space, extend(node, c)))
        .collect()
}

/// Children of a refining node: each appends a configuration that keeps the
/// schedule covering once the rest of `expanded` is appended after it.
pub fn branch_refine<R: Rng>(
    node: &SearchNode,
    expanded: &Schedule,
    space: &SearchSpace,
    branch_factor: usize,
    rng: &mut R,
) -> Result<Vec<SearchNode>> {
    let depth = node.depth();
    let n = expanded.len();
    if depth >= n {
        return Ok(Vec::new());
    }
    let mut fixed: Vec<NodeConfiguration> = node.partial.configs.clone();
    fixed.extend(expanded.configs[depth + 1..].iter().cloned());
    let missing: Vec<VertexId> = space.uncovered(&fixed).into_iter().collect();
    let none = BTreeSet::new();
    let cliques = if missing.is_empty() {
        let seeds = any_clique_seeds(&space.graph, rng);
        round_robin(&space.graph, &seeds, &none, branch_factor, rng)
    } else {
        round_robin(&space.graph, &[missing], &none, branch_factor, rng)
    };
    cliques
        .into_iter()
        .map(|c| with_bound(space, extend(node, c)))
        .collect()
}

/// Fills `partial` up to `n` from the cover: the configuration covering the
/// most uncovered values while any remain (first in cover order on ties),
/// then uniformly random ones.
pub fn complete_scratch<R: Rng>(partial: &Schedule, space: &SearchSpace, rng: &mut R) -> Schedule {
    let mut configs = partial.configs.clone();
    let mut uncovered = space.uncovered(&configs);
    let cover = &space.cover.cliques;
    while configs.len() < space.n && !cover.is_empty() {
        let greedy = cover
            .iter()
            .map(|c| {
                (
                    c.values().iter().filter(|v| uncovered.contains(v)).count(),
                    c,
                )
            })
            .filter(|(k, _)| *k > 0)
            .fold(
                None::<(usize, &NodeConfiguration)>,
                |best, (k, c)| match best {
                    Some((bk, _)) if bk >= k => best,
                    _ => Some((k, c)),
                },
            );
        let pick = match greedy {
            Some((_, c)) => c.clone(),
            None => cover.choose(rng).expect("non-empty").clone(),
        };
        for v in pick.values() {
            uncovered.remove(v);
        }
        configs.push(pick);
    }
    Schedule::new(configs)
}

/// `partial` followed by the last `n - |partial|` entries of `expanded`.
pub fn complete_refine(partial: &Schedule, expanded: &Schedule) -> Schedule {
    let mut configs = partial.configs.clone();
    if configs.len() < expanded.len() {
        configs.extend(expanded.configs[partial.len()..].iter().cloned());
    }
    Schedule::new(configs)
}

pub fn is_feasible(schedule: &Schedule, required: &BTreeSet<VertexId>, n: usize) -> bool {
    schedule.len() == n && required.is_subset(&schedule.covered())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierEntry {
    pub node: SearchNode,
    pub seq: u64,
}

// Min-heap order: smaller bound first, then deeper (when asked), then older.
#[derive(Debug)]
struct Ranked {
    entry: FrontierEntry,
    deeper_first: bool,
}

impl Ranked {
    fn key(&self) -> (f64, Reverse<usize>, u64) {
        let depth = if self.deeper_first {
            Reverse(self.entry.node.depth())
        } else {
            Reverse(0)
        };
        (self.entry.node.bound, depth, self.entry.seq)
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        let (ab, ad, aseq) = self.key();
        let (bb, bd, bseq) = other.key();
        // reversed so BinaryHeap pops the smallest key
        bb.total_cmp(&ab).then(bd.cmp(&ad)).then(bseq.cmp(&aseq))
    }
}

#[derive(Debug)]
enum Frontier {
    Stack(Vec<FrontierEntry>),
    Levels(BTreeMap<usize, BinaryHeap<Ranked>>),
    Queue(BinaryHeap<Ranked>),
}

impl Frontier {
    fn new(strategy: Strategy) -> Self {
        match strategy {
            Strategy::DepthFirst => Frontier::Stack(Vec::new()),
            Strategy::DepthFirstBestFirst => Frontier::Levels(BTreeMap::new()),
            Strategy::BestFirstDepthFirst => Frontier::Queue(BinaryHeap::new()),
        }
    }

    fn len(&self) -> usize {
        match self {
            Frontier::Stack(s) => s.len(),
            Frontier::Levels(l) => l.values().map(BinaryHeap::len).sum(),
            Frontier::Queue(q) => q.len(),
        }
    }

    fn push(&mut self, entry: FrontierEntry) {
        match self {
            Frontier::Stack(s) => s.push(entry),
            Frontier::Levels(l) => l.entry(entry.node.depth()).or_default().push(Ranked {
                entry,
                deeper_first: false,
            }),
            Frontier::Queue(q) => q.push(Ranked {
                entry,
                deeper_first: true,
            }),
        }
    }

    fn pop(&mut self) -> Option<FrontierEntry> {
        match self {
            Frontier::Stack(s) => s.pop(),
            Frontier::Levels(l) => {
                let (&depth, heap) = l.iter_mut().next_back()?;
                let entry = heap.pop().map(|r| r.entry);
                if heap.is_empty() {
                    l.remove(&depth);
                }
                entry
            }
            Frontier::Queue(q) => q.pop().map(|r| r.entry),
        }
    }

    /// Entries in an order that rebuilds the same frontier when pushed back.
    fn snapshot(&self) -> Vec<FrontierEntry> {
        match self {
            Frontier::Stack(s) => s.clone(),
            Frontier::Levels(l) => l
                .values()
                .flat_map(|h| h.iter().map(|r| r.entry.clone()))
                .collect(),
            Frontier::Queue(q) => q.iter().map(|r| r.entry.clone()).collect(),
        }
    }
}

/// Resumable branch-and-bound state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BnbState {
    pub incumbent: Schedule,
    pub incumbent_cost: f64,
    pub expansions: u64,
    pub exhausted: bool,
    pub next_seq: u64,
    pub frontier: Vec<FrontierEntry>,
    #[serde(with = "crate::space::rng_serde")]
    rng: ChaCha8Rng,
}

impl BnbState {
    /// Keeps only the `limit` entries with the smallest bounds, in their
    /// original order.
    pub fn truncate_frontier(&mut self, limit: usize) {
        if self.frontier.len() <= limit {
            return;
        }
        let mut order: Vec<usize> = (0..self.frontier.len()).collect();
        order.sort_by(|&a, &b| {
            self.frontier[a]
                .node
                .bound
                .total_cmp(&self.frontier[b].node.bound)
                .then(a.cmp(&b))
        });
        let keep: BTreeSet<usize> = order.into_iter().take(limit).collect();
        let mut i = 0;
        self.frontier.retain(|_| {
            let k = keep.contains(&i);
            i += 1;
            k
        });
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BnbOutcome {
    pub schedule: Schedule,
    pub cost: f64,
    pub expansions: u64,
    /// True when the whole tree was explored, so the schedule is optimal for
    /// the family's search space.
    pub exhausted: bool,
}

pub struct BranchAndBound<'a> {
    space: &'a SearchSpace,
    cfg: BnbConfig,
    expanded: Schedule,
    frontier: Frontier,
    incumbent: Schedule,
    incumbent_cost: f64,
    expansions: u64,
    exhausted: bool,
    next_seq: u64,
    rng: ChaCha8Rng,
}

impl<'a> BranchAndBound<'a> {
    /// Starts with the expanded cover as incumbent and the empty schedule as
    /// root.
    pub fn new(space: &'a SearchSpace, cfg: BnbConfig) -> Result<Self> {
        let expanded = expand_cover(&space.cover, space.n)?;
        let cost = space.cost(&expanded)?;
        let root = with_bound(space, Schedule::default())?;
        let mut frontier = Frontier::new(cfg.strategy);
        frontier.push(FrontierEntry { node: root, seq: 0 });
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(BranchAndBound {
            space,
            cfg,
            incumbent: expanded.clone(),
            expanded,
            frontier,
            incumbent_cost: cost,
            expansions: 0,
            exhausted: false,
            next_seq: 1,
            rng,
        })
    }

    pub fn resume(space: &'a SearchSpace, cfg: BnbConfig, state: BnbState) -> Result<Self> {
        let expanded = expand_cover(&space.cover, space.n)?;
        let mut frontier = Frontier::new(cfg.strategy);
        for entry in state.frontier {
            frontier.push(entry);
        }
        Ok(BranchAndBound {
            space,
            cfg,
            expanded,
            frontier,
            incumbent: state.incumbent,
            incumbent_cost: state.incumbent_cost,
            expansions: state.expansions,
            exhausted: state.exhausted,
            next_seq: state.next_seq,
            rng: state.rng,
        })
    }

    pub fn state(&self) -> BnbState {
        BnbState {
            incumbent: self.incumbent.clone(),
            incumbent_cost: self.incumbent_cost,
            expansions: self.expansions,
            exhausted: self.exhausted,
            next_seq: self.next_seq,
            frontier: self.frontier.snapshot(),
            rng: self.rng.clone(),
        }
    }

    pub fn frontier_len(&self) -> usize {
        self.frontier.len()
    }

    fn offer(&mut self, schedule: Schedule) -> Result<()> {
        if !is_feasible(&schedule, &self.space.required, self.space.n) {
            return Ok(());
        }
        let cost = self.space.cost(&schedule)?;
        if cost < self.incumbent_cost {
            self.incumbent = schedule;
            self.incumbent_cost = cost;
        }
        Ok(())
    }

    // Each layer's uncovered required values need one slot apiece.
    fn can_still_cover(&self, node: &SearchNode) -> bool {
        let left = self.space.n - node.depth();
        let mut per_layer = vec![0usize; self.space.graph.dimension_count()];
        for v in self.space.uncovered(&node.partial.configs) {
            if let Some(d) = self.space.graph.dimension_of(v) {
                per_layer[d] += 1;
            }
        }
        per_layer.into_iter().all(|k| k <= left)
    }

    /// Pops and processes one frontier node. Returns false once the frontier
    /// is empty.
    pub fn step(&mut self) -> Result<bool> {
        let Some(entry) = self.frontier.pop() else {
            self.exhausted = true;
            return Ok(false);
        };
        let node = entry.node;
        if node.bound >= self.incumbent_cost || node.depth() >= self.space.n {
            return Ok(true);
        }
        self.expansions += 1;
        if self.cfg.look_ahead {
            let completion = match self.cfg.family {
                Family::Scratch => complete_scratch(&node.partial, self.space, &mut self.rng),
                Family::Refine => complete_refine(&node.partial, &self.expanded),
            };
            self.offer(completion)?;
        }
        let mut children = match self.cfg.family {
            Family::Scratch => {
                branch_scratch(&node, self.space, self.cfg.branch_factor, &mut self.rng)?
            }
            Family::Refine => branch_refine(
                &node,
                &self.expanded,
                self.space,
                self.cfg.branch_factor,
                &mut self.rng,
            )?,
        };
        let mut open = Vec::new();
        for child in children.drain(..) {
            if child.depth() == self.space.n {
                self.offer(child.partial)?;
            } else if self.cfg.family == Family::Refine || self.can_still_cover(&child) {
                open.push(child);
            }
        }
        open.retain(|c| c.bound < self.incumbent_cost);
        // stable: equal bounds keep generation order
        open.sort_by(|a, b| a.bound.total_cmp(&b.bound));
        let mut entries: Vec<FrontierEntry> = open
            .into_iter()
            .map(|node| {
                let seq = self.next_seq;
                self.next_seq += 1;
                FrontierEntry { node, seq }
            })
            .collect();
        if matches!(self.frontier, Frontier::Stack(_)) {
            entries.reverse();
        }
        for e in entries {
            self.frontier.push(e);
        }
        Ok(true)
    }

    pub fn run(&mut self, budget: Budget) -> Result<BnbOutcome> {
        let mut clock = budget.clock();
        while !self.exhausted && !clock.exhausted() {
            let before = self.expansions;
            if !self.step()? {
                break;
            }
            if self.expansions > before {
                clock.tick();
            }
        }
        Ok(self.outcome())
    }

    pub fn outcome(&self) -> BnbOutcome {
        BnbOutcome {
            schedule: self.incumbent.clone(),
            cost: self.incumbent_cost,
            expansions: self.expansions,
            exhausted: self.exhausted,
        }
    }
}

/// Runs branch and bound from scratch and returns the incumbent.
pub fn solve(space: &SearchSpace, cfg: BnbConfig, budget: Budget) -> Result<BnbOutcome> {
    if space.n == 0 {
        return Err(Error::Infeasible);
    }
    BranchAndBound::new(space, cfg)?.run(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_instance;
    use crate::pipeline::prepare;

    fn toy_space() -> SearchSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        prepare(&toy_instance(), &mut rng).unwrap()
    }

    fn cfg(s: &[u32]) -> NodeConfiguration {
        NodeConfiguration::from_raw(s)
    }

    fn node(space: &SearchSpace, configs: Vec<NodeConfiguration>) -> SearchNode {
        with_bound(space, Schedule::new(configs)).unwrap()
    }

    #[test]
    fn root_children_come_from_the_three_cliques() {
        let space = toy_space();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let kids = branch_scratch(&node(&space, vec![]), &space, 500, &mut rng).unwrap();
        let got: BTreeSet<_> = kids.iter().map(|k| k.partial.configs[0].clone()).collect();
        let all: BTreeSet<_> = [cfg(&[0, 3, 5]), cfg(&[1, 3, 6]), cfg(&[1, 4, 6])].into();
        assert_eq!(got, all);
        let one = branch_scratch(&node(&space, vec![]), &space, 1, &mut rng).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn covered_node_children_are_any_cliques() {
        let space = toy_space();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = node(&space, vec![cfg(&[0, 3, 5]), cfg(&[1, 4, 6])]);
        let kids = branch_scratch(&n, &space, 2, &mut rng).unwrap();
        assert_eq!(kids.len(), 2);
        for k in &kids {
            assert_eq!(k.depth(), 3);
            assert!(k.partial.configs[2].is_clique_in(&space.graph));
        }
    }

    #[test]
    fn refine_root_admits_every_clique() {
        let space = toy_space();
        let expanded = expand_cover(&space.cover, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kids = branch_refine(&node(&space, vec![]), &expanded, &space, 3, &mut rng).unwrap();
        assert_eq!(kids.len(), 3);
    }

    #[test]
    fn refine_last_slot_must_cover_missing_value() {
        let space = toy_space();
        let expanded = expand_cover(&space.cover, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = node(&space, vec![cfg(&[0, 3, 5]), cfg(&[1, 3, 6])]);
        let kids = branch_refine(&n, &expanded, &space, 10, &mut rng).unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].partial.configs[2], cfg(&[1, 4, 6]));
    }

    #[test]
    fn scratch_completion_is_greedy_first() {
        let space = toy_space();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = complete_scratch(&Schedule::default(), &space, &mut rng);
        assert_eq!(&s.configs[..2], &[cfg(&[0, 3, 5]), cfg(&[1, 4, 6])]);
        assert_eq!(s.len(), 3);
        let s = complete_scratch(&Schedule::new(vec![cfg(&[0, 3, 5])]), &space, &mut rng);
        assert_eq!(s.configs[1], cfg(&[1, 4, 6]));
        let full = Schedule::new(vec![cfg(&[0, 3, 5]); 3]);
        assert_eq!(complete_scratch(&full, &space, &mut rng), full);
    }

    #[test]
    fn refine_completion_takes_the_suffix() {
        let expanded = Schedule::new(vec![cfg(&[0, 3, 5]), cfg(&[1, 4, 6]), cfg(&[0, 3, 5])]);
        assert_eq!(complete_refine(&Schedule::default(), &expanded), expanded);
        let partial = Schedule::new(vec![cfg(&[1, 3, 6])]);
        assert_eq!(
            complete_refine(&partial, &expanded).configs,
            vec![cfg(&[1, 3, 6]), cfg(&[1, 4, 6]), cfg(&[0, 3, 5])]
        );
        assert_eq!(complete_refine(&expanded, &expanded), expanded);
    }

    #[test]
    fn feasibility() {
        let required: BTreeSet<VertexId> = [0, 1, 3, 4, 5, 6].into_iter().map(VertexId).collect();
        let opt = Schedule::new(vec![cfg(&[0, 3, 5]), cfg(&[0, 3, 5]), cfg(&[1, 4, 6])]);
        assert!(is_feasible(&opt, &required, 3));
        assert!(!is_feasible(
            &Schedule::new(vec![cfg(&[0, 3, 5]); 3]),
            &required,
            3
        ));
        assert!(!is_feasible(
            &Schedule::new(opt.configs[..2].to_vec()),
            &required,
            3
        ));
    }

    #[test]
    fn zero_budget_returns_expanded_cover() {
        let space = toy_space();
        let c = BnbConfig::new(Family::Scratch, false, Strategy::DepthFirst, 0);
        let out = solve(&space, c, Budget::iterations(0)).unwrap();
        assert_eq!(out.schedule, expand_cover(&space.cover, 3).unwrap());
        assert_eq!(out.expansions, 0);
    }

    #[test]
    fn truncation_keeps_best_bounds_in_order() {
        let space = toy_space();
        let mut state = BranchAndBound::new(
            &space,
            BnbConfig::new(Family::Scratch, false, Strategy::DepthFirst, 0),
        )
        .unwrap()
        .state();
        let mk = |b: f64, seq: u64| FrontierEntry {
            node: SearchNode {
                partial: Schedule::default(),
                bound: b,
            },
            seq,
        };
        state.frontier = vec![mk(0.5, 1), mk(0.1, 2), mk(0.9, 3), mk(0.2, 4)];
        state.truncate_frontier(2);
        assert_eq!(
            state.frontier.iter().map(|e| e.seq).collect::<Vec<_>>(),
            vec![2, 4]
        );
    }
}

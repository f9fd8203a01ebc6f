//! Target distributions and the mean-squared-error objectives.
//!
//! A [`TargetSpec`] is split into groups: one per dimension (dimension kind),
//! one per unordered dimension pair (relationship kind) or a single group over
//! whole configurations (combination kind). Each group carries a mixing weight
//! and a target distribution over its units that sums to one.
//!
//! The per-group error is
//!
//! ```text
//! sum over units u of (true_u - target_u)^2 / |listed units|
//! ```
//!
//! where the sum runs over the listed units plus any unlisted unit that occurs
//! in the schedule (target 0). The denominator only counts listed units so the
//! greedy completion used by [`lower_bound`] stays an exact relaxation.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CompatibilityGraph, NodeConfiguration, Schedule, VertexId};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Dimension,
    Relationship,
    Combination,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::Dimension => "dimension",
            ObjectiveKind::Relationship => "relationship",
            ObjectiveKind::Combination => "combination",
        })
    }
}

/// Granularity at which distributions are compared.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Value(VertexId),
    /// Stored with the lower-dimension vertex first.
    Pair(VertexId, VertexId),
    Config(NodeConfiguration),
}

impl Unit {
    fn vertices(&self) -> Vec<VertexId> {
        match self {
            Unit::Value(v) => vec![*v],
            Unit::Pair(a, b) => vec![*a, *b],
            Unit::Config(c) => c.values().to_vec(),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Value(v) => write!(f, "{v}"),
            Unit::Pair(a, b) => write!(f, "({a},{b})"),
            Unit::Config(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Dimension(usize),
    Pair(usize, usize),
    All,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Dimension(i) => write!(f, "dimension {i}"),
            GroupKey::Pair(i, j) => write!(f, "dimension pair ({i},{j})"),
            GroupKey::All => write!(f, "combinations"),
        }
    }
}

impl GroupKey {
    fn unit_of(&self, config: &NodeConfiguration) -> Unit {
        match *self {
            GroupKey::Dimension(i) => Unit::Value(config.get(i)),
            GroupKey::Pair(i, j) => Unit::Pair(config.get(i), config.get(j)),
            GroupKey::All => Unit::Config(config.clone()),
        }
    }
}

/// Mixing weights as supplied by the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Weights {
    /// 1/d per dimension, or 1/C(d,2) per dimension pair.
    Uniform,
    PerDimension(Vec<f64>),
    PerPair(BTreeMap<(usize, usize), f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetGroup {
    pub key: GroupKey,
    pub weight: f64,
    /// Normalized target distribution of the group.
    pub targets: BTreeMap<Unit, f64>,
    /// Target mass as supplied; renormalization always starts from it.
    raw: BTreeMap<Unit, f64>,
}

impl TargetGroup {
    /// Target mass as supplied, before normalization.
    pub fn raw(&self) -> &BTreeMap<Unit, f64> {
        &self.raw
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    kind: ObjectiveKind,
    groups: Vec<TargetGroup>,
}

impl TargetSpec {
    /// Groups raw target values (counts or probabilities) by dimension, pair
    /// or configuration and normalizes each group to sum to one.
    ///
    /// Units must match `kind`: values for dimension, cross-dimension vertex
    /// pairs for relationship and full configurations for combination.
    pub fn new(
        kind: ObjectiveKind,
        weights: Weights,
        targets: impl IntoIterator<Item = (Unit, f64)>,
        graph: &CompatibilityGraph,
    ) -> Result<Self> {
        let d = graph.dimension_count();
        let bad = |msg: String| Error::InvalidInstance(format!("objective: {msg}"));
        let mut groups: Vec<TargetGroup> = match kind {
            ObjectiveKind::Dimension => {
                let w = match &weights {
                    Weights::Uniform => vec![1.0 / d as f64; d],
                    Weights::PerDimension(w) if w.len() == d => w.clone(),
                    Weights::PerDimension(w) => {
                        return Err(bad(format!("{} weights for {d} dimensions", w.len())))
                    }
                    Weights::PerPair(_) => {
                        return Err(bad("pair weights given for a dimension objective".into()))
                    }
                };
                (0..d)
                    .map(|i| TargetGroup {
                        key: GroupKey::Dimension(i),
                        weight: w[i],
                        targets: BTreeMap::new(),
                        raw: BTreeMap::new(),
                    })
                    .collect()
            }
            ObjectiveKind::Relationship => {
                let pairs = d * d.saturating_sub(1) / 2;
                let mut out = Vec::with_capacity(pairs);
                for i in 0..d {
                    for j in i + 1..d {
                        let weight = match &weights {
                            Weights::Uniform => 1.0 / pairs as f64,
                            Weights::PerPair(m) => m.get(&(i, j)).copied().unwrap_or(0.0),
                            Weights::PerDimension(_) => {
                                return Err(bad(
                                    "dimension weights given for a relationship objective".into(),
                                ))
                            }
                        };
                        out.push(TargetGroup {
                            key: GroupKey::Pair(i, j),
                            weight,
                            targets: BTreeMap::new(),
                            raw: BTreeMap::new(),
                        });
                    }
                }
                if let Weights::PerPair(m) = &weights {
                    if let Some((i, j)) = m.keys().find(|(i, j)| !(i < j && *j < d)) {
                        return Err(bad(format!("weight for invalid dimension pair ({i},{j})")));
                    }
                }
                out
            }
            ObjectiveKind::Combination => vec![TargetGroup {
                key: GroupKey::All,
                weight: 1.0,
                targets: BTreeMap::new(),
                raw: BTreeMap::new(),
            }],
        };
        if let Some(w) = groups
            .iter()
            .map(|g| g.weight)
            .find(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(bad(format!("invalid mixing weight {w}")));
        }

        for (unit, value) in targets {
            if !value.is_finite() || value < 0.0 {
                return Err(bad(format!("invalid target value {value} for {unit}")));
            }
            let (key, unit) = locate_unit(kind, unit, graph).map_err(bad)?;
            let group = groups
                .iter_mut()
                .find(|g| g.key == key)
                .expect("every key has a group");
            *group.raw.entry(unit).or_insert(0.0) += value;
        }

        if kind == ObjectiveKind::Dimension {
            fill_dimension_units(&mut groups, graph);
        }
        normalize_groups(&mut groups)?;
        Ok(TargetSpec { kind, groups })
    }

    /// Dimension objective with the given per-dimension weights and targets.
    pub fn dimension(
        weights: Option<Vec<f64>>,
        targets: impl IntoIterator<Item = (VertexId, f64)>,
        graph: &CompatibilityGraph,
    ) -> Result<Self> {
        let weights = weights.map_or(Weights::Uniform, Weights::PerDimension);
        let targets = targets.into_iter().map(|(v, t)| (Unit::Value(v), t));
        Self::new(ObjectiveKind::Dimension, weights, targets, graph)
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn groups(&self) -> &[TargetGroup] {
        &self.groups
    }

    pub fn group(&self, key: GroupKey) -> Option<&TargetGroup> {
        self.groups.iter().find(|g| g.key == key)
    }

    /// Target value for a unit, or `None` when it is not listed.
    pub fn target_of(&self, unit: &Unit) -> Option<f64> {
        self.groups
            .iter()
            .find_map(|g| g.targets.get(unit).copied())
    }

    /// Problems with this target relative to `graph`, as plain messages.
    pub fn validate_against(&self, graph: &CompatibilityGraph) -> Vec<String> {
        let mut out = Vec::new();
        for g in &self.groups {
            for (unit, value) in &g.targets {
                if let Some(v) = unit.vertices().into_iter().find(|v| !graph.contains(*v)) {
                    out.push(format!("{unit} references unknown vertex {v}"));
                }
                if *value < 0.0 {
                    out.push(format!("{unit} has negative target {value}"));
                }
            }
        }
        out
    }
}

fn locate_unit(
    kind: ObjectiveKind,
    unit: Unit,
    graph: &CompatibilityGraph,
) -> std::result::Result<(GroupKey, Unit), String> {
    let dim = |v: VertexId| {
        graph
            .dimension_of(v)
            .ok_or_else(|| format!("target references unknown vertex {v}"))
    };
    match (kind, unit) {
        (ObjectiveKind::Dimension, Unit::Value(v)) => {
            Ok((GroupKey::Dimension(dim(v)?), Unit::Value(v)))
        }
        (ObjectiveKind::Relationship, Unit::Pair(a, b)) => {
            let (da, db) = (dim(a)?, dim(b)?);
            match da.cmp(&db) {
                Ordering::Less => Ok((GroupKey::Pair(da, db), Unit::Pair(a, b))),
                Ordering::Greater => Ok((GroupKey::Pair(db, da), Unit::Pair(b, a))),
                Ordering::Equal => Err(format!("pair ({a},{b}) lies inside dimension {da}")),
            }
        }
        (ObjectiveKind::Combination, Unit::Config(c)) => {
            for v in c.values() {
                dim(*v)?;
            }
            if c.one_per_dimension(graph) {
                Ok((GroupKey::All, Unit::Config(c)))
            } else {
                Err(format!("{c} is not one value per dimension"))
            }
        }
        (kind, unit) => Err(format!("unit {unit} does not fit a {kind} objective")),
    }
}

fn fill_dimension_units(groups: &mut [TargetGroup], graph: &CompatibilityGraph) {
    for g in groups {
        if let GroupKey::Dimension(i) = g.key {
            for &v in graph.layer(i) {
                g.raw.entry(Unit::Value(v)).or_insert(0.0);
            }
        }
    }
}

fn normalize_groups(groups: &mut [TargetGroup]) -> Result<()> {
    for g in groups {
        let total: f64 = g.raw.values().sum();
        if total > 0.0 {
            g.targets = g.raw.iter().map(|(u, r)| (u.clone(), r / total)).collect();
        } else if g.weight > 0.0 {
            return Err(Error::DegenerateTarget {
                group: g.key.to_string(),
            });
        } else {
            g.targets = g.raw.clone();
        }
    }
    Ok(())
}

/// Drops target entries that mention vertices no longer in `surviving` and
/// renormalizes each group.
pub fn adjust_targets(target: &TargetSpec, surviving: &CompatibilityGraph) -> Result<TargetSpec> {
    let mut groups = target.groups.clone();
    for g in &mut groups {
        g.raw
            .retain(|unit, _| unit.vertices().iter().all(|v| surviving.contains(*v)));
    }
    if target.kind == ObjectiveKind::Dimension {
        fill_dimension_units(&mut groups, surviving);
    }
    normalize_groups(&mut groups)?;
    Ok(TargetSpec {
        kind: target.kind,
        groups,
    })
}

/// Empirical distribution of a schedule, grouped like a [`TargetSpec`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    pub groups: BTreeMap<GroupKey, BTreeMap<Unit, f64>>,
}

impl Distribution {
    pub fn get(&self, key: GroupKey, unit: &Unit) -> f64 {
        self.groups
            .get(&key)
            .and_then(|g| g.get(unit))
            .copied()
            .unwrap_or(0.0)
    }
}

fn group_keys(kind: ObjectiveKind, d: usize) -> Vec<GroupKey> {
    match kind {
        ObjectiveKind::Dimension => (0..d).map(GroupKey::Dimension).collect(),
        ObjectiveKind::Relationship => (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| GroupKey::Pair(i, j)))
            .collect(),
        ObjectiveKind::Combination => vec![GroupKey::All],
    }
}

fn count_units(schedule: &[NodeConfiguration], key: GroupKey) -> BTreeMap<Unit, u32> {
    let mut counts = BTreeMap::new();
    for c in schedule {
        *counts.entry(key.unit_of(c)).or_insert(0) += 1;
    }
    counts
}

pub fn true_distribution(schedule: &Schedule, kind: ObjectiveKind) -> Result<Distribution> {
    let first = schedule.configs.first().ok_or(Error::EmptySchedule)?;
    let total = schedule.len() as f64;
    let groups = group_keys(kind, first.values().len())
        .into_iter()
        .map(|key| {
            let dist = count_units(&schedule.configs, key)
                .into_iter()
                .map(|(u, c)| (u, c as f64 / total))
                .collect();
            (key, dist)
        })
        .collect();
    Ok(Distribution { groups })
}

/// Error of one group given integer unit counts over `total` configurations.
fn group_error(group: &TargetGroup, counts: &BTreeMap<Unit, f64>, total: f64) -> f64 {
    if group.targets.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for (unit, target) in &group.targets {
        let t = counts.get(unit).copied().unwrap_or(0.0) / total;
        sum += (t - target) * (t - target);
    }
    for (unit, count) in counts {
        if !group.targets.contains_key(unit) {
            let t = count / total;
            sum += t * t;
        }
    }
    sum / group.targets.len() as f64
}

fn group_counts(group: &TargetGroup, configs: &[NodeConfiguration]) -> Result<BTreeMap<Unit, f64>> {
    let counts: BTreeMap<Unit, f64> = count_units(configs, group.key)
        .into_iter()
        .map(|(u, c)| (u, c as f64))
        .collect();
    if matches!(group.key, GroupKey::Dimension(_)) {
        if let Some(u) = counts.keys().find(|u| !group.targets.contains_key(u)) {
            return Err(Error::UnitMismatch(format!("{u} in {}", group.key)));
        }
    }
    Ok(counts)
}

/// Weighted sum of per-group mean squared errors between the schedule's
/// distribution and the target. Zero exactly when they match on every unit.
pub fn cost(schedule: &Schedule, target: &TargetSpec) -> Result<f64> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let total = schedule.len() as f64;
    let mut sum = 0.0;
    for group in &target.groups {
        if group.weight == 0.0 {
            continue;
        }
        let counts = group_counts(group, &schedule.configs)?;
        sum += group.weight * group_error(group, &counts, total);
    }
    Ok(sum)
}

#[derive(Copy, Clone, PartialEq)]
struct Deficit(f64);

impl Eq for Deficit {}

impl PartialOrd for Deficit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Deficit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Relative amount a partial-schedule bound is lowered by to absorb rounding.
pub const BOUND_SLACK: f64 = 1e-12;

/// Lowest cost any length-`n` schedule extending `partial` can reach.
///
/// Works on counts: each group receives `n - |partial|` virtual increments,
/// each going to the listed unit whose target count exceeds its current count
/// by the most (lowest unit first on ties). Groups are filled independently,
/// so the virtual configurations need not be compatible. The error is convex
/// and separable in the counts, so per group this greedy fill is the exact
/// minimum, which makes the bound admissible.
pub fn lower_bound(partial: &Schedule, n: usize, target: &TargetSpec) -> Result<f64> {
    let extra = n.saturating_sub(partial.len());
    let total = n.max(partial.len()) as f64;
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for group in &target.groups {
        if group.weight == 0.0 || group.targets.is_empty() {
            continue;
        }
        let mut counts = group_counts(group, &partial.configs)?;
        if extra > 0 {
            let listed: Vec<(&Unit, f64)> = group.targets.iter().map(|(u, t)| (u, *t)).collect();
            let mut heap: BinaryHeap<(Deficit, Reverse<usize>)> = listed
                .iter()
                .enumerate()
                .map(|(i, (u, t))| {
                    let have = counts.get(*u).copied().unwrap_or(0.0);
                    (Deficit(t * total - have), Reverse(i))
                })
                .collect();
            for _ in 0..extra {
                let (Deficit(def), Reverse(i)) = heap.pop().expect("listed units are non-empty");
                *counts.entry(listed[i].0.clone()).or_insert(0.0) += 1.0;
                heap.push((Deficit(def - 1.0), Reverse(i)));
            }
        }
        sum += group.weight * group_error(group, &counts, total);
    }
    if extra > 0 {
        // Tied deficits can be filled in a different order than the best
        // completion, which changes rounding; stay strictly below it.
        sum *= 1.0 - BOUND_SLACK;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_instance;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn counts_are_normalized_per_dimension() {
        let inst = toy_instance();
        let dim0 = inst.target.group(GroupKey::Dimension(0)).unwrap();
        let total: f64 = dim0.targets.values().sum();
        assert!(close(total, 1.0));
        assert!(close(dim0.targets[&Unit::Value(VertexId(0))], 0.6));
    }

    #[test]
    fn adjust_drops_removed_vertices() {
        let inst = toy_instance();
        let removed = [VertexId(2), VertexId(7)].into_iter().collect();
        let g = inst.graph.without_vertices(&removed);
        let adjusted = adjust_targets(&inst.target, &g).unwrap();
        let dim0 = &adjusted.group(GroupKey::Dimension(0)).unwrap().targets;
        assert_eq!(dim0.len(), 2);
        assert!(close(dim0[&Unit::Value(VertexId(0))], 2.0 / 3.0));
        assert!(close(dim0[&Unit::Value(VertexId(1))], 1.0 / 3.0));
        let dim2 = &adjusted.group(GroupKey::Dimension(2)).unwrap().targets;
        assert!(close(dim2[&Unit::Value(VertexId(5))], 2.0 / 3.0));
        assert!(close(dim2[&Unit::Value(VertexId(6))], 1.0 / 3.0));
    }

    #[test]
    fn adjust_without_removal_is_identity() {
        let inst = toy_instance();
        let adjusted = adjust_targets(&inst.target, &inst.graph).unwrap();
        for (a, b) in adjusted.groups().iter().zip(inst.target.groups()) {
            for (u, t) in &a.targets {
                assert!(close(*t, b.targets[u]));
            }
        }
    }

    #[test]
    fn adjust_reports_degenerate_dimension() {
        let g = CompatibilityGraph::from_layers(vec![vec![0, 1], vec![2]], [(0, 2), (1, 2)]);
        let t = TargetSpec::dimension(None, [(VertexId(0), 1.0), (VertexId(2), 1.0)], &g).unwrap();
        let removed = [VertexId(0)].into_iter().collect();
        let err = adjust_targets(&t, &g.without_vertices(&removed)).unwrap_err();
        assert!(matches!(err, Error::DegenerateTarget { .. }));
    }

    #[test]
    fn unknown_vertex_in_target_is_rejected() {
        let g = CompatibilityGraph::from_layers(vec![vec![0], vec![1]], [(0, 1)]);
        let err = TargetSpec::dimension(None, [(VertexId(9), 1.0)], &g).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }

    #[test]
    fn true_distribution_of_repeated_config() {
        let s = Schedule::from_raw(&[&[0, 3, 5], &[0, 3, 5], &[0, 3, 5]]);
        let dist = true_distribution(&s, ObjectiveKind::Dimension).unwrap();
        for (i, v) in [0, 3, 5].into_iter().enumerate() {
            assert_eq!(
                dist.get(GroupKey::Dimension(i), &Unit::Value(VertexId(v))),
                1.0
            );
        }
        assert!(matches!(
            true_distribution(&Schedule::default(), ObjectiveKind::Dimension),
            Err(Error::EmptySchedule)
        ));
    }

    #[test]
    fn combination_distribution_counts_whole_configs() {
        let s = Schedule::from_raw(&[&[0, 3, 5], &[0, 3, 5], &[1, 4, 6]]);
        let dist = true_distribution(&s, ObjectiveKind::Combination).unwrap();
        let u = |ids: &[u32]| Unit::Config(NodeConfiguration::from_raw(ids));
        assert!(close(dist.get(GroupKey::All, &u(&[0, 3, 5])), 2.0 / 3.0));
        assert!(close(dist.get(GroupKey::All, &u(&[1, 4, 6])), 1.0 / 3.0));
    }

    #[test]
    fn unlisted_relationship_pairs_cost_their_full_mass() {
        let g = CompatibilityGraph::from_layers(vec![vec![0, 1], vec![2]], [(0, 2), (1, 2)]);
        let t = TargetSpec::new(
            ObjectiveKind::Relationship,
            Weights::Uniform,
            [(Unit::Pair(VertexId(0), VertexId(2)), 3.0)],
            &g,
        )
        .unwrap();
        let s = Schedule::from_raw(&[&[1, 2]]);
        // listed (0,2): (0 - 1)^2, unlisted (1,2): 1^2, over one listed unit
        assert!(close(cost(&s, &t).unwrap(), 2.0));
        assert!(close(
            cost(&Schedule::from_raw(&[&[0, 2]]), &t).unwrap(),
            0.0
        ));
    }

    #[test]
    fn dimension_cost_rejects_unknown_unit() {
        let inst = toy_instance();
        let s = Schedule::from_raw(&[&[9, 3, 5]]);
        assert!(matches!(
            cost(&s, &inst.target),
            Err(Error::UnitMismatch(_))
        ));
    }

    #[test]
    fn lower_bound_of_full_schedule_is_its_cost() {
        let inst = toy_instance();
        let s = Schedule::from_raw(&[&[0, 3, 5], &[1, 4, 6], &[1, 4, 6]]);
        assert_eq!(
            lower_bound(&s, 3, &inst.target).unwrap(),
            cost(&s, &inst.target).unwrap()
        );
    }
}

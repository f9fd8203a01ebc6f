#![allow(dead_code)]

use std::collections::BTreeSet;

use envsched::objective::{TargetSpec, Unit, Weights};
use envsched::oracle::{brute_force, OracleSolution};
use envsched::{
    prepare, CompatibilityGraph, Error, Instance, NodeConfiguration, ObjectiveKind, Scope,
    SearchSpace, VertexId,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const KINDS: [ObjectiveKind; 3] = [
    ObjectiveKind::Dimension,
    ObjectiveKind::Relationship,
    ObjectiveKind::Combination,
];

/// Every one-per-dimension tuple of the graph, ignoring edges.
pub fn all_tuples(g: &CompatibilityGraph) -> Vec<Vec<VertexId>> {
    let mut out = vec![Vec::new()];
    for layer in g.layers() {
        out = out
            .into_iter()
            .flat_map(|t| {
                layer.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// A small random instance: 2 or 3 dimensions of at most 4 values, edge
/// density 0.5, 0.8 or 1.0, occasional include and exclude sets and random
/// integer targets of the given kind. May be infeasible.
pub fn random_instance(rng: &mut ChaCha8Rng, kind: ObjectiveKind, n: usize) -> Option<Instance> {
    let d = rng.gen_range(2..=3);
    let mut next = 0u32;
    let layers: Vec<Vec<u32>> = (0..d)
        .map(|_| {
            let size = rng.gen_range(1..=4);
            (0..size)
                .map(|_| {
                    next += 1;
                    next - 1
                })
                .collect()
        })
        .collect();
    let density = *[0.5, 0.8, 1.0].choose(rng).unwrap();
    let mut edges = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for &a in &layers[i] {
                for &b in &layers[j] {
                    if rng.gen_bool(density) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    let graph = CompatibilityGraph::from_layers(layers.clone(), edges);

    let mut scope = Scope::empty(d);
    if rng.gen_bool(0.3) {
        let i = rng.gen_range(0..d);
        let k = rng.gen_range(1..=layers[i].len().min(2));
        let pick: Vec<u32> = layers[i].choose_multiple(rng, k).copied().collect();
        scope.include[i] = pick.into_iter().map(VertexId).collect();
    }
    if rng.gen_bool(0.3) {
        let i = rng.gen_range(0..d);
        let v = VertexId(*layers[i].choose(rng).unwrap());
        if !scope.include[i].contains(&v) {
            scope.exclude[i].insert(v);
        }
    }

    let target = match kind {
        ObjectiveKind::Dimension => {
            let weights = if rng.gen_bool(0.5) {
                Some((0..d).map(|_| rng.gen_range(1..=5) as f64).collect())
            } else {
                None
            };
            let targets: Vec<(VertexId, f64)> = graph
                .vertices()
                .map(|v| (v, rng.gen_range(0..=4) as f64))
                .collect();
            TargetSpec::dimension(weights, targets, &graph)
        }
        ObjectiveKind::Relationship => {
            let mut targets = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    for &a in &layers[i] {
                        for &b in &layers[j] {
                            if rng.gen_bool(0.6) {
                                let t = rng.gen_range(1..=4) as f64;
                                targets.push((Unit::Pair(VertexId(a), VertexId(b)), t));
                            }
                        }
                    }
                }
            }
            TargetSpec::new(kind, Weights::Uniform, targets, &graph)
        }
        ObjectiveKind::Combination => {
            let mut targets = Vec::new();
            for t in all_tuples(&graph) {
                if rng.gen_bool(0.5) {
                    let w = rng.gen_range(1..=4) as f64;
                    targets.push((Unit::Config(NodeConfiguration::from_ids_unchecked(t)), w));
                }
            }
            TargetSpec::new(kind, Weights::Uniform, targets, &graph)
        }
    }
    .ok()?;
    Some(Instance {
        graph,
        scope,
        n,
        target,
        max_dimension_size: None,
        packing: None,
    })
}

/// A feasible random instance with its prepared space (built with `seed`)
/// and exact optimum.
pub struct Case {
    pub instance: Instance,
    pub space: SearchSpace,
    pub optimum: OracleSolution,
    pub seed: u64,
}

/// Draws random instances until one is feasible, has a clique cover of at
/// most 4 and is small enough for the oracle. `n` is drawn between the
/// cover size and 4.
pub fn feasible_case(rng: &mut ChaCha8Rng, kind: ObjectiveKind, seed: u64) -> Case {
    loop {
        let Some(mut inst) = random_instance(rng, kind, 4) else {
            continue;
        };
        let Ok(space) = prepare(&inst, &mut ChaCha8Rng::seed_from_u64(seed)) else {
            continue;
        };
        inst.n = rng.gen_range(space.cover.len()..=4);
        let space = prepare(&inst, &mut ChaCha8Rng::seed_from_u64(seed))
            .expect("same cover, larger or equal n");
        match brute_force(&inst) {
            Ok(optimum) => {
                return Case {
                    instance: inst,
                    space,
                    optimum,
                    seed,
                }
            }
            Err(Error::TooLarge(_)) => continue,
            Err(e) => panic!("oracle rejects an instance the pipeline accepts: {e}"),
        }
    }
}

/// Sorted id lists of a schedule, for multiset comparison.
pub fn multiset(s: &envsched::Schedule) -> Vec<Vec<u32>> {
    s.sorted()
        .iter()
        .map(|c| c.values().iter().map(|v| v.0).collect())
        .collect()
}

pub fn ids(v: &[u32]) -> BTreeSet<VertexId> {
    v.iter().copied().map(VertexId).collect()
}

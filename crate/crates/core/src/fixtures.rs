//! Small ready-made instances used by tests, examples and documentation.

use std::collections::BTreeSet;

use crate::model::{CompatibilityGraph, Instance, Scope, VertexId};
use crate::objective::TargetSpec;

/// Three-dimension toy instance with eight values and n = 3.
///
/// Layers are `{0,1,2}`, `{3,4}` and `{5,6,7}`; only `0` and `1` may be used
/// from the first dimension and `7` is excluded. Dimension weights are
/// 0.4/0.4/0.2. Its optimum, `[(0,3,5), (0,3,5), (1,4,6)]`, has cost 0.
pub fn toy_instance() -> Instance {
    let graph = toy_graph();
    let targets = [
        (0, 6.0),
        (1, 3.0),
        (2, 1.0),
        (3, 2.0),
        (4, 1.0),
        (5, 6.0),
        (6, 3.0),
        (7, 1.0),
    ]
    .into_iter()
    .map(|(v, t)| (VertexId(v), t));
    let target = TargetSpec::dimension(Some(vec![0.4, 0.4, 0.2]), targets, &graph)
        .expect("toy targets are well formed");
    let mut scope = Scope::empty(3);
    scope.include[0] = BTreeSet::from([VertexId(0), VertexId(1)]);
    scope.exclude[2] = BTreeSet::from([VertexId(7)]);
    Instance {
        graph,
        scope,
        n: 3,
        target,
        max_dimension_size: None,
        packing: None,
    }
}

pub fn toy_graph() -> CompatibilityGraph {
    CompatibilityGraph::from_layers(
        vec![vec![0, 1, 2], vec![3, 4], vec![5, 6, 7]],
        [
            (0, 3),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 6),
            (2, 4),
            (2, 7),
            (3, 5),
            (3, 6),
            (4, 6),
            (4, 7),
        ],
    )
}

/// Random three-dimension fleet with `n` nodes whose targets are value counts
/// from 1000 sampled configurations.
///
/// Dimensions hold 6 hardware types, 8 VM types and 10 OS images; each cross
/// pair is compatible with probability 0.6. Configurations are sampled with
/// Zipf-like popularity, so targets are skewed the way real fleets are.
pub fn synthetic_fleet(seed: u64, n: usize) -> Instance {
    use rand::distributions::{Distribution, WeightedIndex};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = [6u32, 8, 10];
    let mut next = 0;
    let layers: Vec<Vec<u32>> = sizes
        .iter()
        .map(|&k| {
            next += k;
            (next - k..next).collect()
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            for &a in &layers[i] {
                for &b in &layers[j] {
                    if rng.gen_bool(0.6) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    let graph = CompatibilityGraph::from_layers(layers.clone(), edges);

    let mut configs: Vec<[u32; 3]> = Vec::new();
    for &a in &layers[0] {
        for &b in &layers[1] {
            for &c in &layers[2] {
                let ok = |x: u32, y: u32| graph.adjacent(VertexId(x), VertexId(y));
                if ok(a, b) && ok(a, c) && ok(b, c) {
                    configs.push([a, b, c]);
                }
            }
        }
    }
    configs.shuffle(&mut rng);
    let popularity: Vec<f64> = (0..configs.len()).map(|r| 1.0 / (r + 1) as f64).collect();
    let mut counts = vec![0.0; next as usize];
    if let Ok(pick) = WeightedIndex::new(&popularity) {
        for _ in 0..1000 {
            for v in configs[pick.sample(&mut rng)] {
                counts[v as usize] += 1.0;
            }
        }
    }
    let targets = counts
        .iter()
        .enumerate()
        .map(|(v, &c)| (VertexId(v as u32), c));
    let target =
        TargetSpec::dimension(None, targets, &graph).expect("every layer has sampled mass");
    Instance {
        graph,
        scope: Scope::empty(3),
        n,
        target,
        max_dimension_size: None,
        packing: None,
    }
}

//! Scopes and prunes the toy fleet graph, then builds the clique cover that
//! seeds every optimizer.

use envsched::fixtures::toy_instance;
use envsched::graph::{clique_cover, prune_graph, scope_graph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> envsched::Result<()> {
    let inst = toy_instance();
    let scoped = scope_graph(&inst.graph, &inst.scope)?;
    let includes = inst.scope.include_union();
    let pruned = prune_graph(&scoped, &includes)?;
    println!(
        "{} values after scoping, {} after pruning",
        scoped.vertices().count(),
        pruned.vertices().count()
    );

    for seed in 0..3 {
        let cover = clique_cover(&pruned, &includes, &mut ChaCha8Rng::seed_from_u64(seed))?;
        let cliques: Vec<String> = cover.cliques.iter().map(|c| c.to_string()).collect();
        println!("seed {seed}: {} cliques {}", cover.len(), cliques.join(" "));
    }
    Ok(())
}

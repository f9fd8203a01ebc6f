//! Clique cover on a general graph, answered through the scheduling solver.
//! The pipeline starts from a greedy cover, so it can reject a budget that
//! the brute-force oracle still meets.

use envsched::bnb::solve;
use envsched::oracle::{brute_force, map_back, reduce, GeneralGraph};
use envsched::{prepare, Algorithm, Budget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> envsched::Result<()> {
    // a triangle with a pendant vertex
    let g = GeneralGraph::new(0..4, [(0, 1), (1, 2), (0, 2), (2, 3)]);
    for n in 1..=3 {
        let inst = reduce(&g, n)?;
        let oracle = match brute_force(&inst) {
            Ok(sol) => format!("{:?}", map_back(&sol.schedule, &g)?),
            Err(e) => e.to_string(),
        };
        let bnb = match prepare(&inst, &mut ChaCha8Rng::seed_from_u64(0)) {
            Ok(space) => {
                let mut cfg = Algorithm::new(2, 2)?.bnb_config(0).expect("bnb id");
                cfg.branch_factor = 10_000;
                let out = solve(&space, cfg, Budget::unlimited())?;
                format!("{:?} (cost {})", map_back(&out.schedule, &g)?, out.cost)
            }
            Err(e) => e.to_string(),
        };
        println!("n={n}\n  oracle: {oracle}\n  bnb:    {bnb}");
    }
    Ok(())
}

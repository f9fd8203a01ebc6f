//! Exhaustive branch and bound on the toy instance, then the twelve
//! bounded variants on a larger fleet.

use envsched::bnb::{solve, BnbConfig};
use envsched::fixtures::{synthetic_fleet, toy_instance};
use envsched::{prepare, run_pipeline, Algorithm, Budget, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> envsched::Result<()> {
    let toy = toy_instance();
    let space = prepare(&toy, &mut ChaCha8Rng::seed_from_u64(0))?;
    let mut cfg: BnbConfig = Algorithm::new(2, 2)?.bnb_config(0).expect("bnb id");
    cfg.branch_factor = 100;
    let out = solve(&space, cfg, Budget::unlimited())?;
    println!(
        "toy: cost {} after {} expansions, exhausted {}",
        out.cost, out.expansions, out.exhausted
    );
    for c in out.schedule.iter() {
        println!("  {c}");
    }

    let fleet = synthetic_fleet(3, 80);
    for a in Algorithm::all().into_iter().filter(|a| !a.is_annealing()) {
        let out = run_pipeline(&fleet, &RunConfig::new(a, 1, Budget::iterations(40)), None)?;
        println!("{a}: {:.5} -> {:.5}", out.initial_cost, out.cost);
    }
    Ok(())
}

//! Runs the six annealing variants on a synthetic fleet with the same
//! iteration budget.

use envsched::fixtures::synthetic_fleet;
use envsched::{run_pipeline, Algorithm, Budget, RunConfig};

fn main() -> envsched::Result<()> {
    let inst = synthetic_fleet(7, 60);
    for v in 1..=6 {
        let a = Algorithm::new(1, v)?;
        let out = run_pipeline(
            &inst,
            &RunConfig::new(a, 1, Budget::iterations(5_000)),
            None,
        )?;
        println!("{a}: {:.5} -> {:.5}", out.initial_cost, out.cost);
    }
    Ok(())
}

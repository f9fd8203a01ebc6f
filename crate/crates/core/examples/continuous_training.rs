//! Short runs chained through checkpoints, each resuming where the last one
//! stopped. The checkpoint is written to and read back from JSON text.

use envsched::fixtures::synthetic_fleet;
use envsched::{run_pipeline, Budget, Checkpoint, RunConfig};

fn main() -> anyhow::Result<()> {
    let inst = synthetic_fleet(5, 100);
    for id in ["1.2", "2.4"] {
        let cfg = RunConfig::new(
            id.parse()?,
            11,
            Budget::iterations(if id == "1.2" { 2_000 } else { 30 }),
        );
        let mut checkpoint: Option<Checkpoint> = None;
        for round in 1..=4 {
            let out = run_pipeline(&inst, &cfg, checkpoint.as_ref())?;
            println!("{id} round {round}: {:.6}", out.cost);
            let text = serde_json::to_string(&out.checkpoint)?;
            checkpoint = Some(serde_json::from_str(&text)?);
        }
    }
    Ok(())
}

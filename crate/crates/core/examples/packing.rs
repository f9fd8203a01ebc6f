//! Solves the toy instance and packs configurations onto hardware nodes
//! according to its VM capacity table.

use envsched::io::{parse_instance, CoverageDoc, ScheduleDoc};
use envsched::pipeline::pack_schedule;
use envsched::{run_pipeline, Budget, RunConfig};

fn main() -> envsched::Result<()> {
    let inst = parse_instance(include_str!("../data/toy.json"))?;
    let out = run_pipeline(
        &inst,
        &RunConfig::new("3.4".parse()?, 1, Budget::unlimited()),
        None,
    )?;
    let packed = pack_schedule(&out.schedule, inst.packing.as_ref());
    println!(
        "{} nodes carry {} configurations",
        packed.node_count,
        packed.configs.len()
    );
    for group in &packed.node_groups {
        let names: Vec<String> = group
            .iter()
            .map(|&i| packed.configs[i].to_string())
            .collect();
        println!("  node: {}", names.join(", "));
    }
    let coverage = CoverageDoc::new(&out.report, &out.required);
    let doc = ScheduleDoc::new(
        &out.schedule,
        &inst.graph,
        "3.4".into(),
        Some(1),
        out.cost,
        coverage,
    )
    .packed(&packed, &inst.graph);
    print!("{}", doc.to_json());
    Ok(())
}

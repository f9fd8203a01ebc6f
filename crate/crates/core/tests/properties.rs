mod common;

use std::collections::BTreeSet;

use common::{feasible_case, multiset, random_instance, KINDS};
use envsched::annealing::{expand_cover, Annealer};
use envsched::graph::{prune_graph, scope_graph};
use envsched::oracle::allowed_configurations;
use envsched::pipeline::{pack_schedule, PackingTable};
use envsched::{cost, lower_bound, Algorithm, Budget, Schedule, VertexId};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cost_ignores_order(seed in any::<u64>(), kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = feasible_case(&mut rng, KINDS[kind], seed);
        let configs = allowed_configurations(&case.instance).unwrap();
        let s: Schedule = (0..case.instance.n).map(|_| configs.choose(&mut rng).unwrap().clone()).collect();
        let mut shuffled = s.configs.clone();
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(
            cost(&s, &case.space.target).unwrap(),
            cost(&Schedule::new(shuffled), &case.space.target).unwrap()
        );
    }

    #[test]
    fn bound_is_below_every_sampled_completion(seed in any::<u64>(), kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = feasible_case(&mut rng, KINDS[kind], seed);
        let configs = allowed_configurations(&case.instance).unwrap();
        let n = case.instance.n;
        let k = rng.gen_range(0..=n);
        let partial: Schedule = (0..k).map(|_| configs.choose(&mut rng).unwrap().clone()).collect();
        let lb = lower_bound(&partial, n, &case.space.target).unwrap();
        for _ in 0..32 {
            let mut full = partial.configs.clone();
            full.extend((k..n).map(|_| configs.choose(&mut rng).unwrap().clone()));
            prop_assert!(lb <= cost(&Schedule::new(full), &case.space.target).unwrap());
        }
        if k == n {
            prop_assert_eq!(lb, cost(&partial, &case.space.target).unwrap());
        }
    }

    #[test]
    fn bound_grows_along_a_path(seed in any::<u64>()) {
        // not required for admissibility, but a falling bound would mean the
        // greedy fill is not optimal per group
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = feasible_case(&mut rng, KINDS[(seed % 3) as usize], seed);
        let configs = allowed_configurations(&case.instance).unwrap();
        let n = case.instance.n;
        let mut partial = Vec::new();
        let mut last = lower_bound(&Schedule::default(), n, &case.space.target).unwrap();
        for _ in 0..n {
            partial.push(configs.choose(&mut rng).unwrap().clone());
            let lb = lower_bound(&Schedule::new(partial.clone()), n, &case.space.target).unwrap();
            prop_assert!(lb >= last * (1.0 - 1e-9));
            last = lb;
        }
    }

    #[test]
    fn scoping_and_pruning_are_idempotent(seed in any::<u64>(), kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(inst) = random_instance(&mut rng, KINDS[kind], 3) else { return Ok(()); };
        let Ok(once) = scope_graph(&inst.graph, &inst.scope) else { return Ok(()); };
        prop_assert_eq!(&scope_graph(&once, &inst.scope).unwrap(), &once);
        let inc = inst.scope.include_union();
        if let Ok(pruned) = prune_graph(&once, &inc) {
            prop_assert_eq!(prune_graph(&pruned, &inc).unwrap(), pruned);
        }
    }

    #[test]
    fn annealing_keeps_schedules_valid(seed in any::<u64>(), variant in 1u8..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = feasible_case(&mut rng, KINDS[(seed % 3) as usize], seed);
        let sa = Algorithm::new(1, variant).unwrap().annealing_config(seed).unwrap();
        let preserve = sa.preserve_cover;
        let mut annealer = Annealer::new(&case.space, sa).unwrap();
        let mut best = annealer.state().best_cost;
        for _ in 0..300 {
            annealer.step().unwrap();
            let st = annealer.state();
            prop_assert_eq!(st.current.len(), case.instance.n);
            prop_assert!(st.current.iter().all(|c| c.is_clique_in(&case.space.graph)));
            if preserve {
                prop_assert!(case.space.covers_required(&st.current.configs));
            }
            prop_assert!(case.space.covers_required(&st.best.configs));
            prop_assert!(st.best_cost <= best);
            best = st.best_cost;
        }
    }

    #[test]
    fn expanded_cover_covers(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = feasible_case(&mut rng, KINDS[(seed % 3) as usize], seed);
        let s0 = expand_cover(&case.space.cover, case.instance.n).unwrap();
        prop_assert_eq!(s0.len(), case.instance.n);
        prop_assert!(case.space.covers_required(&s0.configs));
        prop_assert_eq!(&s0.configs[..case.space.cover.len()], &case.space.cover.cliques[..]);
    }

    #[test]
    fn packing_keeps_distinct_configurations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = feasible_case(&mut rng, KINDS[0], seed);
        let s0 = expand_cover(&case.space.cover, case.instance.n).unwrap();
        let mut table = PackingTable { vm_dimension: 1, ..Default::default() };
        for c in s0.iter() {
            table.capacity.insert((c.get(0), c.get(1)), rng.gen_range(1..=4));
        }
        let packed = pack_schedule(&s0, Some(&table));
        prop_assert_eq!(packed.node_count, s0.len());
        prop_assert_eq!(packed.node_groups.len(), s0.len());
        let before: BTreeSet<_> = s0.iter().cloned().collect();
        let after: BTreeSet<_> = packed.configs.iter().cloned().collect();
        prop_assert_eq!(before, after);
        for (group, c) in packed.node_groups.iter().zip(s0.iter()) {
            prop_assert_eq!(group.len() as u32, table.capacity_of(c));
        }
    }
}

#[test]
fn resumed_annealing_matches_an_uninterrupted_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let case = feasible_case(&mut rng, KINDS[0], 3);
    let cfg = Algorithm::new(1, 1).unwrap().annealing_config(9).unwrap();
    let mut whole = Annealer::new(&case.space, cfg.clone()).unwrap();
    whole.run(Budget::iterations(500)).unwrap();
    let mut first = Annealer::new(&case.space, cfg.clone()).unwrap();
    first.run(Budget::iterations(200)).unwrap();
    let json = serde_json::to_string(first.state()).unwrap();
    let mut second = Annealer::resume(&case.space, cfg, serde_json::from_str(&json).unwrap());
    second.run(Budget::iterations(300)).unwrap();
    assert_eq!(second.state(), whole.state());
}

#[test]
fn chained_branch_and_bound_runs_never_regress() {
    let inst = envsched::fixtures::synthetic_fleet(1, 40);
    for id in ["2.4", "3.6"] {
        let cfg = envsched::RunConfig::new(id.parse().unwrap(), 2, Budget::iterations(15));
        let mut ck = None;
        let mut last = f64::INFINITY;
        for _ in 0..3 {
            let out = envsched::run_pipeline(&inst, &cfg, ck.as_ref()).unwrap();
            assert!(out.cost <= last);
            assert!(out.cost <= out.initial_cost);
            last = out.cost;
            ck = Some(out.checkpoint);
        }
    }
}

#[test]
fn oracle_optimum_is_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..20 {
        let case = feasible_case(&mut rng, KINDS[i % 3], i as u64);
        let report = envsched::check_schedule(
            &case.optimum.schedule,
            &case.instance,
            &case.optimum.required,
        );
        assert!(
            report.all_satisfied(),
            "{:?}",
            multiset(&case.optimum.schedule)
        );
        let req: BTreeSet<VertexId> = case.space.required.clone();
        assert_eq!(req, case.optimum.required);
    }
}

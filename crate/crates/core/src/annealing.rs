//! Simulated annealing over complete schedules.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_clique, CliqueCover};
use crate::model::{NodeConfiguration, Schedule, VertexId};
use crate::space::{Budget, SearchSpace};

/// How a replacement configuration is seeded when coverage does not force
/// the choice.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborMode {
    /// From one vertex drawn uniformly from the whole graph.
    RandomVertex,
    /// From the replaced configuration minus one random value.
    AllButOne,
    /// From one random value of the replaced configuration.
    SingleVertex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub neighbor_mode: NeighborMode,
    /// Rebuild replacements around values that would otherwise lose coverage.
    pub preserve_cover: bool,
    pub retries_limit: u32,
    pub reset_probability: f64,
    /// Only replace configurations past the clique cover prefix.
    pub replace_expansion_only: bool,
    pub seed: u64,
}

impl SaConfig {
    pub fn new(neighbor_mode: NeighborMode, preserve_cover: bool, seed: u64) -> Self {
        SaConfig {
            neighbor_mode,
            preserve_cover,
            retries_limit: 8,
            reset_probability: 1e-7,
            replace_expansion_only: false,
            seed,
        }
    }
}

fn check_budget(cover: &CliqueCover, n: usize) -> Result<()> {
    if cover.len() > n {
        Err(Error::CoverExceedsBudget {
            cover: cover.len(),
            budget: n,
        })
    } else {
        Ok(())
    }
}

/// The cover followed by its own configurations repeated in order until the
/// schedule holds `n` entries.
pub fn expand_cover(cover: &CliqueCover, n: usize) -> Result<Schedule> {
    check_budget(cover, n)?;
    if cover.is_empty() {
        return Err(Error::Infeasible);
    }
    Ok(cover.cliques.iter().cycle().take(n).cloned().collect())
}

/// The cover followed by `n - |cover|` configurations drawn uniformly, with
/// replacement, from the cover.
pub fn reset_candidate<R: Rng>(cover: &CliqueCover, n: usize, rng: &mut R) -> Result<Schedule> {
    check_budget(cover, n)?;
    if cover.is_empty() {
        return Err(Error::Infeasible);
    }
    let mut configs = cover.cliques.clone();
    while configs.len() < n {
        configs.push(cover.cliques.choose(rng).expect("non-empty").clone());
    }
    Ok(Schedule::new(configs))
}

/// Replaces one configuration of `schedule` with a different one.
///
/// Up to `retries_limit` positions are tried. When the configuration at the
/// chosen position is the only one covering some required values and
/// `preserve_cover` is set, the replacement is grown from exactly those
/// values; otherwise it is grown according to the neighbor mode. If no
/// distinct replacement turns up, a fresh [`reset_candidate`] is returned.
pub fn next_candidate<R: Rng>(
    schedule: &Schedule,
    space: &SearchSpace,
    cfg: &SaConfig,
    rng: &mut R,
) -> Result<Schedule> {
    let n = schedule.len();
    let q = space.cover.len();
    let counts = space.coverage_counts(&schedule.configs);
    if n > 0 {
        for _ in 0..cfg.retries_limit.max(1) {
            let pos = if cfg.replace_expansion_only && n > q {
                rng.gen_range(q..n)
            } else {
                rng.gen_range(0..n)
            };
            let current = &schedule.configs[pos];
            let lost: Vec<VertexId> = current
                .values()
                .iter()
                .copied()
                .filter(|v| counts.get(v) == Some(&1))
                .collect();
            let uncovered: BTreeSet<VertexId> = counts
                .iter()
                .filter(|(v, k)| **k == 0 || (**k == 1 && current.contains(**v)))
                .map(|(v, _)| *v)
                .collect();
            let seed = if cfg.preserve_cover && !lost.is_empty() {
                lost
            } else {
                neighbor_seed(current, space, cfg.neighbor_mode, rng)
            };
            if let Some(t) = build_clique(&space.graph, &seed, &uncovered, rng) {
                if &t != current {
                    let mut next = schedule.clone();
                    next.configs[pos] = t;
                    return Ok(next);
                }
            }
        }
    }
    reset_candidate(&space.cover, space.n, rng)
}

fn neighbor_seed<R: Rng>(
    current: &NodeConfiguration,
    space: &SearchSpace,
    mode: NeighborMode,
    rng: &mut R,
) -> Vec<VertexId> {
    match mode {
        NeighborMode::RandomVertex => space.vertices().choose(rng).copied().into_iter().collect(),
        NeighborMode::AllButOne => {
            let skip = rng.gen_range(0..current.values().len());
            current
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, v)| *v)
                .collect()
        }
        NeighborMode::SingleVertex => vec![*current.values().choose(rng).expect("non-empty")],
    }
}

/// Temperature after `x` iterations since the last restart:
/// `4000 / (1 + e^(x / 3000))`.
pub fn temperature(x: u64) -> f64 {
    4000.0 / (1.0 + (x as f64 / 3000.0).exp())
}

/// Resumable annealing state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealState {
    pub current: Schedule,
    pub current_cost: f64,
    /// Best schedule seen that satisfies coverage.
    pub best: Schedule,
    pub best_cost: f64,
    pub since_restart: u64,
    pub iterations: u64,
    #[serde(with = "crate::space::rng_serde")]
    rng: ChaCha8Rng,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealOutcome {
    pub schedule: Schedule,
    pub cost: f64,
    pub iterations: u64,
}

/// Simulated annealer with Metropolis acceptance.
#[derive(Clone, Debug)]
pub struct Annealer<'a> {
    space: &'a SearchSpace,
    cfg: SaConfig,
    state: AnnealState,
}

impl<'a> Annealer<'a> {
    /// Starts from the expanded cover.
    pub fn new(space: &'a SearchSpace, cfg: SaConfig) -> Result<Self> {
        let start = expand_cover(&space.cover, space.n)?;
        let cost = space.cost(&start)?;
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(Annealer {
            space,
            cfg,
            state: AnnealState {
                current: start.clone(),
                current_cost: cost,
                best: start,
                best_cost: cost,
                since_restart: 0,
                iterations: 0,
                rng,
            },
        })
    }

    pub fn resume(space: &'a SearchSpace, cfg: SaConfig, state: AnnealState) -> Self {
        Annealer { space, cfg, state }
    }

    pub fn state(&self) -> &AnnealState {
        &self.state
    }

    pub fn into_state(self) -> AnnealState {
        self.state
    }

    fn consider_best(&mut self) {
        let s = &mut self.state;
        if s.current_cost < s.best_cost && self.space.covers_required(&s.current.configs) {
            s.best = s.current.clone();
            s.best_cost = s.current_cost;
        }
    }

    pub fn step(&mut self) -> Result<()> {
        let space = self.space;
        let s = &mut self.state;
        if s.rng.gen::<f64>() < self.cfg.reset_probability {
            s.current = reset_candidate(&space.cover, space.n, &mut s.rng)?;
            s.current_cost = space.cost(&s.current)?;
            s.since_restart = 0;
            self.consider_best();
        }
        let s = &mut self.state;
        let candidate = next_candidate(&s.current, space, &self.cfg, &mut s.rng)?;
        let cost = space.cost(&candidate)?;
        let delta = cost - s.current_cost;
        let t = temperature(s.since_restart);
        if delta <= 0.0 || s.rng.gen::<f64>() < (-delta / t).exp() {
            s.current = candidate;
            s.current_cost = cost;
        }
        s.since_restart += 1;
        s.iterations += 1;
        self.consider_best();
        Ok(())
    }

    pub fn run(&mut self, budget: Budget) -> Result<AnnealOutcome> {
        let mut clock = budget.clock();
        if budget.iterations.is_none() && budget.time.is_none() {
            return Err(Error::InvalidInstance(
                "annealing needs an iteration or time budget".into(),
            ));
        }
        while !clock.exhausted() {
            self.step()?;
            clock.tick();
        }
        Ok(self.outcome())
    }

    pub fn outcome(&self) -> AnnealOutcome {
        AnnealOutcome {
            schedule: self.state.best.clone(),
            cost: self.state.best_cost,
            iterations: self.state.iterations,
        }
    }
}

/// Runs annealing from the expanded cover and returns the best schedule.
pub fn anneal(space: &SearchSpace, cfg: SaConfig, budget: Budget) -> Result<AnnealOutcome> {
    Annealer::new(space, cfg)?.run(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_instance;
    use crate::pipeline::prepare;

    fn toy_space() -> SearchSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        prepare(&toy_instance(), &mut rng).unwrap()
    }

    fn cfg(s: &[u32]) -> NodeConfiguration {
        NodeConfiguration::from_raw(s)
    }

    #[test]
    fn expansion_cycles_the_cover() {
        let space = toy_space();
        let s = expand_cover(&space.cover, 3).unwrap();
        assert_eq!(
            s.configs,
            vec![cfg(&[0, 3, 5]), cfg(&[1, 4, 6]), cfg(&[0, 3, 5])]
        );
        assert_eq!(
            expand_cover(&space.cover, 2).unwrap().configs,
            space.cover.cliques
        );
        assert_eq!(
            expand_cover(&space.cover, 1),
            Err(Error::CoverExceedsBudget {
                cover: 2,
                budget: 1
            })
        );
    }

    #[test]
    fn reset_candidate_keeps_cover_prefix() {
        let space = toy_space();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = reset_candidate(&space.cover, 3, &mut rng).unwrap();
            assert_eq!(s.len(), 3);
            assert_eq!(&s.configs[..2], &space.cover.cliques[..]);
            assert!(space.covers_required(&s.configs));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            reset_candidate(&space.cover, 2, &mut rng).unwrap().configs,
            space.cover.cliques
        );
        let a = reset_candidate(&space.cover, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = reset_candidate(&space.cover, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn temperature_values() {
        assert_eq!(temperature(0), 2000.0);
        assert!((temperature(3000) - 4000.0 / (1.0 + std::f64::consts::E)).abs() < 1e-9);
        assert!((temperature(3000) - 1075.77).abs() < 0.01);
    }

    #[test]
    fn forced_preserving_move_falls_back_to_reset() {
        // Every retry that lands on (1,4,6) must regrow from {1,4,6}, and the
        // only configuration containing 4 is (1,4,6) itself.
        let space = toy_space();
        let s = Schedule::new(vec![cfg(&[0, 3, 5]), cfg(&[1, 4, 6]), cfg(&[0, 3, 5])]);
        let mut c = SaConfig::new(NeighborMode::SingleVertex, true, 0);
        c.replace_expansion_only = false;
        for seed in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let next = next_candidate(&s, &space, &c, &mut rng).unwrap();
            assert_eq!(next.len(), 3);
            assert!(space.covers_required(&next.configs));
            assert!(next.iter().all(|x| x.is_clique_in(&space.graph)));
        }
    }

    #[test]
    fn random_vertex_move_on_last_position() {
        let space = toy_space();
        let s = Schedule::new(vec![cfg(&[0, 3, 5]), cfg(&[1, 4, 6]), cfg(&[0, 3, 5])]);
        let mut c = SaConfig::new(NeighborMode::RandomVertex, false, 0);
        c.replace_expansion_only = true;
        let mut seen = BTreeSet::new();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let next = next_candidate(&s, &space, &c, &mut rng).unwrap();
            assert_eq!(&next.configs[..2], &s.configs[..2]);
            seen.insert(next.configs[2].clone());
        }
        assert!(!seen.contains(&cfg(&[0, 3, 5])));
        assert!(seen.contains(&cfg(&[1, 3, 6])) && seen.contains(&cfg(&[1, 4, 6])));
    }

    #[test]
    fn anneal_finds_toy_optimum() {
        let space = toy_space();
        for mode in [
            NeighborMode::RandomVertex,
            NeighborMode::AllButOne,
            NeighborMode::SingleVertex,
        ] {
            for preserve in [false, true] {
                let out = anneal(
                    &space,
                    SaConfig::new(mode, preserve, 3),
                    Budget::iterations(10_000),
                )
                .unwrap();
                assert!(out.cost.abs() < 1e-12);
                assert!(space.covers_required(&out.schedule.configs));
            }
        }
    }

    #[test]
    fn resumed_run_matches_uninterrupted_run() {
        let space = toy_space();
        let c = SaConfig::new(NeighborMode::AllButOne, false, 11);
        let mut whole = Annealer::new(&space, c.clone()).unwrap();
        whole.run(Budget::iterations(500)).unwrap();
        let mut first = Annealer::new(&space, c.clone()).unwrap();
        first.run(Budget::iterations(200)).unwrap();
        let json = serde_json::to_string(first.state()).unwrap();
        let state: AnnealState = serde_json::from_str(&json).unwrap();
        let mut second = Annealer::resume(&space, c, state);
        second.run(Budget::iterations(300)).unwrap();
        assert_eq!(whole.state(), second.state());
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operators::{crossover, lhs_init, local_search, mutate, Roulette};
use super::SearchOutcome;
use crate::error::{Error, Result};
use crate::horizon::{CandidateSequence, HorizonProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvoParams {
    pub population: usize,
    pub generations: usize,
    pub p_mut: f64,
    pub crossover_points: usize,
    pub elite: usize,
    pub local_search_budget: usize,
    pub epsilon_fitness: f64,
    pub seed: u64,
}

impl Default for EvoParams {
    fn default() -> Self {
        Self {
            population: 60,
            generations: 80,
            p_mut: 0.05,
            crossover_points: 2,
            elite: 4,
            local_search_budget: 50,
            epsilon_fitness: 1e-9,
            seed: 0,
        }
    }
}

impl EvoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("evo: {msg}")));
        if !(2 <= self.elite && self.elite < self.population) {
            return bad("need 2 <= elite < population");
        }
        if !(0.0..=1.0).contains(&self.p_mut) {
            return bad("p_mut must lie in [0, 1]");
        }
        if self.crossover_points < 1 {
            return bad("crossover_points must be at least 1");
        }
        if self.generations < 1 {
            return bad("generations must be at least 1");
        }
        if !(self.epsilon_fitness > 0.0 && self.epsilon_fitness.is_finite()) {
            return bad("epsilon_fitness must be positive");
        }
        Ok(())
    }
}

fn rank_by_cost(costs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    order
}

/// Evolutionary-game search for the minimum-cost plan of `hp`.
///
/// Latin hypercube start, then per generation: fitness-proportionate parent
/// selection, multi-point crossover, mutation, elitist replacement and a
/// local search on the incumbent. The returned trace holds the best-ever cost
/// after initialisation and after every generation.
pub fn eg_solve(hp: &HorizonProblem, ep: &EvoParams) -> Result<SearchOutcome> {
    ep.validate()?;
    let n = hp.horizon();
    let na = hp.lattice.len();
    let m = ep.population;
    let mut rng = ChaCha8Rng::seed_from_u64(ep.seed);

    let mut population = lhs_init(&hp.lattice, n, m, &mut rng);
    let mut costs: Vec<f64> = population
        .iter()
        .map(|u| hp.cost_unchecked(&u.genes))
        .collect();

    let first = rank_by_cost(&costs)[0];
    let mut best = population[first].clone();
    let mut best_cost = costs[first];
    let mut trace = Vec::with_capacity(ep.generations + 1);
    trace.push(best_cost);

    let k = ep.crossover_points.min(n.saturating_sub(1));
    for _ in 0..ep.generations {
        let order = rank_by_cost(&costs);
        let mut next: Vec<CandidateSequence> = order[..ep.elite]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        let mut next_costs: Vec<f64> = order[..ep.elite].iter().map(|&i| costs[i]).collect();

        let wheel = Roulette::new(&costs, ep.epsilon_fitness);
        while next.len() < m {
            let pa = &population[wheel.draw(&mut rng)];
            let pb = &population[wheel.draw(&mut rng)];
            let (c1, c2) = if k >= 1 {
                crossover(pa, pb, k, &mut rng)?
            } else {
                (pa.clone(), pb.clone())
            };
            for child in [c1, c2] {
                if next.len() == m {
                    break;
                }
                let child = mutate(&child, na, ep.p_mut, &mut rng);
                next_costs.push(hp.cost_unchecked(&child.genes));
                next.push(child);
            }
        }

        // the incumbent sits at index 0 after elitist carry-over
        let (refined, refined_cost, _) =
            local_search(&next[0], next_costs[0], hp, ep.local_search_budget);
        next[0] = refined;
        next_costs[0] = refined_cost;

        population = next;
        costs = next_costs;

        let gen_best = rank_by_cost(&costs)[0];
        if costs[gen_best] < best_cost {
            best_cost = costs[gen_best];
            best = population[gen_best].clone();
        }
        trace.push(best_cost);
    }

    Ok(SearchOutcome {
        sequence: best,
        cost: best_cost,
        trace,
    })
}

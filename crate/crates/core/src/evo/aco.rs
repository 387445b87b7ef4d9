//! Ant System over the layered stage/action construction graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SearchOutcome;
use crate::error::{Error, Result};
use crate::horizon::{CandidateSequence, HorizonProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcoParams {
    pub ants: usize,
    pub iterations: usize,
    /// Evaporation rate ρ.
    pub evaporation: f64,
    pub pheromone_init: f64,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent.
    pub beta: f64,
    pub seed: u64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            ants: 30,
            iterations: 60,
            evaporation: 0.1,
            pheromone_init: 1.0,
            alpha: 1.0,
            beta: 2.0,
            seed: 0,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("aco: {msg}")));
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            return bad("evaporation must lie in (0, 1)");
        }
        if self.ants < 1 || self.iterations < 1 {
            return bad("ants and iterations must be at least 1");
        }
        if !(self.pheromone_init > 0.0 && self.pheromone_init.is_finite()) {
            return bad("pheromone_init must be positive");
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return bad("alpha and beta must be finite");
        }
        Ok(())
    }
}

/// Ant System search.
///
/// An ant at stage `t` with predicted SOC `s` picks action `a` with probability
/// proportional to `τ(t,a)^α · η(t,a)^β`, where `η = 1 / (1 + step cost of a at s)`.
/// After each iteration pheromone evaporates by `ρ` and every ant deposits
/// `1 / (1 + J)` on the edges it used.
pub fn aco_solve(hp: &HorizonProblem, ap: &AcoParams) -> Result<SearchOutcome> {
    ap.validate()?;
    let n = hp.horizon();
    let na = hp.lattice.len();
    let mut rng = ChaCha8Rng::seed_from_u64(ap.seed);
    let mut tau = vec![vec![ap.pheromone_init; na]; n];

    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut trace = Vec::with_capacity(ap.iterations);
    let mut weights = vec![0.0; na];
    let mut tours: Vec<(Vec<usize>, f64)> = Vec::with_capacity(ap.ants);

    for _ in 0..ap.iterations {
        tours.clear();
        for _ in 0..ap.ants {
            let mut soc = hp.soc0;
            let mut genes = Vec::with_capacity(n);
            for (t, tau_t) in tau.iter().enumerate() {
                let mut total = 0.0;
                let mut steps = Vec::with_capacity(na);
                for (g, w) in weights.iter_mut().enumerate() {
                    let (c, next) = hp.step(t, soc, g);
                    let eta = 1.0 / (1.0 + c);
                    *w = tau_t[g].powf(ap.alpha) * eta.powf(ap.beta);
                    total += *w;
                    steps.push(next);
                }
                let g = if total > 0.0 && total.is_finite() {
                    let mut r = rng.gen::<f64>() * total;
                    let mut pick = na - 1;
                    for (g, w) in weights.iter().enumerate() {
                        if r < *w {
                            pick = g;
                            break;
                        }
                        r -= w;
                    }
                    pick
                } else {
                    rng.gen_range(0..na)
                };
                genes.push(g);
                soc = steps[g];
            }
            let j = hp.cost_unchecked(&genes);
            tours.push((genes, j));
        }

        for (genes, j) in &tours {
            if best.as_ref().is_none_or(|(_, b)| *j < *b) {
                best = Some((genes.clone(), *j));
            }
        }

        for row in tau.iter_mut() {
            for v in row.iter_mut() {
                *v *= 1.0 - ap.evaporation;
            }
        }
        for (genes, j) in &tours {
            let deposit = 1.0 / (1.0 + j);
            for (t, &g) in genes.iter().enumerate() {
                tau[t][g] += deposit;
            }
        }

        trace.push(best.as_ref().map_or(f64::INFINITY, |(_, c)| *c));
    }

    let (genes, cost) = best.expect("at least one ant ran");
    Ok(SearchOutcome {
        sequence: CandidateSequence::new(genes),
        cost,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costing::{Plant, Window};
    use crate::horizon::ActionLattice;
    use crate::types::{BatteryParams, ControlAction, CostParams};

    fn plant() -> Plant {
        Plant::new(BatteryParams::default(), CostParams::default())
    }

    #[test]
    fn singleton_lattice_returns_only_sequence() {
        let lattice = ActionLattice::from_actions(vec![ControlAction::idle()]).unwrap();
        let w = Window::new(vec![300.0, 100.0], vec![200.0, 50.0]).unwrap();
        let hp = HorizonProblem::new(w, 500.0, plant(), lattice).unwrap();
        let out = aco_solve(&hp, &AcoParams::default()).unwrap();
        assert_eq!(out.sequence.genes, vec![0, 0]);
        assert!((out.cost - (30.0 + 15.0)).abs() < 1e-9);
    }

    #[test]
    fn trace_is_running_minimum() {
        let lattice = ActionLattice::build(200.0, 100.0, 50.0).unwrap();
        let w = Window::new(vec![300.0, 100.0, 260.0], vec![200.0, 150.0, 120.0]).unwrap();
        let hp = HorizonProblem::new(w, 500.0, plant(), lattice).unwrap();
        let out = aco_solve(
            &hp,
            &AcoParams {
                seed: 3,
                ..AcoParams::default()
            },
        )
        .unwrap();
        assert_eq!(out.trace.len(), AcoParams::default().iterations);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*out.trace.last().unwrap(), out.cost);
    }

    #[test]
    fn invalid_evaporation() {
        let p = AcoParams {
            evaporation: 1.0,
            ..AcoParams::default()
        };
        assert!(p.validate().is_err());
    }
}

//! Metaheuristic searchers over candidate sequences: the evolutionary-game
//! optimizer and an Ant System comparison arm.

mod aco;
mod eg;
pub mod operators;

pub use aco::{aco_solve, AcoParams};
pub use eg::{eg_solve, EvoParams};
pub use operators::{crossover, crossover_at, lhs_init, local_search, mutate, select, Roulette};

use crate::horizon::CandidateSequence;

/// Best plan found by a searcher and its running-best cost per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub sequence: CandidateSequence,
    pub cost: f64,
    /// Best-ever cost: after initialisation and each generation (evolutionary
    /// search), or after each iteration (ant colony).
    pub trace: Vec<f64>,
}

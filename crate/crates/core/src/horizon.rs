//! Finite-horizon dispatch problems over a discrete action lattice, with an
//! exact solver (enumeration or SOC-grid dynamic programming) and a myopic
//! one-step solver.

use crate::costing::{Plant, Window};
use crate::error::{Error, Result};
use crate::types::ControlAction;

/// Discrete set-points: idle, then charge levels ascending, then discharge levels ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionLattice {
    delta_p: f64,
    levels_ch: usize,
    levels_dis: usize,
    actions: Vec<ControlAction>,
}

fn levels(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step - 1e-9).ceil().max(0.0) as usize;
    (1..=count)
        .map(|i| if i == count { max } else { i as f64 * step })
        .collect()
}

impl ActionLattice {
    /// Levels `{0, ΔP, 2ΔP, …, P_max}` per direction; the last level is always the exact maximum.
    pub fn build(p_ch_max: f64, p_dis_max: f64, delta_p: f64) -> Result<Self> {
        if !(delta_p > 0.0) || !delta_p.is_finite() {
            return Err(Error::InvalidStep(delta_p));
        }
        if !(p_ch_max >= 0.0 && p_dis_max >= 0.0) {
            return Err(Error::InvalidParameter(
                "lattice maxima must be nonnegative".into(),
            ));
        }
        let ch = levels(p_ch_max, delta_p);
        let dis = levels(p_dis_max, delta_p);
        let mut actions = Vec::with_capacity(1 + ch.len() + dis.len());
        actions.push(ControlAction::idle());
        actions.extend(ch.iter().map(|&p| ControlAction::charge(p)));
        actions.extend(dis.iter().map(|&p| ControlAction::discharge(p)));
        Ok(Self {
            delta_p,
            levels_ch: ch.len(),
            levels_dis: dis.len(),
            actions,
        })
    }

    /// Lattice with exactly the given actions (used for degenerate test lattices).
    pub fn from_actions(actions: Vec<ControlAction>) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::InvalidParameter("lattice must not be empty".into()));
        }
        let levels_ch = actions.iter().filter(|a| a.p_ch() > 0.0).count();
        let levels_dis = actions.iter().filter(|a| a.p_dis() > 0.0).count();
        Ok(Self {
            delta_p: f64::NAN,
            levels_ch,
            levels_dis,
            actions,
        })
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn levels_ch(&self) -> usize {
        self.levels_ch
    }

    pub fn levels_dis(&self) -> usize {
        self.levels_dis
    }

    pub fn actions(&self) -> &[ControlAction] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, index: usize) -> ControlAction {
        self.actions[index]
    }
}

/// A horizon-length plan, stored as lattice indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateSequence {
    pub genes: Vec<usize>,
}

impl CandidateSequence {
    pub fn new(genes: Vec<usize>) -> Self {
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn actions(&self, lattice: &ActionLattice) -> Vec<ControlAction> {
        self.genes.iter().map(|&g| lattice.get(g)).collect()
    }
}

/// One receding-horizon planning problem.
#[derive(Debug, Clone)]
pub struct HorizonProblem {
    pub window: Window,
    pub soc0: f64,
    pub plant: Plant,
    pub lattice: ActionLattice,
}

impl HorizonProblem {
    pub fn new(window: Window, soc0: f64, plant: Plant, lattice: ActionLattice) -> Result<Self> {
        if window.is_empty() {
            return Err(Error::InvalidParameter(
                "horizon window must contain at least one step".into(),
            ));
        }
        if lattice.is_empty() {
            return Err(Error::InvalidParameter("empty action lattice".into()));
        }
        Ok(Self {
            window,
            soc0,
            plant,
            lattice,
        })
    }

    pub fn horizon(&self) -> usize {
        self.window.len()
    }

    /// `J(u)` for a lattice-valued sequence; genes must be valid indices.
    pub fn cost(&self, u: &CandidateSequence) -> Result<f64> {
        if u.len() != self.horizon() {
            return Err(Error::LengthMismatch {
                what: "candidate sequence".into(),
                expected: self.horizon(),
                found: u.len(),
            });
        }
        if let Some(&g) = u.genes.iter().find(|&&g| g >= self.lattice.len()) {
            return Err(Error::InvalidParameter(format!(
                "gene {g} outside lattice of {}",
                self.lattice.len()
            )));
        }
        Ok(self.cost_unchecked(&u.genes))
    }

    #[inline]
    pub(crate) fn cost_unchecked(&self, genes: &[usize]) -> f64 {
        let mut soc = self.soc0;
        let mut total = 0.0;
        for (t, &g) in genes.iter().enumerate() {
            let (c, next) = self.step(t, soc, g);
            total += c;
            soc = next;
        }
        total + self.plant.terminal_cost(self.soc0, soc)
    }

    /// Cost and unclamped next SOC of lattice action `g` at stage `t` from `soc`.
    #[inline]
    pub fn step(&self, t: usize, soc: f64, g: usize) -> (f64, f64) {
        self.plant.evaluate_step(
            self.window.load[t],
            self.window.renewable[t],
            soc,
            self.lattice.get(g),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub sequence: CandidateSequence,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// Enumerate when affordable, otherwise dynamic programming.
    Auto,
    Enumerate,
    Dp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// SOC grid spacing for dynamic programming, kWh.
    pub soc_grid_step: f64,
    /// Largest number of complete sequences enumeration may visit.
    pub max_enumeration: u128,
    /// Largest number of stage × state × action evaluations dynamic programming may perform.
    pub max_dp_evaluations: u128,
    pub method: ExactMethod,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            soc_grid_step: 10.0,
            max_enumeration: 1_000_000,
            max_dp_evaluations: 50_000_000,
            method: ExactMethod::Auto,
        }
    }
}

fn enumeration_size(actions: usize, horizon: usize) -> u128 {
    let mut n: u128 = 1;
    for _ in 0..horizon {
        n = n.saturating_mul(actions as u128);
    }
    n
}

/// Minimum-cost lattice sequence. Ties go to the lexicographically smallest index vector.
pub fn solve_exact(hp: &HorizonProblem, opts: &ExactOptions) -> Result<Solution> {
    let enum_size = enumeration_size(hp.lattice.len(), hp.horizon());
    match opts.method {
        ExactMethod::Enumerate => {
            if enum_size > opts.max_enumeration {
                return Err(Error::BudgetExceeded {
                    needed: enum_size,
                    limit: opts.max_enumeration,
                });
            }
            Ok(enumerate(hp))
        }
        ExactMethod::Dp => solve_dp(hp, opts),
        ExactMethod::Auto => {
            if enum_size <= opts.max_enumeration {
                Ok(enumerate(hp))
            } else {
                solve_dp(hp, opts)
            }
        }
    }
}

fn enumerate(hp: &HorizonProblem) -> Solution {
    struct Search<'a> {
        hp: &'a HorizonProblem,
        current: Vec<usize>,
        best: Vec<usize>,
        best_cost: f64,
    }

    impl Search<'_> {
        fn descend(&mut self, t: usize, soc: f64, partial: f64) {
            let n = self.hp.horizon();
            if t == n {
                let total = partial + self.hp.plant.terminal_cost(self.hp.soc0, soc);
                if total < self.best_cost {
                    self.best_cost = total;
                    self.best.clone_from(&self.current);
                }
                return;
            }
            for g in 0..self.hp.lattice.len() {
                let (c, next) = self.hp.step(t, soc, g);
                let p = partial + c;
                // every remaining term is nonnegative
                if p >= self.best_cost {
                    continue;
                }
                self.current[t] = g;
                self.descend(t + 1, next, p);
            }
        }
    }

    let n = hp.horizon();
    let mut s = Search {
        hp,
        current: vec![0; n],
        best: vec![0; n],
        best_cost: f64::INFINITY,
    };
    s.descend(0, hp.soc0, 0.0);
    let sequence = CandidateSequence::new(s.best);
    let cost = hp.cost_unchecked(&sequence.genes);
    Solution { sequence, cost }
}

/// Backward DP on a SOC grid over `[0, capacity]`, nearest-node snapping
/// (round half up). Transitions that leave the grid are inadmissible. The plan
/// is then extracted forward from the exact `soc0`, so the returned cost is the
/// true `J` of the returned sequence.
fn solve_dp(hp: &HorizonProblem, opts: &ExactOptions) -> Result<Solution> {
    let h = opts.soc_grid_step;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "soc_grid_step must be positive, got {h}"
        )));
    }
    let capacity = hp.plant.battery.capacity();
    let nodes = (capacity / h).ceil() as usize + 1;
    let n = hp.horizon();
    let na = hp.lattice.len();
    let work = (n as u128) * (nodes as u128) * (na as u128);
    if work > opts.max_dp_evaluations {
        return Err(Error::BudgetExceeded {
            needed: work,
            limit: opts.max_dp_evaluations,
        });
    }

    let snap = |s: f64| -> Option<usize> {
        let k = (s / h + 0.5).floor();
        if k >= 0.0 && (k as usize) < nodes {
            Some(k as usize)
        } else {
            None
        }
    };

    // value[t][k]: cost-to-go from node k at stage t
    let mut value = vec![vec![f64::INFINITY; nodes]; n + 1];
    for (k, v) in value[n].iter_mut().enumerate() {
        *v = hp.plant.terminal_cost(hp.soc0, k as f64 * h);
    }
    for t in (0..n).rev() {
        let (head, tail) = value.split_at_mut(t + 1);
        let next_v = &tail[0];
        for (k, slot) in head[t].iter_mut().enumerate() {
            let soc = k as f64 * h;
            let mut best = f64::INFINITY;
            for g in 0..na {
                let (c, next) = hp.step(t, soc, g);
                if let Some(kn) = snap(next) {
                    let total = c + next_v[kn];
                    if total < best {
                        best = total;
                    }
                }
            }
            *slot = best;
        }
    }

    let mut genes = Vec::with_capacity(n);
    let mut soc = hp.soc0;
    for t in 0..n {
        let mut best_g = None;
        let mut best = f64::INFINITY;
        for g in 0..na {
            let (c, next) = hp.step(t, soc, g);
            let tail = snap(next).map_or(f64::INFINITY, |kn| value[t + 1][kn]);
            if c + tail < best {
                best = c + tail;
                best_g = Some(g);
            }
        }
        // off-grid everywhere: fall back to the cheapest immediate step
        let g = best_g.unwrap_or_else(|| {
            (0..na)
                .fold((0, f64::INFINITY), |(bg, bc), g| {
                    let c = hp.step(t, soc, g).0;
                    if c < bc {
                        (g, c)
                    } else {
                        (bg, bc)
                    }
                })
                .0
        });
        soc = hp.step(t, soc, g).1;
        genes.push(g);
    }
    let sequence = CandidateSequence::new(genes);
    let cost = hp.cost_unchecked(&sequence.genes);
    Ok(Solution { sequence, cost })
}

/// Greedy plan: at each stage, the exact one-step optimum from the predicted SOC.
pub fn solve_myopic(hp: &HorizonProblem) -> Solution {
    let mut genes = Vec::with_capacity(hp.horizon());
    let mut soc = hp.soc0;
    for t in 0..hp.horizon() {
        let mut best = (0, f64::INFINITY, soc);
        for g in 0..hp.lattice.len() {
            let (c, next) = hp.step(t, soc, g);
            let c = c + hp.plant.terminal_cost(soc, next);
            if c < best.1 {
                best = (g, c, next);
            }
        }
        genes.push(best.0);
        soc = best.2;
    }
    let sequence = CandidateSequence::new(genes);
    let cost = hp.cost_unchecked(&sequence.genes);
    Solution { sequence, cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BatteryParams, CostParams};

    fn plant() -> Plant {
        Plant::new(BatteryParams::default(), CostParams::default())
    }

    #[test]
    fn reference_lattice_size() {
        let l = ActionLattice::build(1000.0, 100.0, 50.0).unwrap();
        assert_eq!(l.levels_ch(), 20);
        assert_eq!(l.levels_dis(), 2);
        assert_eq!(l.len(), 23);
        assert_eq!(l.get(0), ControlAction::idle());
        assert_eq!(l.get(20), ControlAction::charge(1000.0));
        assert_eq!(l.get(22), ControlAction::discharge(100.0));
    }

    #[test]
    fn single_step_discharge_lattice() {
        let l = ActionLattice::build(100.0, 100.0, 100.0).unwrap();
        assert_eq!(l.levels_dis(), 1);
        assert_eq!(l.len(), 3);
        assert_eq!(l.get(2), ControlAction::discharge(100.0));
    }

    #[test]
    fn uneven_step_ends_at_maximum() {
        let l = ActionLattice::build(120.0, 0.0, 50.0).unwrap();
        let ch: Vec<f64> = l.actions().iter().map(|a| a.p_ch()).collect();
        assert_eq!(ch, vec![0.0, 50.0, 100.0, 120.0]);
    }

    #[test]
    fn nonpositive_step_rejected() {
        assert!(matches!(
            ActionLattice::build(100.0, 100.0, 0.0),
            Err(Error::InvalidStep(_))
        ));
        assert!(matches!(
            ActionLattice::build(100.0, 100.0, -5.0),
            Err(Error::InvalidStep(_))
        ));
    }

    #[test]
    fn one_step_exact_is_direct_scan() {
        let lattice = ActionLattice::build(200.0, 100.0, 50.0).unwrap();
        let w = Window::new(vec![310.0], vec![230.0]).unwrap();
        let hp = HorizonProblem::new(w, 400.0, plant(), lattice).unwrap();
        let sol = solve_exact(&hp, &ExactOptions::default()).unwrap();
        let scan = (0..hp.lattice.len())
            .map(|g| hp.cost_unchecked(&[g]))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(sol.cost, scan);
        assert_eq!(solve_myopic(&hp), sol);
    }

    #[test]
    fn surplus_window_has_zero_cost_certificate() {
        let lattice = ActionLattice::build(200.0, 100.0, 50.0).unwrap();
        let w = Window::new(vec![100.0, 150.0, 80.0], vec![200.0, 150.0, 300.0]).unwrap();
        let hp = HorizonProblem::new(w, 500.0, plant(), lattice).unwrap();
        let sol = solve_exact(&hp, &ExactOptions::default()).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert!(sol
            .sequence
            .actions(&hp.lattice)
            .iter()
            .all(|a| a.p_dis() == 0.0));
    }

    #[test]
    fn zero_load_myopic_is_idle() {
        let lattice = ActionLattice::build(200.0, 100.0, 50.0).unwrap();
        let w = Window::new(vec![0.0; 4], vec![0.0; 4]).unwrap();
        let hp = HorizonProblem::new(w, 500.0, plant(), lattice).unwrap();
        let sol = solve_myopic(&hp);
        assert!(sol.sequence.genes.iter().all(|&g| g == 0));
        assert_eq!(sol.cost, 0.0);
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let lattice = ActionLattice::build(1000.0, 100.0, 50.0).unwrap();
        let w = Window::new(vec![100.0; 6], vec![50.0; 6]).unwrap();
        let hp = HorizonProblem::new(w, 500.0, plant(), lattice).unwrap();
        let opts = ExactOptions {
            method: ExactMethod::Enumerate,
            ..ExactOptions::default()
        };
        assert!(matches!(
            solve_exact(&hp, &opts),
            Err(Error::BudgetExceeded { .. })
        ));
        let opts = ExactOptions {
            max_dp_evaluations: 10,
            ..ExactOptions::default()
        };
        assert!(matches!(
            solve_exact(&hp, &opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn cost_rejects_bad_genes() {
        let lattice = ActionLattice::build(100.0, 100.0, 50.0).unwrap();
        let w = Window::new(vec![1.0; 2], vec![0.0; 2]).unwrap();
        let hp = HorizonProblem::new(w, 500.0, plant(), lattice).unwrap();
        assert!(hp.cost(&CandidateSequence::new(vec![0])).is_err());
        assert!(hp.cost(&CandidateSequence::new(vec![0, 99])).is_err());
    }
}

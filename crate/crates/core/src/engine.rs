//! Closed-loop receding-horizon simulation and multi-strategy comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::{rule_policy, Dispatch, StrategyKind};
use crate::battery::{clip_feasible, effective_action, renewable_surplus, step_soc};
use crate::costing::{soc_penalty, CostBreakdown, StepFlows, Window};
use crate::error::{Error, Result};
use crate::evo::{aco_solve, eg_solve, AcoParams, EvoParams};
use crate::horizon::{solve_exact, solve_myopic, HorizonProblem};
use crate::io::{Config, RenewableSource};
use crate::types::Scenario;

/// One simulated hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub hour: usize,
    pub load: f64,
    pub renewable_available: f64,
    pub renewable_used: f64,
    pub p_ch: f64,
    pub p_dis: f64,
    pub backup: f64,
    pub curtailed: f64,
    pub soc_start: f64,
    /// SOC at the end of the hour.
    pub soc: f64,
    pub cost: CostBreakdown,
}

impl StepRecord {
    pub fn flows(&self) -> StepFlows {
        StepFlows {
            renewable_used: self.renewable_used,
            p_ch: self.p_ch,
            p_dis: self.p_dis,
            backup: self.backup,
            curtailed: self.curtailed,
        }
    }
}

/// Full closed-loop result for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispatchTrace {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub soc0: f64,
    pub records: Vec<StepRecord>,
    pub total_cost: f64,
    pub total_backup_kwh: f64,
    pub total_curtailed_kwh: f64,
    /// Optimizer best-cost trace per simulated hour; empty for non-metaheuristic strategies.
    pub convergence: Vec<Vec<f64>>,
}

impl DispatchTrace {
    pub fn total_breakdown(&self) -> CostBreakdown {
        let (b, bk, p) = self.records.iter().fold((0.0, 0.0, 0.0), |acc, r| {
            (
                acc.0 + r.cost.battery,
                acc.1 + r.cost.backup,
                acc.2 + r.cost.penalty,
            )
        });
        CostBreakdown::new(b, bk, p)
    }
}

/// Seed of the per-strategy RNG stream.
pub fn strategy_seed(seed: u64, kind: StrategyKind) -> u64 {
    let idx = StrategyKind::ALL
        .iter()
        .position(|&k| k == kind)
        .unwrap_or(0);
    seed ^ idx as u64
}

/// Renewable output actually available each hour.
pub fn renewable_series(scenario: &Scenario, cfg: &Config) -> Result<Vec<f64>> {
    match cfg.renewable_source {
        RenewableSource::Model => Ok(scenario
            .irradiance()
            .iter()
            .zip(scenario.wind_speed())
            .map(|(&g, &v)| cfg.renewable.predict(g, v))
            .collect()),
        RenewableSource::Observed => scenario
            .observed_renewable()
            .map(<[f64]>::to_vec)
            .ok_or_else(|| Error::Config {
                key: "renewable.source".into(),
                message: "observed source needs a renewable_kw column".into(),
            }),
    }
}

struct Planned {
    dispatch: Dispatch,
    trace: Option<Vec<f64>>,
}

fn plan_hour(
    kind: StrategyKind,
    cfg: &Config,
    window: Window,
    soc: f64,
    seed: u64,
) -> Result<Planned> {
    let plant = cfg.plant();
    let load = window.load[0];
    let ren = window.renewable[0];
    if let Some(policy) = rule_policy(kind) {
        return Ok(Planned {
            dispatch: policy(soc, load, ren, &cfg.battery),
            trace: None,
        });
    }
    let lattice = cfg.lattice()?;
    let (gene, trace) = match kind {
        StrategyKind::MyopicMpc => {
            let w = Window::new(vec![load], vec![ren])?;
            let hp = HorizonProblem::new(w, soc, plant, lattice.clone())?;
            (solve_myopic(&hp).sequence.genes[0], None)
        }
        StrategyKind::StandardMpc => {
            let hp = HorizonProblem::new(window, soc, plant, lattice.clone())?;
            (
                solve_exact(&hp, &cfg.exact_options())?.sequence.genes[0],
                None,
            )
        }
        StrategyKind::AcMpc => {
            let hp = HorizonProblem::new(window, soc, plant, lattice.clone())?;
            let ap = AcoParams { seed, ..cfg.aco };
            let out = aco_solve(&hp, &ap)?;
            (out.sequence.genes[0], Some(out.trace))
        }
        StrategyKind::EgMpc => {
            let hp = HorizonProblem::new(window, soc, plant, lattice.clone())?;
            let ep = EvoParams { seed, ..cfg.evo };
            let out = eg_solve(&hp, &ep)?;
            (out.sequence.genes[0], Some(out.trace))
        }
        _ => unreachable!("rule-based strategies handled above"),
    };
    let a = effective_action(lattice.get(gene), load, ren, plant.allow_backup_charging);
    Ok(Planned {
        dispatch: Dispatch::plain(a),
        trace,
    })
}

/// Runs `strategy` over the whole scenario, applying only the first planned
/// action each hour.
///
/// `seed` is the base seed; the strategy's stream is derived with
/// [`strategy_seed`], so a strategy gives the same trace alone or in a comparison.
pub fn run_closed_loop(
    scenario: &Scenario,
    strategy: StrategyKind,
    cfg: &Config,
    seed: u64,
) -> Result<DispatchTrace> {
    cfg.validate()?;
    let renewable = renewable_series(scenario, cfg)?;
    let bp = cfg.battery;
    let cp = cfg.costs;
    let dt = bp.dt();
    let steps = scenario.steps();
    let mut rng = ChaCha8Rng::seed_from_u64(strategy_seed(seed, strategy));

    let mut soc = cfg.soc0;
    let mut records = Vec::with_capacity(steps);
    let mut convergence = Vec::new();
    for t in 0..steps {
        let hour_seed: u64 = rng.gen();
        let end = (t + cfg.horizon).min(steps);
        let load_w = scenario.load()[t..end].to_vec();
        let mut ren_w = renewable[t..end].to_vec();
        if cfg.forecast_noise && cfg.forecast_noise_kw > 0.0 {
            let amp = cfg.forecast_noise_kw;
            for r in ren_w.iter_mut().skip(1) {
                *r = (*r + rng.gen_range(-amp..=amp)).max(0.0);
            }
        }
        let load = load_w[0];
        let ren = ren_w[0];
        let planned = plan_hour(strategy, cfg, Window::new(load_w, ren_w)?, soc, hour_seed)?;
        if let Some(tr) = planned.trace {
            convergence.push(tr);
        }

        let surplus = if cfg.allow_backup_charging {
            f64::INFINITY
        } else {
            renewable_surplus(load, ren)
        };
        let wanted = planned.dispatch;
        let applied = clip_feasible(&bp, soc, wanted.action, surplus);
        let cycled = if applied == wanted.action {
            wanted.cycled_discharge
        } else {
            applied.p_dis()
        };
        let flows = StepFlows::settle(load, ren, applied);
        let next = step_soc(&bp, soc, applied).clamp(bp.soc_min(), bp.soc_max());
        let cost = CostBreakdown::new(
            cp.c_bat() * cycled * dt,
            cp.c_backup() * flows.backup * dt,
            soc_penalty(&cp, &bp, next),
        );
        records.push(StepRecord {
            hour: scenario.start_hour() + t,
            load,
            renewable_available: ren,
            renewable_used: flows.renewable_used,
            p_ch: flows.p_ch,
            p_dis: flows.p_dis,
            backup: flows.backup,
            curtailed: flows.curtailed,
            soc_start: soc,
            soc: next,
            cost,
        });
        soc = next;
    }

    let total_cost = records.iter().map(|r| r.cost.total).sum();
    let total_backup_kwh = records.iter().map(|r| r.backup * dt).sum();
    let total_curtailed_kwh = records.iter().map(|r| r.curtailed * dt).sum();
    Ok(DispatchTrace {
        strategy,
        seed,
        soc0: cfg.soc0,
        records,
        total_cost,
        total_backup_kwh,
        total_curtailed_kwh,
        convergence,
    })
}

/// Runs several strategies on the same scenario in parallel; results keep the input order.
pub fn compare_strategies(
    scenario: &Scenario,
    strategies: &[StrategyKind],
    cfg: &Config,
    seed: u64,
) -> Result<Vec<DispatchTrace>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = strategies
            .iter()
            .map(|&k| s.spawn(move || run_closed_loop(scenario, k, cfg, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("strategy thread panicked"))
            .collect()
    })
}

//! Backup power, per-step cost decomposition, bus energy balance and the
//! cumulative horizon cost `J(u)`.

use serde::Serialize;

use crate::battery::{effective_action, step_soc};
use crate::error::{Error, Result};
use crate::types::{BatteryParams, ControlAction, CostParams};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub battery: f64,
    pub backup: f64,
    pub penalty: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(battery: f64, backup: f64, penalty: f64) -> Self {
        Self {
            battery,
            backup,
            penalty,
            total: battery + backup + penalty,
        }
    }
}

/// Power flows on the bus for one applied hour (kW).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StepFlows {
    pub renewable_used: f64,
    pub p_ch: f64,
    pub p_dis: f64,
    pub backup: f64,
    pub curtailed: f64,
}

impl StepFlows {
    /// Settles an applied action against load and available renewables.
    ///
    /// The action must already be bus-feasible: discharge no larger than the
    /// renewable deficit.
    pub fn settle(load: f64, renewable: f64, a: ControlAction) -> Self {
        let backup = backup_power(load, renewable, a);
        let renewable_used = if backup > 0.0 {
            renewable
        } else {
            (load + a.p_ch() - a.p_dis()).clamp(0.0, renewable)
        };
        Self {
            renewable_used,
            p_ch: a.p_ch(),
            p_dis: a.p_dis(),
            backup,
            curtailed: renewable - renewable_used,
        }
    }

    /// `renewable_used + p_dis + backup - p_ch - load`; zero when balanced.
    pub fn balance_residual(&self, load: f64) -> f64 {
        self.renewable_used + self.p_dis + self.backup - self.p_ch - load
    }
}

/// Diesel power needed to close the balance: `max(0, load - (renewable + p_dis - p_ch))`.
pub fn backup_power(load: f64, renewable: f64, a: ControlAction) -> f64 {
    (load - (renewable + a.p_dis() - a.p_ch())).max(0.0)
}

/// SOC bound violation penalty for a (possibly out-of-range) next SOC.
pub fn soc_penalty(cp: &CostParams, bp: &BatteryParams, soc_next: f64) -> f64 {
    cp.q_under() * (bp.soc_min() - soc_next).max(0.0)
        + cp.r_over() * (soc_next - bp.soc_max()).max(0.0)
}

/// Cost of one hour, given the unclamped next SOC produced by `a`.
pub fn step_cost(
    cp: &CostParams,
    bp: &BatteryParams,
    load: f64,
    renewable: f64,
    a: ControlAction,
    soc_next: f64,
) -> CostBreakdown {
    let dt = bp.dt();
    CostBreakdown::new(
        cp.c_bat() * a.p_dis() * dt,
        cp.c_backup() * backup_power(load, renewable, a) * dt,
        soc_penalty(cp, bp, soc_next),
    )
}

/// Load and forecast renewable output over a planning window (kW per hour).
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub load: Vec<f64>,
    pub renewable: Vec<f64>,
}

impl Window {
    pub fn new(load: Vec<f64>, renewable: Vec<f64>) -> Result<Self> {
        if load.len() != renewable.len() {
            return Err(Error::LengthMismatch {
                what: "window renewable".into(),
                expected: load.len(),
                found: renewable.len(),
            });
        }
        Ok(Self { load, renewable })
    }

    pub fn len(&self) -> usize {
        self.load.len()
    }

    pub fn is_empty(&self) -> bool {
        self.load.is_empty()
    }
}

/// Everything needed to price an action at a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub battery: BatteryParams,
    pub costs: CostParams,
    pub allow_backup_charging: bool,
}

impl Plant {
    pub fn new(battery: BatteryParams, costs: CostParams) -> Self {
        Self {
            battery,
            costs,
            allow_backup_charging: false,
        }
    }

    /// Realises a set-point at one hour and returns `(cost, unclamped next SOC)`.
    #[inline]
    pub fn evaluate_step(
        &self,
        load: f64,
        renewable: f64,
        soc: f64,
        a: ControlAction,
    ) -> (f64, f64) {
        let a = effective_action(a, load, renewable, self.allow_backup_charging);
        let next = step_soc(&self.battery, soc, a);
        let c = step_cost(&self.costs, &self.battery, load, renewable, a, next);
        (c.total, next)
    }

    /// Cost attached to the SOC a plan ends with.
    #[inline]
    pub fn terminal_cost(&self, soc_start: f64, soc_end: f64) -> f64 {
        let v = self.costs.terminal_soc_value();
        if v == 0.0 {
            0.0
        } else {
            v * (soc_start - soc_end).max(0.0)
        }
    }

    /// `J(u)`: forward-simulates the unclamped SOC from `soc0` and sums step costs.
    pub fn sequence_cost(&self, window: &Window, soc0: f64, u: &[ControlAction]) -> Result<f64> {
        if u.len() != window.len() {
            return Err(Error::LengthMismatch {
                what: "candidate sequence".into(),
                expected: window.len(),
                found: u.len(),
            });
        }
        Ok(self.sequence_cost_unchecked(window, soc0, u))
    }

    pub(crate) fn sequence_cost_unchecked(
        &self,
        window: &Window,
        soc0: f64,
        u: &[ControlAction],
    ) -> f64 {
        let mut soc = soc0;
        let mut total = 0.0;
        for (t, a) in u.iter().enumerate() {
            let (c, next) = self.evaluate_step(window.load[t], window.renewable[t], soc, *a);
            total += c;
            soc = next;
        }
        total + self.terminal_cost(soc0, soc)
    }
}

/// Free-function form of [`Plant::sequence_cost`].
pub fn sequence_cost(
    cp: &CostParams,
    bp: &BatteryParams,
    window: &Window,
    soc0: f64,
    u: &[ControlAction],
) -> Result<f64> {
    Plant::new(*bp, *cp).sequence_cost(window, soc0, u)
}

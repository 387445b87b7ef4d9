//! Rule-based dispatch policies and the strategy catalogue.
//!
//! Battery-First and 50/50 both want to discharge into the load while
//! renewables charge the battery in the same hour. Actions are exclusive, so
//! the two flows are netted into one action; the gross discharge is kept as
//! `cycled_discharge` and priced as battery wear.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::battery::clip_feasible;
use crate::error::Error;
use crate::types::{BatteryParams, ControlAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StrategyKind {
    RenewableFirst,
    BatteryFirst,
    FiftyFifty,
    MyopicMpc,
    StandardMpc,
    AcMpc,
    EgMpc,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::RenewableFirst,
        StrategyKind::BatteryFirst,
        StrategyKind::FiftyFifty,
        StrategyKind::MyopicMpc,
        StrategyKind::StandardMpc,
        StrategyKind::AcMpc,
        StrategyKind::EgMpc,
    ];

    pub const RULE_BASED: [StrategyKind; 3] = [
        StrategyKind::RenewableFirst,
        StrategyKind::BatteryFirst,
        StrategyKind::FiftyFifty,
    ];

    /// Canonical snake_case name used in config files, CLI flags and reports.
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::RenewableFirst => "renewable_first",
            StrategyKind::BatteryFirst => "battery_first",
            StrategyKind::FiftyFifty => "fifty_fifty",
            StrategyKind::MyopicMpc => "myopic_mpc",
            StrategyKind::StandardMpc => "standard_mpc",
            StrategyKind::AcMpc => "ac_mpc",
            StrategyKind::EgMpc => "eg_mpc",
        }
    }

    pub fn is_rule_based(self) -> bool {
        Self::RULE_BASED.contains(&self)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    /// Accepts the snake_case names and the CamelCase variant names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == t || format!("{k:?}") == t)
            .ok_or_else(|| Error::UnknownStrategy(t.to_string()))
    }
}

/// An applied action plus the gross discharge booked as battery cycling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dispatch {
    pub action: ControlAction,
    pub cycled_discharge: f64,
}

impl Dispatch {
    pub fn plain(action: ControlAction) -> Self {
        Self {
            action,
            cycled_discharge: action.p_dis(),
        }
    }
}

fn discharge_room(p: &BatteryParams, soc: f64) -> f64 {
    ((soc - p.soc_min()).max(0.0) * p.eta_dis() / p.dt()).min(p.p_dis_max())
}

fn charge_room(p: &BatteryParams, soc: f64) -> f64 {
    ((p.soc_max() - soc).max(0.0) / (p.eta_ch() * p.dt())).min(p.p_ch_max())
}

/// Gross discharge into the load and gross charge from leftover renewables, netted.
fn net_dispatch(p: &BatteryParams, soc: f64, dis_gross: f64, renewable_left: f64) -> Dispatch {
    let ch_gross = renewable_left.max(0.0).min(charge_room(p, soc));
    let action = if dis_gross >= ch_gross {
        ControlAction::discharge(dis_gross - ch_gross)
    } else {
        ControlAction::charge(ch_gross - dis_gross)
    };
    Dispatch {
        action,
        cycled_discharge: dis_gross,
    }
}

/// Renewables serve the load first; surplus charges, deficit discharges, backup covers the rest.
pub fn renewable_first_step(soc: f64, load: f64, renewable: f64, p: &BatteryParams) -> Dispatch {
    let surplus = (renewable - load).max(0.0);
    let deficit = (load - renewable).max(0.0);
    let action = if surplus > 0.0 {
        clip_feasible(p, soc, ControlAction::charge(surplus), surplus)
    } else if deficit > 0.0 {
        clip_feasible(p, soc, ControlAction::discharge(deficit), 0.0)
    } else {
        ControlAction::idle()
    };
    Dispatch::plain(action)
}

/// The battery serves the load first; renewables go to storage after covering any remainder.
pub fn battery_first_step(soc: f64, load: f64, renewable: f64, p: &BatteryParams) -> Dispatch {
    let dis_gross = load.min(discharge_room(p, soc));
    let residual = load - dis_gross;
    let renewable_left = renewable - renewable.min(residual);
    net_dispatch(p, soc, dis_gross, renewable_left)
}

/// Half the load from renewables, half from the battery; shortfalls spill to the other source, then backup.
pub fn fifty_fifty_step(soc: f64, load: f64, renewable: f64, p: &BatteryParams) -> Dispatch {
    let half = load / 2.0;
    let room = discharge_room(p, soc);
    let ren_share = renewable.min(half);
    let bat_share = room.min(half);
    let bat_extra = (half - ren_share).min(room - bat_share).max(0.0);
    let ren_extra = (half - bat_share).min(renewable - ren_share).max(0.0);
    let dis_gross = bat_share + bat_extra;
    let renewable_left = renewable - ren_share - ren_extra;
    net_dispatch(p, soc, dis_gross, renewable_left)
}

/// `(soc, load, renewable, battery) -> dispatch`
pub type RulePolicy = fn(f64, f64, f64, &BatteryParams) -> Dispatch;

/// Policy function for a rule-based strategy; `None` for optimizer strategies.
pub fn rule_policy(kind: StrategyKind) -> Option<RulePolicy> {
    match kind {
        StrategyKind::RenewableFirst => Some(renewable_first_step),
        StrategyKind::BatteryFirst => Some(battery_first_step),
        StrategyKind::FiftyFifty => Some(fifty_fifty_step),
        _ => None,
    }
}

//! Receding-horizon energy dispatch for hybrid solar/wind/battery/diesel
//! systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`types`]: validated domain values (scenarios, battery and cost parameters, actions)
//! * [`renewable`]: the lumped linear renewable-generation surrogate and its least-squares fit
//! * [`battery`]: state-of-charge transitions and feasibility clipping
//! * [`costing`]: backup power, per-step cost decomposition, horizon cost
//! * [`horizon`]: action lattice, finite-horizon problems, exact and myopic solvers
//! * [`evo`]: evolutionary-game and ant-colony searchers over candidate sequences
//! * [`baselines`]: rule-based dispatch policies
//! * [`engine`]: the closed-loop simulator and strategy comparison
//! * [`io`]: CSV ingestion, synthetic data, configuration and report files

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod battery;
pub mod cli;
pub mod costing;
pub mod engine;
pub mod error;
pub mod evo;
pub mod horizon;
pub mod io;
pub mod renewable;
pub mod types;

pub use error::{Error, Result};
pub use types::{BatteryParams, BatteryState, ControlAction, CostParams, Scenario};

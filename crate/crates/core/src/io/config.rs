//! Flat `key = value` configuration files.
//!
//! Lines starting with `#` and blank lines are ignored. Every key is
//! optional; missing keys keep their defaults. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::Path;

use crate::baselines::StrategyKind;
use crate::costing::Plant;
use crate::error::{Error, Result};
use crate::evo::{AcoParams, EvoParams};
use crate::horizon::{ActionLattice, ExactMethod, ExactOptions};
use crate::io::synth::SyntheticProfile;
use crate::renewable::RenewableModel;
use crate::types::{BatteryParams, CostParams};

/// Where the closed loop takes the available renewable power from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenewableSource {
    /// Evaluate the fitted surrogate on irradiance and wind.
    Model,
    /// Use the scenario's measured renewable column.
    Observed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub strategy: StrategyKind,
    pub horizon: usize,
    pub delta_p: f64,
    pub soc_grid_step: f64,
    pub max_enumeration: u128,
    pub max_dp_evaluations: u128,
    pub battery: BatteryParams,
    pub soc0: f64,
    pub costs: CostParams,
    pub renewable: RenewableModel,
    pub renewable_source: RenewableSource,
    pub evo: EvoParams,
    pub aco: AcoParams,
    pub allow_backup_charging: bool,
    pub forecast_noise: bool,
    /// Half-width of the uniform forecast error, kW.
    pub forecast_noise_kw: f64,
    pub synthetic: SyntheticProfile,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 42,
            strategy: StrategyKind::EgMpc,
            horizon: 6,
            delta_p: 50.0,
            soc_grid_step: 10.0,
            max_enumeration: 1_000_000,
            max_dp_evaluations: 50_000_000,
            battery: BatteryParams::default(),
            soc0: 500.0,
            costs: CostParams::default(),
            renewable: RenewableModel::default(),
            renewable_source: RenewableSource::Model,
            evo: EvoParams::default(),
            aco: AcoParams::default(),
            allow_backup_charging: false,
            forecast_noise: false,
            forecast_noise_kw: 20.0,
            synthetic: SyntheticProfile::default(),
        }
    }
}

impl Config {
    pub fn plant(&self) -> Plant {
        Plant {
            battery: self.battery,
            costs: self.costs,
            allow_backup_charging: self.allow_backup_charging,
        }
    }

    pub fn lattice(&self) -> Result<ActionLattice> {
        ActionLattice::build(
            self.battery.p_ch_max(),
            self.battery.p_dis_max(),
            self.delta_p,
        )
    }

    pub fn exact_options(&self) -> ExactOptions {
        ExactOptions {
            soc_grid_step: self.soc_grid_step,
            max_enumeration: self.max_enumeration,
            max_dp_evaluations: self.max_dp_evaluations,
            method: ExactMethod::Auto,
        }
    }

    /// Cross-field checks not covered by the component constructors.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |key: &str, message: String| Error::Config {
            key: key.into(),
            message,
        };
        if self.horizon < 1 {
            return Err(cfg_err("horizon", "must be at least 1".into()));
        }
        if !(self.soc0 >= self.battery.soc_min() && self.soc0 <= self.battery.soc_max()) {
            return Err(cfg_err(
                "battery.soc0",
                format!(
                    "{} outside [{}, {}]",
                    self.soc0,
                    self.battery.soc_min(),
                    self.battery.soc_max()
                ),
            ));
        }
        if !(self.soc_grid_step > 0.0) {
            return Err(cfg_err("soc_grid_step", "must be positive".into()));
        }
        if !(self.forecast_noise_kw >= 0.0 && self.forecast_noise_kw.is_finite()) {
            return Err(cfg_err("forecast_noise_kw", "must be nonnegative".into()));
        }
        self.lattice()?;
        self.evo.validate()?;
        self.aco.validate()?;
        self.synthetic.validate()?;
        Ok(())
    }

    /// Overrides one key using the file syntax; `self` is unchanged on error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key.contains(['\n', '=']) || value.contains('\n') {
            return Err(Error::Config {
                key: key.into(),
                message: "key and value must be single tokens".into(),
            });
        }
        let text = format!("{}{} = {}\n", self.to_text(), key.trim(), value.trim());
        *self = Self::parse(&text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut battery = cfg.battery.spec();
        let mut costs = RawCosts::from(&cfg.costs);
        let mut renewable = cfg.renewable;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                key: line.to_string(),
                message: format!("line {}: expected `key = value`", lineno + 1),
            })?;
            let key = key.trim();
            let value = value.trim();
            let f = || parse_num::<f64>(key, value);
            let u = || parse_num::<usize>(key, value);
            match key {
                "seed" => cfg.seed = parse_num(key, value)?,
                "strategy" => cfg.strategy = value.parse()?,
                "horizon" => cfg.horizon = u()?,
                "delta_p" => cfg.delta_p = f()?,
                "soc_grid_step" => cfg.soc_grid_step = f()?,
                "max_enumeration" => cfg.max_enumeration = parse_num(key, value)?,
                "max_dp_evaluations" => cfg.max_dp_evaluations = parse_num(key, value)?,
                "battery.capacity" => battery.capacity = f()?,
                "battery.soc_min" => battery.soc_min = f()?,
                "battery.soc_max" => battery.soc_max = f()?,
                "battery.soc0" => cfg.soc0 = f()?,
                "battery.p_ch_max" => battery.p_ch_max = f()?,
                "battery.p_dis_max" => battery.p_dis_max = f()?,
                "battery.eta_ch" => battery.eta_ch = f()?,
                "battery.eta_dis" => battery.eta_dis = f()?,
                "battery.dt" => battery.dt = f()?,
                "cost.c_bat" => costs.c_bat = f()?,
                "cost.c_backup" => costs.c_backup = f()?,
                "cost.q_under" => costs.q_under = f()?,
                "cost.r_over" => costs.r_over = f()?,
                "cost.terminal_soc_value" => costs.terminal = f()?,
                "renewable.a1" => renewable.a1 = f()?,
                "renewable.a2" => renewable.a2 = f()?,
                "renewable.a3" => renewable.a3 = f()?,
                "renewable.a4" => renewable.a4 = f()?,
                "renewable.p_rated" => renewable.p_rated = f()?,
                "renewable.source" => {
                    cfg.renewable_source = match value {
                        "model" => RenewableSource::Model,
                        "observed" => RenewableSource::Observed,
                        other => {
                            return Err(Error::Config {
                                key: key.into(),
                                message: format!("expected `model` or `observed`, got `{other}`"),
                            })
                        }
                    }
                }
                "evo.population" => cfg.evo.population = u()?,
                "evo.generations" => cfg.evo.generations = u()?,
                "evo.p_mut" => cfg.evo.p_mut = f()?,
                "evo.crossover_points" => cfg.evo.crossover_points = u()?,
                "evo.elite" => cfg.evo.elite = u()?,
                "evo.local_search_budget" => cfg.evo.local_search_budget = u()?,
                "evo.epsilon_fitness" => cfg.evo.epsilon_fitness = f()?,
                "aco.ants" => cfg.aco.ants = u()?,
                "aco.iterations" => cfg.aco.iterations = u()?,
                "aco.evaporation" => cfg.aco.evaporation = f()?,
                "aco.pheromone_init" => cfg.aco.pheromone_init = f()?,
                "aco.alpha" => cfg.aco.alpha = f()?,
                "aco.beta" => cfg.aco.beta = f()?,
                "allow_backup_charging" => cfg.allow_backup_charging = parse_bool(key, value)?,
                "forecast_noise" => cfg.forecast_noise = parse_bool(key, value)?,
                "forecast_noise_kw" => cfg.forecast_noise_kw = f()?,
                "synthetic.irradiance_peak" => cfg.synthetic.irradiance_peak = f()?,
                "synthetic.sunrise" => cfg.synthetic.sunrise = f()?,
                "synthetic.sunset" => cfg.synthetic.sunset = f()?,
                "synthetic.wind_speed" => cfg.synthetic.wind_speed = f()?,
                "synthetic.wind_jitter" => cfg.synthetic.wind_jitter = f()?,
                "synthetic.load_base" => cfg.synthetic.load_base = f()?,
                "synthetic.load_bump" => cfg.synthetic.load_bump = f()?,
                "synthetic.bump_start" => cfg.synthetic.bump_start = f()?,
                "synthetic.bump_end" => cfg.synthetic.bump_end = f()?,
                unknown => {
                    return Err(Error::Config {
                        key: unknown.into(),
                        message: "unknown key".into(),
                    })
                }
            }
        }

        cfg.battery = BatteryParams::new(battery).map_err(|e| Error::Config {
            key: "battery".into(),
            message: e.to_string(),
        })?;
        cfg.costs = CostParams::new(costs.c_bat, costs.c_backup, costs.q_under, costs.r_over)
            .and_then(|c| c.with_terminal_soc_value(costs.terminal))
            .map_err(|e| Error::Config {
                key: "cost".into(),
                message: e.to_string(),
            })?;
        cfg.renewable = RenewableModel::new(
            renewable.a1,
            renewable.a2,
            renewable.a3,
            renewable.a4,
            renewable.p_rated,
        )
        .map_err(|e| Error::Config {
            key: "renewable".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serialises every key; floats use the shortest exact representation.
    pub fn to_text(&self) -> String {
        let b = self.battery.spec();
        let c = &self.costs;
        let r = &self.renewable;
        let e = &self.evo;
        let a = &self.aco;
        let s = &self.synthetic;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("seed", self.seed.to_string());
        kv("strategy", self.strategy.to_string());
        kv("horizon", self.horizon.to_string());
        kv("delta_p", self.delta_p.to_string());
        kv("soc_grid_step", self.soc_grid_step.to_string());
        kv("max_enumeration", self.max_enumeration.to_string());
        kv("max_dp_evaluations", self.max_dp_evaluations.to_string());
        kv("battery.capacity", b.capacity.to_string());
        kv("battery.soc_min", b.soc_min.to_string());
        kv("battery.soc_max", b.soc_max.to_string());
        kv("battery.soc0", self.soc0.to_string());
        kv("battery.p_ch_max", b.p_ch_max.to_string());
        kv("battery.p_dis_max", b.p_dis_max.to_string());
        kv("battery.eta_ch", b.eta_ch.to_string());
        kv("battery.eta_dis", b.eta_dis.to_string());
        kv("battery.dt", b.dt.to_string());
        kv("cost.c_bat", c.c_bat().to_string());
        kv("cost.c_backup", c.c_backup().to_string());
        kv("cost.q_under", c.q_under().to_string());
        kv("cost.r_over", c.r_over().to_string());
        kv(
            "cost.terminal_soc_value",
            c.terminal_soc_value().to_string(),
        );
        kv("renewable.a1", r.a1.to_string());
        kv("renewable.a2", r.a2.to_string());
        kv("renewable.a3", r.a3.to_string());
        kv("renewable.a4", r.a4.to_string());
        kv("renewable.p_rated", r.p_rated.to_string());
        kv(
            "renewable.source",
            match self.renewable_source {
                RenewableSource::Model => "model",
                RenewableSource::Observed => "observed",
            }
            .into(),
        );
        kv("evo.population", e.population.to_string());
        kv("evo.generations", e.generations.to_string());
        kv("evo.p_mut", e.p_mut.to_string());
        kv("evo.crossover_points", e.crossover_points.to_string());
        kv("evo.elite", e.elite.to_string());
        kv("evo.local_search_budget", e.local_search_budget.to_string());
        kv("evo.epsilon_fitness", e.epsilon_fitness.to_string());
        kv("aco.ants", a.ants.to_string());
        kv("aco.iterations", a.iterations.to_string());
        kv("aco.evaporation", a.evaporation.to_string());
        kv("aco.pheromone_init", a.pheromone_init.to_string());
        kv("aco.alpha", a.alpha.to_string());
        kv("aco.beta", a.beta.to_string());
        kv(
            "allow_backup_charging",
            self.allow_backup_charging.to_string(),
        );
        kv("forecast_noise", self.forecast_noise.to_string());
        kv("forecast_noise_kw", self.forecast_noise_kw.to_string());
        kv("synthetic.irradiance_peak", s.irradiance_peak.to_string());
        kv("synthetic.sunrise", s.sunrise.to_string());
        kv("synthetic.sunset", s.sunset.to_string());
        kv("synthetic.wind_speed", s.wind_speed.to_string());
        kv("synthetic.wind_jitter", s.wind_jitter.to_string());
        kv("synthetic.load_base", s.load_base.to_string());
        kv("synthetic.load_bump", s.load_bump.to_string());
        kv("synthetic.bump_start", s.bump_start.to_string());
        kv("synthetic.bump_end", s.bump_end.to_string());
        out
    }
}

struct RawCosts {
    c_bat: f64,
    c_backup: f64,
    q_under: f64,
    r_over: f64,
    terminal: f64,
}

impl From<&CostParams> for RawCosts {
    fn from(c: &CostParams) -> Self {
        Self {
            c_bat: c.c_bat(),
            c_backup: c.c_backup(),
            q_under: c.q_under(),
            r_over: c.r_over(),
            terminal: c.terminal_soc_value(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| Error::Config {
        key: key.into(),
        message: format!("cannot parse `{value}`: {e}"),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(Error::Config {
            key: key.into(),
            message: format!("expected a boolean, got `{value}`"),
        }),
    }
}

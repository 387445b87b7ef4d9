//! Validated domain values shared by every other module.
//!
//! Units: powers are kW, energies kWh, times hours. `dt` converts a power
//! into an energy exactly once per transition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hourly resource and demand series seen by the controller.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    start_hour: usize,
    irradiance: Vec<f64>,
    wind_speed: Vec<f64>,
    load: Vec<f64>,
    /// Measured renewable output, when the source data carries it.
    observed_renewable: Option<Vec<f64>>,
}

fn check_series(name: &str, values: &[f64], steps: usize) -> Result<()> {
    if values.len() != steps {
        return Err(Error::LengthMismatch {
            what: name.to_string(),
            expected: steps,
            found: values.len(),
        });
    }
    for (index, &value) in values.iter().enumerate() {
        // NaN fails this comparison too
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeValue {
                series: name.to_string(),
                index,
                value,
            });
        }
    }
    Ok(())
}

impl Scenario {
    pub fn new(
        start_hour: usize,
        steps: usize,
        irradiance: Vec<f64>,
        wind_speed: Vec<f64>,
        load: Vec<f64>,
    ) -> Result<Self> {
        Self {
            start_hour,
            irradiance,
            wind_speed,
            load,
            observed_renewable: None,
        }
        .validate(steps)
    }

    /// Attaches a measured renewable output series (kW).
    pub fn with_observed_renewable(mut self, observed: Vec<f64>) -> Result<Self> {
        let steps = self.steps();
        self.observed_renewable = Some(observed);
        self.validate(steps)
    }

    /// Returns the scenario unchanged iff every series has `steps` nonnegative entries.
    pub fn validate(self, steps: usize) -> Result<Self> {
        check_series("irradiance", &self.irradiance, steps)?;
        check_series("wind_speed", &self.wind_speed, steps)?;
        check_series("load", &self.load, steps)?;
        if let Some(obs) = &self.observed_renewable {
            check_series("observed_renewable", obs, steps)?;
        }
        Ok(self)
    }

    pub fn start_hour(&self) -> usize {
        self.start_hour
    }

    pub fn steps(&self) -> usize {
        self.load.len()
    }

    pub fn irradiance(&self) -> &[f64] {
        &self.irradiance
    }

    pub fn wind_speed(&self) -> &[f64] {
        &self.wind_speed
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn observed_renewable(&self) -> Option<&[f64]> {
        self.observed_renewable.as_deref()
    }
}

/// Raw battery settings as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec {
    pub capacity: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub p_ch_max: f64,
    pub p_dis_max: f64,
    pub eta_ch: f64,
    pub eta_dis: f64,
    pub dt: f64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self {
            capacity: 1000.0,
            soc_min: 100.0,
            soc_max: 900.0,
            p_ch_max: 1000.0,
            p_dis_max: 100.0,
            eta_ch: 0.9,
            eta_dis: 0.9,
            dt: 1.0,
        }
    }
}

/// Physical battery limits, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BatteryParams {
    spec: BatterySpec,
}

impl BatteryParams {
    pub fn new(spec: BatterySpec) -> Result<Self> {
        let s = &spec;
        let all_finite = [
            s.capacity,
            s.soc_min,
            s.soc_max,
            s.p_ch_max,
            s.p_dis_max,
            s.eta_ch,
            s.eta_dis,
            s.dt,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter(
                "battery parameters must be finite".into(),
            ));
        }
        if !(0.0 <= s.soc_min && s.soc_min < s.soc_max && s.soc_max <= s.capacity) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= soc_min < soc_max <= capacity, got {} / {} / {}",
                s.soc_min, s.soc_max, s.capacity
            )));
        }
        if !(s.p_ch_max > 0.0 && s.p_dis_max > 0.0 && s.dt > 0.0) {
            return Err(Error::InvalidParameter(
                "p_ch_max, p_dis_max and dt must be positive".into(),
            ));
        }
        for (name, eta) in [("eta_ch", s.eta_ch), ("eta_dis", s.eta_dis)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1], got {eta}"
                )));
            }
        }
        Ok(Self { spec })
    }

    pub fn spec(&self) -> BatterySpec {
        self.spec
    }

    pub fn capacity(&self) -> f64 {
        self.spec.capacity
    }

    pub fn soc_min(&self) -> f64 {
        self.spec.soc_min
    }

    pub fn soc_max(&self) -> f64 {
        self.spec.soc_max
    }

    pub fn p_ch_max(&self) -> f64 {
        self.spec.p_ch_max
    }

    pub fn p_dis_max(&self) -> f64 {
        self.spec.p_dis_max
    }

    pub fn eta_ch(&self) -> f64 {
        self.spec.eta_ch
    }

    pub fn eta_dis(&self) -> f64 {
        self.spec.eta_dis
    }

    pub fn dt(&self) -> f64 {
        self.spec.dt
    }
}

/// Stored energy in kWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryState {
    pub soc: f64,
}

impl BatteryState {
    /// A state that respects the applied-transition bounds.
    pub fn new(params: &BatteryParams, soc: f64) -> Result<Self> {
        if !(soc >= params.soc_min() && soc <= params.soc_max()) {
            return Err(Error::InvalidParameter(format!(
                "soc {soc} outside [{}, {}]",
                params.soc_min(),
                params.soc_max()
            )));
        }
        Ok(Self { soc })
    }
}

/// One hour of battery set-points. At most one of the two powers is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ControlAction {
    p_ch: f64,
    p_dis: f64,
}

impl ControlAction {
    pub fn new(p_ch: f64, p_dis: f64) -> Result<Self> {
        if !(p_ch >= 0.0 && p_dis >= 0.0) || !p_ch.is_finite() || !p_dis.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "action powers must be nonnegative, got ({p_ch}, {p_dis})"
            )));
        }
        if p_ch > 0.0 && p_dis > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "simultaneous charge {p_ch} and discharge {p_dis}"
            )));
        }
        Ok(Self { p_ch, p_dis })
    }

    pub const fn idle() -> Self {
        Self {
            p_ch: 0.0,
            p_dis: 0.0,
        }
    }

    /// Charge at `p` kW (negative inputs are floored at zero).
    pub fn charge(p: f64) -> Self {
        Self {
            p_ch: p.max(0.0),
            p_dis: 0.0,
        }
    }

    /// Discharge at `p` kW (negative inputs are floored at zero).
    pub fn discharge(p: f64) -> Self {
        Self {
            p_ch: 0.0,
            p_dis: p.max(0.0),
        }
    }

    /// Net battery power: positive discharges, negative charges.
    pub fn from_net(net: f64) -> Self {
        if net >= 0.0 {
            Self::discharge(net)
        } else {
            Self::charge(-net)
        }
    }

    pub fn p_ch(&self) -> f64 {
        self.p_ch
    }

    pub fn p_dis(&self) -> f64 {
        self.p_dis
    }

    /// Net power delivered to the bus (`p_dis - p_ch`).
    pub fn net(&self) -> f64 {
        self.p_dis - self.p_ch
    }

    pub fn is_idle(&self) -> bool {
        self.p_ch == 0.0 && self.p_dis == 0.0
    }

    /// True when both rates respect the battery's limits.
    pub fn within_limits(&self, params: &BatteryParams) -> bool {
        self.p_ch <= params.p_ch_max() && self.p_dis <= params.p_dis_max()
    }
}

/// Unit prices and penalty weights (currency per kWh).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostParams {
    c_bat: f64,
    c_backup: f64,
    q_under: f64,
    r_over: f64,
    terminal_soc_value: f64,
}

impl CostParams {
    pub fn new(c_bat: f64, c_backup: f64, q_under: f64, r_over: f64) -> Result<Self> {
        let vals = [c_bat, c_backup, q_under, r_over];
        if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "cost coefficients must be finite and nonnegative".into(),
            ));
        }
        if !(q_under > c_backup && r_over > c_backup) {
            return Err(Error::InvalidParameter(format!(
                "penalties ({q_under}, {r_over}) must exceed c_backup {c_backup}"
            )));
        }
        Ok(Self {
            c_bat,
            c_backup,
            q_under,
            r_over,
            terminal_soc_value: 0.0,
        })
    }

    /// Prices each kWh by which a plan ends below its starting SOC.
    pub fn with_terminal_soc_value(mut self, value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(
                "terminal_soc_value must be finite and nonnegative".into(),
            ));
        }
        self.terminal_soc_value = value;
        Ok(self)
    }

    pub fn c_bat(&self) -> f64 {
        self.c_bat
    }

    pub fn c_backup(&self) -> f64 {
        self.c_backup
    }

    pub fn q_under(&self) -> f64 {
        self.q_under
    }

    pub fn r_over(&self) -> f64 {
        self.r_over
    }

    pub fn terminal_soc_value(&self) -> f64 {
        self.terminal_soc_value
    }
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            c_bat: 0.05,
            c_backup: 0.30,
            q_under: 10.0,
            r_over: 10.0,
            terminal_soc_value: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: usize, v: f64) -> Vec<f64> {
        vec![v; n]
    }

    #[test]
    fn valid_scenario_passes() {
        let s = Scenario::new(0, 24, series(24, 0.5), series(24, 8.0), series(24, 200.0)).unwrap();
        assert_eq!(s.steps(), 24);
    }

    #[test]
    fn short_load_series_is_length_mismatch() {
        let err =
            Scenario::new(0, 24, series(24, 0.5), series(24, 8.0), series(23, 200.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::LengthMismatch {
                expected: 24,
                found: 23,
                ..
            }
        ));
    }

    #[test]
    fn negative_wind_is_rejected() {
        let mut wind = series(24, 8.0);
        wind[5] = -1.0;
        let err = Scenario::new(0, 24, series(24, 0.5), wind, series(24, 200.0)).unwrap_err();
        match err {
            Error::NegativeValue { series, index, .. } => {
                assert_eq!(series, "wind_speed");
                assert_eq!(index, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_is_rejected() {
        let mut irr = series(3, 0.5);
        irr[1] = f64::NAN;
        assert!(Scenario::new(0, 3, irr, series(3, 8.0), series(3, 1.0)).is_err());
    }

    #[test]
    fn battery_bounds_are_checked() {
        let mut spec = BatterySpec::default();
        assert!(BatteryParams::new(spec).is_ok());
        spec.soc_min = 900.0;
        assert!(BatteryParams::new(spec).is_err());
        let mut spec = BatterySpec::default();
        spec.eta_ch = 1.2;
        assert!(BatteryParams::new(spec).is_err());
        let mut spec = BatterySpec::default();
        spec.dt = 0.0;
        assert!(BatteryParams::new(spec).is_err());
    }

    #[test]
    fn actions_are_mutually_exclusive() {
        assert!(ControlAction::new(10.0, 5.0).is_err());
        assert!(ControlAction::new(-1.0, 0.0).is_err());
        let a = ControlAction::new(0.0, 40.0).unwrap();
        assert_eq!(a.net(), 40.0);
        assert_eq!(ControlAction::from_net(-30.0), ControlAction::charge(30.0));
    }

    #[test]
    fn penalties_must_dominate_backup() {
        assert!(CostParams::new(0.05, 0.3, 0.3, 10.0).is_err());
        assert!(CostParams::new(0.05, 0.3, 10.0, 10.0).is_ok());
        assert!(CostParams::new(-0.05, 0.3, 10.0, 10.0).is_err());
    }
}

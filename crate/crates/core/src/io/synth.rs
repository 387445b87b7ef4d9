//! Deterministic synthetic hourly scenarios.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::Scenario;

/// Shape of a synthetic day. Hours are local clock hours in `[0, 24)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticProfile {
    /// Midday irradiance peak, kWh/m².
    pub irradiance_peak: f64,
    pub sunrise: f64,
    pub sunset: f64,
    /// Mean wind speed, m/s.
    pub wind_speed: f64,
    /// Half-width of uniform wind jitter, m/s; zero disables it.
    pub wind_jitter: f64,
    /// Base load, kW.
    pub load_base: f64,
    /// Height of the half-sine load bump, kW.
    pub load_bump: f64,
    pub bump_start: f64,
    pub bump_end: f64,
}

impl Default for SyntheticProfile {
    fn default() -> Self {
        Self {
            irradiance_peak: 1.0,
            sunrise: 6.0,
            sunset: 18.0,
            wind_speed: 8.0,
            wind_jitter: 0.0,
            load_base: 180.0,
            load_bump: 180.0,
            bump_start: 9.0,
            bump_end: 15.0,
        }
    }
}

impl SyntheticProfile {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.irradiance_peak,
            self.wind_speed,
            self.wind_jitter,
            self.load_base,
            self.load_bump,
        ];
        if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "synthetic profile magnitudes must be finite and nonnegative".into(),
            ));
        }
        if !(self.sunrise < self.sunset && self.bump_start < self.bump_end) {
            return Err(Error::InvalidParameter(
                "synthetic profile windows must have start < end".into(),
            ));
        }
        Ok(())
    }
}

fn half_sine(h: f64, start: f64, end: f64) -> f64 {
    if h <= start || h >= end {
        0.0
    } else {
        (PI * (h - start) / (end - start)).sin()
    }
}

/// `days * 24` hourly samples: half-sine irradiance, constant wind (optionally
/// jittered), and a base load with a half-sine bump.
pub fn generate_synthetic(days: usize, profile: &SyntheticProfile, seed: u64) -> Result<Scenario> {
    if days < 1 {
        return Err(Error::InvalidParameter("days must be at least 1".into()));
    }
    profile.validate()?;
    let steps = days * 24;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut irradiance = Vec::with_capacity(steps);
    let mut wind = Vec::with_capacity(steps);
    let mut load = Vec::with_capacity(steps);
    for t in 0..steps {
        let h = (t % 24) as f64;
        irradiance.push(profile.irradiance_peak * half_sine(h, profile.sunrise, profile.sunset));
        let jitter = if profile.wind_jitter > 0.0 {
            rng.gen_range(-profile.wind_jitter..=profile.wind_jitter)
        } else {
            0.0
        };
        wind.push((profile.wind_speed + jitter).max(0.0));
        load.push(
            profile.load_base
                + profile.load_bump * half_sine(h, profile.bump_start, profile.bump_end),
        );
    }
    Scenario::new(0, steps, irradiance, wind, load)
}

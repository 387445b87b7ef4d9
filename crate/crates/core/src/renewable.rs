//! Lumped linear renewable-output surrogate:
//! `P = a1*irr + a2*v + a3*v^3 + a4`, clamped to `[0, p_rated]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative singular-value threshold below which the design is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenewableModel {
    /// kW per kWh/m²
    pub a1: f64,
    /// kW per m/s
    pub a2: f64,
    /// kW per (m/s)³
    pub a3: f64,
    /// intercept, kW
    pub a4: f64,
    /// clamp ceiling, kW
    pub p_rated: f64,
}

impl Default for RenewableModel {
    /// Reference-site coefficients.
    fn default() -> Self {
        Self {
            a1: 15.0,
            a2: 51.7979,
            a3: -0.047,
            a4: -166.3272,
            p_rated: 600.0,
        }
    }
}

/// One training observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub irradiance: f64,
    pub wind_speed: f64,
    pub power: f64,
}

impl RenewableModel {
    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64, p_rated: f64) -> Result<Self> {
        if !(p_rated > 0.0 && p_rated.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "p_rated must be positive, got {p_rated}"
            )));
        }
        if ![a1, a2, a3, a4].iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter(
                "renewable coefficients must be finite".into(),
            ));
        }
        Ok(Self {
            a1,
            a2,
            a3,
            a4,
            p_rated,
        })
    }

    /// Unclamped polynomial value.
    pub fn raw(&self, irr: f64, v: f64) -> f64 {
        self.a1 * irr + self.a2 * v + self.a3 * v * v * v + self.a4
    }

    /// Available renewable power in kW, always within `[0, p_rated]`.
    pub fn predict(&self, irr: f64, v: f64) -> f64 {
        self.raw(irr, v).clamp(0.0, self.p_rated)
    }

    /// Grid of predictions; element `[i][j]` is `predict(irr_grid[i], v_grid[j])`.
    pub fn surface(&self, irr_grid: &[f64], v_grid: &[f64]) -> Vec<Vec<f64>> {
        irr_grid
            .iter()
            .map(|&irr| v_grid.iter().map(|&v| self.predict(irr, v)).collect())
            .collect()
    }

    /// Ordinary least squares on the features `[irr, v, v^3, 1]`.
    ///
    /// The clamp ceiling is not estimated; `p_rated` is carried through.
    pub fn fit(samples: &[Sample], p_rated: f64) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::TooFewSamples {
                needed: 4,
                found: samples.len(),
            });
        }
        let n = samples.len();
        let mut design = DMatrix::<f64>::zeros(n, 4);
        let mut target = DVector::<f64>::zeros(n);
        for (row, s) in samples.iter().enumerate() {
            let feats = design_row(s.irradiance, s.wind_speed);
            for (col, f) in feats.iter().enumerate() {
                design[(row, col)] = *f;
            }
            target[row] = s.power;
        }

        // Column equilibration keeps the v^3 column from swamping the rank test.
        let mut scale = [1.0; 4];
        for (col, sc) in scale.iter_mut().enumerate() {
            let norm = design.column(col).norm();
            if norm == 0.0 {
                return Err(Error::RankDeficient);
            }
            *sc = norm;
            design.column_mut(col).scale_mut(1.0 / norm);
        }

        let svd = design.svd(true, true);
        let sv = &svd.singular_values;
        let smax = sv.max();
        if sv.iter().any(|s| *s <= RANK_TOL * smax) {
            return Err(Error::RankDeficient);
        }
        let coef = svd.solve(&target, 0.0).map_err(|_| Error::RankDeficient)?;
        Self::new(
            coef[0] / scale[0],
            coef[1] / scale[1],
            coef[2] / scale[2],
            coef[3] / scale[3],
            p_rated,
        )
    }
}

/// Regression features for one observation.
pub fn design_row(irr: f64, v: f64) -> [f64; 4] {
    [irr, v, v * v * v, 1.0]
}

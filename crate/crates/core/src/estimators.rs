//! Fidelity estimates from the cumulative retained probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the gate-count correction `α(γ², M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorParams {
    pub z: f64,
    pub eta: f64,
    pub delta: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl EstimatorParams {
    /// Fitted constants; the default.
    pub const FITTED: Self = Self {
        z: 0.104,
        eta: 9.069,
        delta: 3.807,
        alpha_min: 0.01,
        alpha_max: 1.0,
    };

    /// Older baseline `(z, η)` with the fitted `δ`.
    pub const BASELINE: Self = Self {
        z: 0.82,
        eta: 3.72,
        delta: 3.807,
        alpha_min: 0.01,
        alpha_max: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.z > 0.0 && self.eta > 0.0 && self.delta > 0.0) {
            return Err(Error::InvalidParams("z, eta and delta must be positive".into()));
        }
        if !(0.0 <= self.alpha_min && self.alpha_min <= self.alpha_max && self.alpha_max <= 1.0) {
            return Err(Error::InvalidParams("alpha clip range must satisfy 0 <= min <= max <= 1".into()));
        }
        Ok(())
    }
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self::FITTED
    }
}

/// `R = α γ²` with `α = clip(min(α_A, α_B), α_min, α_max)`; zero when `γ² <= 0`.
pub fn calibrated_r(gamma2_tot: f64, gate_count: usize, params: &EstimatorParams) -> f64 {
    if !(gamma2_tot > 0.0) {
        return 0.0;
    }
    let g = gamma2_tot.min(1.0);
    let m = gate_count.max(1) as f64;
    let alpha_a = 1.0 - params.z * ((1.0 - g) / (g * params.eta * m)).sqrt();
    let alpha_b = 1.0 - g / m.powf(params.delta);
    let alpha = alpha_a.min(alpha_b).clamp(params.alpha_min, params.alpha_max);
    alpha * g
}

/// `true` when `R` overshoots `F` by more than `1e-6` absolute and `1e-3` relative.
pub fn violation_check(fidelity: f64, r: f64) -> bool {
    let excess = r - fidelity;
    excess > 1e-6 && excess / fidelity.max(1e-300) > 1e-3
}

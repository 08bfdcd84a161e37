//! Sensitivities of the stratified estimators and the Gaussian mechanism.
//!
//! Sensitivities depend on the public design only (weights, stratum and
//! sample sizes), never on counts, so they can be published for free.

use rand::Rng;
use serde::Serialize;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::random::gaussian;

/// Sensitivities under substitution of one record within a stratum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    /// Sensitivity of the stratified proportion: `max_h w_h / n_h`.
    pub delta_p: f64,
    /// Sensitivity of its variance estimate: `max_h (C_h / n_h)(1 - 1/n_h)`.
    pub delta_v: f64,
    /// `C_h = w_h^2 ((N_h - n_h) / N_h) / (n_h - 1)`
    pub c_h: Vec<f64>,
}

pub fn sensitivities(design: &Design) -> SensitivityReport {
    let mut delta_p = 0.0_f64;
    let mut delta_v = 0.0_f64;
    let mut c_h = Vec::with_capacity(design.len());
    for s in design.strata() {
        let n = s.sample_size() as f64;
        let w = s.weight();
        let c = w * w * s.fpc() / (n - 1.0);
        delta_p = delta_p.max(w / n);
        delta_v = delta_v.max(c / n * (1.0 - 1.0 / n));
        c_h.push(c);
    }
    SensitivityReport {
        delta_p,
        delta_v,
        c_h,
    }
}

/// Noise variance that makes a sensitivity-`sensitivity` release
/// `rho`-zCDP: `sensitivity^2 / (2 rho)`.
pub fn noise_variance(sensitivity: f64, rho: f64) -> Result<f64> {
    if !(sensitivity > 0.0) || !sensitivity.is_finite() {
        return Err(Error::arg(format!(
            "sensitivity must be positive and finite, got {sensitivity}"
        )));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidBudget(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    Ok(sensitivity * sensitivity / (2.0 * rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyRelease {
    pub value: f64,
    pub noise_variance: f64,
}

/// Release `true_value + N(0, sensitivity^2 / (2 rho))`.
pub fn gaussian_mechanism<R: Rng + ?Sized>(
    rng: &mut R,
    true_value: f64,
    sensitivity: f64,
    rho: f64,
) -> Result<NoisyRelease> {
    let noise_variance = noise_variance(sensitivity, rho)?;
    let value = gaussian(rng, true_value, noise_variance)?;
    Ok(NoisyRelease {
        value,
        noise_variance,
    })
}

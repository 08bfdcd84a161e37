//! Non-private design-based estimation for stratified simple random sampling.
//!
//! Two variance forms appear and are kept apart on purpose:
//! [`stratum_variance_estimate`] is the unbiased sample estimator with
//! correction `(N_h - n_h) / N_h` and denominator `n_h - 1`, while
//! [`stratum_design_variance`] is the exact sampling variance with correction
//! `(N_h - n_h) / (N_h - 1)` and denominator `n_h`.

use serde::Serialize;

use crate::ci::{AlgorithmTag, CiResult, ClipFlags};
use crate::design::{Design, StratumCounts, StratumDesign};
use crate::error::{Error, Result};
use crate::quantile::two_sided_critical_value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonPrivateEstimate {
    pub p_hat: f64,
    pub p_hat_h: Vec<f64>,
    pub var_hat: f64,
    pub var_hat_h: Vec<f64>,
}

/// Stratum proportions `c_h / n_h` and their weighted sum.
pub fn sample_proportions(design: &Design, counts: &StratumCounts) -> Result<(f64, Vec<f64>)> {
    counts.validate(design)?;
    let p_hat_h: Vec<f64> = design
        .strata()
        .iter()
        .zip(counts.counts())
        .map(|(s, &c)| c as f64 / s.sample_size() as f64)
        .collect();
    let p_hat = weighted_sum(design, &p_hat_h);
    Ok((p_hat, p_hat_h))
}

/// `sum_h w_h x_h`
pub fn weighted_sum(design: &Design, values: &[f64]) -> f64 {
    design
        .strata()
        .iter()
        .zip(values)
        .map(|(s, x)| s.weight() * x)
        .sum()
}

/// `sum_h w_h^2 x_h`
pub fn weighted_variance_sum(design: &Design, values: &[f64]) -> f64 {
    design
        .strata()
        .iter()
        .zip(values)
        .map(|(s, x)| s.weight() * s.weight() * x)
        .sum()
}

/// Unbiased estimator of `Var(p_hat_h)`:
/// `((N_h - n_h) / N_h) * p_hat_h (1 - p_hat_h) / (n_h - 1)`.
pub fn stratum_variance_estimate(stratum: &StratumDesign, p_hat_h: f64) -> f64 {
    stratum.fpc() * p_hat_h * (1.0 - p_hat_h) / (stratum.sample_size() - 1) as f64
}

/// Exact sampling variance of `p_hat_h` for true stratum proportion `p_h`:
/// `((N_h - n_h) / (N_h - 1)) * p_h (1 - p_h) / n_h`.
pub fn stratum_design_variance(stratum: &StratumDesign, p_h: f64) -> f64 {
    let n_pop = stratum.population_size();
    let n = stratum.sample_size();
    if n_pop == 1 {
        return 0.0;
    }
    (n_pop - n) as f64 / (n_pop - 1) as f64 * p_h * (1.0 - p_h) / n as f64
}

/// Exact `Var(p_hat) = sum_h w_h^2 Var(p_hat_h)` for true proportions `p_h`.
pub fn design_variance(design: &Design, p_h: &[f64]) -> f64 {
    let per: Vec<f64> = design
        .strata()
        .iter()
        .zip(p_h)
        .map(|(s, &p)| stratum_design_variance(s, p))
        .collect();
    weighted_variance_sum(design, &per)
}

/// Point and variance estimates for the stratified sample proportion.
pub fn estimate(design: &Design, counts: &StratumCounts) -> Result<NonPrivateEstimate> {
    let (p_hat, p_hat_h) = sample_proportions(design, counts)?;
    let var_hat_h: Vec<f64> = design
        .strata()
        .iter()
        .zip(&p_hat_h)
        .map(|(s, &p)| stratum_variance_estimate(s, p))
        .collect();
    let var_hat = weighted_variance_sum(design, &var_hat_h);
    Ok(NonPrivateEstimate {
        p_hat,
        p_hat_h,
        var_hat,
        var_hat_h,
    })
}

/// `estimate +/- z_{1 - alpha/2} sqrt(variance)`.
pub fn wald_interval(estimate: f64, variance: f64, alpha: f64) -> Result<CiResult> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::arg(format!(
            "variance must be nonnegative and finite, got {variance}"
        )));
    }
    if !estimate.is_finite() {
        return Err(Error::arg(format!("estimate must be finite, got {estimate}")));
    }
    let z = two_sided_critical_value(alpha)?;
    let half = z * variance.sqrt();
    Ok(CiResult {
        point_estimate: estimate,
        variance_estimate: variance,
        lower: estimate - half,
        upper: estimate + half,
        alpha,
        algorithm: AlgorithmTag::NonPrivate,
        budget_spent: None,
        per_dataset_budgets: Vec::new(),
        clipped: ClipFlags::default(),
        noise: Vec::new(),
    })
}

/// The standard non-private stratified Wald interval.
pub fn non_private_ci(design: &Design, counts: &StratumCounts, alpha: f64) -> Result<CiResult> {
    let est = estimate(design, counts)?;
    wald_interval(est.p_hat, est.var_hat, alpha)
}

/// Wald interval that plugs `p_hat_h` into the exact design variance instead
/// of the unbiased estimator. This is the form the private-size algorithm
/// converges to when its noise vanishes.
pub fn plug_in_design_variance_ci(
    design: &Design,
    counts: &StratumCounts,
    alpha: f64,
) -> Result<CiResult> {
    let (p_hat, p_hat_h) = sample_proportions(design, counts)?;
    wald_interval(p_hat, design_variance(design, &p_hat_h), alpha)
}

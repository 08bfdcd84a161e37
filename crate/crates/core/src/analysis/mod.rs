//! Closed-form comparisons between the private algorithms and the
//! non-private interval.
//!
//! The extrinsic variance `V_ex = Var(p~) - Var(p_hat)` is the variance the
//! privacy noise adds. Width ratios compare interval widths through
//! `sqrt(Var(p~) / Var(p_hat))` for a single stratum.

pub mod quadrature;
pub mod reciprocal;

use serde::Serialize;

pub use reciprocal::{
    alg3_k2_approximation, odd_double_factorial, ratio_bias, ratio_moment_expansion,
    reciprocal_moments_by_quadrature, reciprocal_normal_moments, truncated_even_moment,
    untruncated_even_moment, RatioApproximation, ReciprocalMoments,
};

use crate::budget::PrivacyBudget;
use crate::ci::AlgorithmTag;
use crate::design::Design;
use crate::error::{Error, Result};

/// Rule-of-thumb bound on the coefficient of variation of a noisy
/// denominator below which a ratio of normals is close to normal.
pub const CV_RULE_OF_THUMB: f64 = 0.1;

/// `u_h = N_h / n_h`
pub fn sampling_weights(design: &Design) -> Vec<f64> {
    design.strata().iter().map(|s| s.sampling_weight()).collect()
}

/// Variance added to the stratified proportion by each algorithm's noise.
///
/// `p_h` is only consulted for [`AlgorithmTag::StrNzPrivSz`], whose extra
/// variance depends on the stratum proportions.
pub fn extrinsic_variance(
    design: &Design,
    algorithm: AlgorithmTag,
    budget: &PrivacyBudget,
    p_h: Option<&[f64]>,
) -> Result<f64> {
    let w_over_n_sq = design.strata().iter().map(|s| {
        let r = s.weight() / s.sample_size() as f64;
        r * r
    });
    match algorithm {
        AlgorithmTag::NonPrivate => Ok(0.0),
        AlgorithmTag::StrNzPubSz => Ok(w_over_n_sq.sum::<f64>() / (2.0 * budget.rho())),
        AlgorithmTag::PopNzPubSz => {
            budget.require_split()?;
            Ok(w_over_n_sq.fold(0.0, f64::max) / (2.0 * budget.rho1()))
        }
        AlgorithmTag::StrNzPrivSz => {
            budget.require_split()?;
            let p_h = p_h.ok_or_else(|| {
                Error::arg("stratum proportions are required for the private-size algorithm")
            })?;
            if p_h.len() != design.len() {
                return Err(Error::arg(format!(
                    "{} stratum proportions for {} strata",
                    p_h.len(),
                    design.len()
                )));
            }
            let (count_part, size_part) =
                w_over_n_sq
                    .zip(p_h)
                    .fold((0.0, 0.0), |(a, b), (r, &p)| (a + r, b + r * p * p));
            Ok(count_part / (2.0 * budget.rho1()) + size_part / (2.0 * budget.rho2()))
        }
        AlgorithmTag::Difference => Err(Error::arg(
            "extrinsic variance is defined per population, not for differences",
        )),
    }
}

fn check_weights(u: &[f64]) -> Result<()> {
    if u.is_empty() {
        return Err(Error::arg("sampling weights are empty"));
    }
    if u.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::arg("sampling weights must be positive and finite"));
    }
    Ok(())
}

/// `V_ex(stratum-level) / V_ex(population-level)` at an even split:
/// `sum u_h^2 / (2 max u_h^2)`.
pub fn budget_ratio_str_vs_pop(u: &[f64]) -> Result<f64> {
    check_weights(u)?;
    let sum: f64 = u.iter().map(|x| x * x).sum();
    let max = u.iter().map(|x| x * x).fold(0.0, f64::max);
    Ok(sum / (2.0 * max))
}

/// `V_ex(private sizes) / V_ex(public sizes)` for stratum-level noise at an
/// even split: `2 sum u_h^2 (1 + p_h^2) / sum u_h^2`. Lies in `[2, 4]`.
pub fn budget_ratio_priv_vs_pub(u: &[f64], p_h: &[f64]) -> Result<f64> {
    check_weights(u)?;
    if p_h.len() != u.len() {
        return Err(Error::arg(format!(
            "{} proportions for {} sampling weights",
            p_h.len(),
            u.len()
        )));
    }
    let sum: f64 = u.iter().map(|x| x * x).sum();
    let weighted: f64 = u.iter().zip(p_h).map(|(x, p)| x * x * (1.0 + p * p)).sum();
    Ok(2.0 * weighted / sum)
}

/// Noise variance terms of each algorithm for one stratum, as multiples of
/// `1 / n`. Returns `(a, b)` such that the extra variance of `p~` is
/// `(a + b p^2) / n^2`.
fn noise_coefficients(budget: &PrivacyBudget, algorithm: AlgorithmTag) -> Result<(f64, f64)> {
    match algorithm {
        AlgorithmTag::StrNzPubSz => Ok((1.0 / (2.0 * budget.rho()), 0.0)),
        AlgorithmTag::PopNzPubSz => {
            budget.require_split()?;
            Ok((1.0 / (2.0 * budget.rho1()), 0.0))
        }
        AlgorithmTag::StrNzPrivSz => {
            budget.require_split()?;
            Ok((1.0 / (2.0 * budget.rho1()), 1.0 / (2.0 * budget.rho2())))
        }
        AlgorithmTag::NonPrivate => Ok((0.0, 0.0)),
        AlgorithmTag::Difference => Err(Error::arg("no width ratio for difference intervals")),
    }
}

/// Single-stratum theoretical width ratio `sqrt(Var(p~) / Var(p_hat))`:
/// `sqrt(1 + ((N-1)/(N-n)) (a + b p^2) / (p (1-p) n))` with the algorithm's
/// noise coefficients `a`, `b` (see [`noise_coefficients`]).
pub fn theoretical_width_ratio(
    population: u64,
    sample: u64,
    p: f64,
    budget: &PrivacyBudget,
    algorithm: AlgorithmTag,
) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::arg(format!("p must lie strictly inside (0, 1), got {p}")));
    }
    if sample < 2 || sample >= population {
        return Err(Error::arg(format!(
            "need 2 <= n < N for a width ratio, got n={sample}, N={population}"
        )));
    }
    let (a, b) = noise_coefficients(budget, algorithm)?;
    let fpc_inv = (population - 1) as f64 / (population - sample) as f64;
    let n = sample as f64;
    Ok((1.0 + fpc_inv * (a + b * p * p) / (p * (1.0 - p) * n)).sqrt())
}

/// Lower bound of [`theoretical_width_ratio`] over `p` and `N`: drop the
/// factor `(N-1)/(N-n) > 1` and minimise `(a + b p^2) / (p (1-p))`.
///
/// At an even split and `n rho = 1` this gives `sqrt(3)`, `sqrt(5)` and
/// `sqrt(3 + 2 sqrt(2))`.
pub fn twr_lower_bound(sample: u64, budget: &PrivacyBudget, algorithm: AlgorithmTag) -> Result<f64> {
    if sample < 2 {
        return Err(Error::arg(format!("need n >= 2, got {sample}")));
    }
    let (a, b) = noise_coefficients(budget, algorithm)?;
    let min = if b == 0.0 {
        4.0 * a
    } else {
        // stationary point of (a + b p^2) / (p - p^2)
        let p = (-a + (a * a + a * b).sqrt()) / b;
        (a + b * p * p) / (p * (1.0 - p))
    };
    Ok((1.0 + min / sample as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthRatioEntry {
    pub algorithm: AlgorithmTag,
    pub extrinsic_variance: f64,
    pub twr: f64,
    pub twr_lower_bound: f64,
}

/// Width-ratio summary for a single-stratum design at true proportion `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthRatioReport {
    pub sampling_weights: Vec<f64>,
    pub entries: Vec<WidthRatioEntry>,
}

pub fn width_ratio_report(design: &Design, p: f64, budget: &PrivacyBudget) -> Result<WidthRatioReport> {
    if design.len() != 1 {
        return Err(Error::arg("width ratios are defined for single-stratum designs"));
    }
    let s = design.strata()[0];
    let entries = AlgorithmTag::PRIVATE
        .iter()
        .map(|&alg| {
            Ok(WidthRatioEntry {
                algorithm: alg,
                extrinsic_variance: extrinsic_variance(design, alg, budget, Some(&[p]))?,
                twr: theoretical_width_ratio(s.population_size(), s.sample_size(), p, budget, alg)?,
                twr_lower_bound: twr_lower_bound(s.sample_size(), budget, alg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WidthRatioReport {
        sampling_weights: sampling_weights(design),
        entries,
    })
}

/// Coefficient of variation `sqrt(1/(2 rho2)) / n_h` of each stratum's noisy
/// sample size in the private-size algorithm.
pub fn noisy_size_cv(design: &Design, budget: &PrivacyBudget) -> Vec<f64> {
    let sd = (1.0 / (2.0 * budget.rho2())).sqrt();
    design
        .strata()
        .iter()
        .map(|s| sd / s.sample_size() as f64)
        .collect()
}

/// Human-readable warnings for strata whose noisy-size CV reaches
/// [`CV_RULE_OF_THUMB`]. Advisory only.
pub fn private_size_warnings(design: &Design, budget: &PrivacyBudget) -> Vec<String> {
    noisy_size_cv(design, budget)
        .into_iter()
        .enumerate()
        .filter(|(_, cv)| *cv >= CV_RULE_OF_THUMB)
        .map(|(h, cv)| {
            format!(
                "stratum {h}: noisy sample size has CV {cv:.3} >= {CV_RULE_OF_THUMB}; \
                 the normal approximation of the ratio estimator may be poor"
            )
        })
        .collect()
}

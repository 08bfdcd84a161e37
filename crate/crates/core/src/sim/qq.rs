use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::Experiment;
use crate::budget::PrivacyBudget;
use crate::ci::AlgorithmTag;
use crate::design::Design;
use crate::dp_ci::run_algorithm;
use crate::error::{Error, Result};
use crate::estimators::design_variance;
use crate::mechanisms::sensitivities;
use crate::quantile::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QqRow {
    pub q: f64,
    pub theoretical: f64,
    pub empirical: f64,
}

/// Approximate normal law `(mean, variance)` of the point estimate for true
/// stratum proportions `p_h`.
pub fn theoretical_distribution(
    design: &Design,
    p_h: &[f64],
    algorithm: AlgorithmTag,
    budget: &PrivacyBudget,
) -> Result<(f64, f64)> {
    if p_h.len() != design.len() {
        return Err(Error::arg("one true proportion per stratum is required"));
    }
    let p: f64 = design.strata().iter().zip(p_h).map(|(s, p)| s.weight() * p).sum();
    let base = design_variance(design, p_h);
    let n2w2 = design.strata().iter().map(|s| {
        let n = s.sample_size() as f64;
        (s.weight() * s.weight(), n * n)
    });
    match algorithm {
        AlgorithmTag::NonPrivate => Ok((p, base)),
        AlgorithmTag::StrNzPubSz => {
            let extra: f64 = n2w2.map(|(w2, n2)| w2 / n2).sum::<f64>() / (2.0 * budget.rho());
            Ok((p, base + extra))
        }
        AlgorithmTag::PopNzPubSz => {
            budget.require_split()?;
            let dp = sensitivities(design).delta_p;
            Ok((p, base + dp * dp / (2.0 * budget.rho1())))
        }
        AlgorithmTag::StrNzPrivSz => {
            budget.require_split()?;
            let (r1, r2) = (budget.rho1(), budget.rho2());
            let mut bias = 0.0;
            let mut extra = 0.0;
            for ((s, &ph), (w2, n2)) in design.strata().iter().zip(p_h).zip(n2w2) {
                bias += s.weight() * ph / (2.0 * r2 * n2);
                extra += w2 * (1.0 / (2.0 * r1 * n2) + ph * ph / (2.0 * r2 * n2));
            }
            Ok((p + bias, base + extra))
        }
        AlgorithmTag::Difference => Err(Error::arg("no single-population law for differences")),
    }
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Paired theoretical and empirical quantiles of the point estimate at
/// `q_i = i / (grid + 1)`, `i = 1..=grid`. Uses the first configured `rho`.
pub fn qq_data(config: &ExperimentConfig, grid: usize, algorithm: AlgorithmTag) -> Result<Vec<QqRow>> {
    if grid == 0 {
        return Err(Error::arg("grid must be at least 1"));
    }
    let exp = Experiment::new(config.clone())?;
    let rho = exp.rho_values()[0];
    let budget = PrivacyBudget::with_split(rho, config.split)?;
    let (mean, var) = theoretical_distribution(
        &exp.design,
        &exp.population.stratum_proportions,
        algorithm,
        &budget,
    )?;
    let opts = exp.options();
    let mut points = (0..config.repetitions)
        .into_par_iter()
        .map(|r| {
            let counts = exp.sample(0, r)?;
            let stream = exp.repetition_stream(0, r).substream(100);
            let (ci, _) = run_algorithm(algorithm, &stream, &exp.design, &counts, &budget, &opts)?;
            Ok(ci.point_estimate)
        })
        .collect::<Result<Vec<f64>>>()?;
    points.sort_by(f64::total_cmp);
    let sd = var.sqrt();
    (1..=grid)
        .map(|i| {
            let q = i as f64 / (grid + 1) as f64;
            Ok(QqRow {
                q,
                theoretical: mean + sd * normal_quantile(q)?,
                empirical: empirical_quantile(&points, q),
            })
        })
        .collect()
}

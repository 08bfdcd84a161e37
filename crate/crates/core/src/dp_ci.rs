//! Private confidence intervals for a stratified population proportion.
//!
//! | function            | noise added to                       | sample sizes |
//! |---------------------|--------------------------------------|--------------|
//! | [`str_nz_pub_sz`]   | each stratum proportion              | public       |
//! | [`pop_nz_pub_sz`]   | overall proportion and its variance  | public       |
//! | [`str_nz_priv_sz`]  | each stratum count and sample size   | private      |
//!
//! Every invocation draws from a single [`RandomStream`]; stratum-level
//! algorithms give stratum `h` the substream `h`, so results do not depend on
//! the order strata are visited in.

use serde::Serialize;

use crate::budget::PrivacyBudget;
use crate::ci::{AlgorithmTag, CiResult, ClipFlags, NoiseRecord};
use crate::design::{Design, StratumCounts};
use crate::error::{Error, Result};
use crate::estimators::{estimate, wald_interval, weighted_sum, weighted_variance_sum};
use crate::mechanisms::{gaussian_mechanism, sensitivities};
use crate::random::RandomStream;

/// Interval level and the optional `[0, 1]` post-processing steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpOptions {
    pub alpha: f64,
    /// Clip noisy proportions onto `[0, 1]` before they enter any variance
    /// formula.
    pub clip_proportions: bool,
    /// Clip the final interval (and its centre) onto `[0, 1]`.
    pub clip_interval: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            alpha: 0.1,
            clip_proportions: false,
            clip_interval: false,
        }
    }
}

/// Per-stratum output of the stratum-level algorithms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivateStratumRelease {
    pub stratum: usize,
    pub p_tilde: f64,
    pub v_tilde: f64,
    /// Noisy count (private-size algorithm only).
    pub c_tilde: Option<f64>,
    /// Noisy sample size after the floor at 2 (private-size algorithm only).
    pub n_tilde: Option<f64>,
    pub clipped: ClipFlags,
}

fn clip_unit(x: f64) -> (f64, bool) {
    let c = x.clamp(0.0, 1.0);
    (c, c != x)
}

fn floor_zero(x: f64) -> (f64, bool) {
    if x < 0.0 {
        (0.0, true)
    } else {
        (x, false)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    point: f64,
    variance: f64,
    opts: &DpOptions,
    algorithm: AlgorithmTag,
    budget: PrivacyBudget,
    mut clipped: ClipFlags,
    noise: Vec<NoiseRecord>,
) -> Result<CiResult> {
    let mut ci = wald_interval(point, variance, opts.alpha)?;
    if opts.clip_interval {
        let (lower, a) = clip_unit(ci.lower);
        let (upper, b) = clip_unit(ci.upper);
        let (centre, c) = clip_unit(ci.point_estimate);
        ci.lower = lower;
        ci.upper = upper;
        ci.point_estimate = centre;
        clipped.interval_clipped = a || b || c;
    }
    ci.algorithm = algorithm;
    ci.budget_spent = Some(budget);
    ci.clipped = clipped;
    ci.noise = noise;
    Ok(ci)
}

/// Stratum-level noise with public sample sizes.
///
/// Each stratum releases `p_hat_h + N(0, 1/(2 rho n_h^2))`; the whole of
/// `rho` is spent on every stratum because strata hold disjoint records.
/// The per-stratum variance estimate adds the noise variance back inside the
/// binomial term, which removes the downward bias of `p~(1 - p~)`.
pub fn str_nz_pub_sz(
    stream: &RandomStream,
    design: &Design,
    counts: &StratumCounts,
    budget: &PrivacyBudget,
    opts: &DpOptions,
) -> Result<(CiResult, Vec<PrivateStratumRelease>)> {
    let est = estimate(design, counts)?;
    let rho = budget.rho();
    let mut flags = ClipFlags::default();
    let mut noise = Vec::with_capacity(design.len());
    let mut releases = Vec::with_capacity(design.len());

    for (h, (s, &p_hat_h)) in design.strata().iter().zip(&est.p_hat_h).enumerate() {
        let mut rng = stream.substream(h as u64).rng();
        let n = s.sample_size() as f64;
        let sensitivity = 1.0 / n;
        let release = gaussian_mechanism(&mut rng, p_hat_h, sensitivity, rho)?;
        let noise_var = release.noise_variance;
        noise.push(NoiseRecord {
            statistic: "stratum_proportion",
            stratum: Some(h),
            sensitivity,
            rho,
            variance: noise_var,
        });

        let mut stratum_flags = ClipFlags::default();
        let mut p_tilde = release.value;
        if opts.clip_proportions {
            let (p, hit) = clip_unit(p_tilde);
            p_tilde = p;
            stratum_flags.proportion_clipped = hit;
        }
        let raw = s.fpc() * (p_tilde * (1.0 - p_tilde) + noise_var) / (n - 1.0) + noise_var;
        let (v_tilde, floored) = floor_zero(raw);
        stratum_flags.variance_floored = floored;
        flags.merge(&stratum_flags);

        releases.push(PrivateStratumRelease {
            stratum: h,
            p_tilde,
            v_tilde,
            c_tilde: None,
            n_tilde: None,
            clipped: stratum_flags,
        });
    }

    let p_tilde: Vec<f64> = releases.iter().map(|r| r.p_tilde).collect();
    let v_tilde: Vec<f64> = releases.iter().map(|r| r.v_tilde).collect();
    let ci = finish(
        weighted_sum(design, &p_tilde),
        weighted_variance_sum(design, &v_tilde),
        opts,
        AlgorithmTag::StrNzPubSz,
        *budget,
        flags,
        noise,
    )?;
    Ok((ci, releases))
}

/// Population-level noise with public sample sizes.
///
/// Spends `rho1` on `p_hat` (sensitivity `delta_p`) and `rho2` on its
/// variance estimate (sensitivity `delta_v`). The proportion's noise variance
/// is public and is added to the released variance estimate.
pub fn pop_nz_pub_sz(
    stream: &RandomStream,
    design: &Design,
    counts: &StratumCounts,
    budget: &PrivacyBudget,
    opts: &DpOptions,
) -> Result<CiResult> {
    budget.require_split()?;
    let est = estimate(design, counts)?;
    let sens = sensitivities(design);
    let mut rng = stream.rng();
    let mut flags = ClipFlags::default();

    let p_release = gaussian_mechanism(&mut rng, est.p_hat, sens.delta_p, budget.rho1())?;
    let mut noise = vec![NoiseRecord {
        statistic: "proportion",
        stratum: None,
        sensitivity: sens.delta_p,
        rho: budget.rho1(),
        variance: p_release.noise_variance,
    }];
    let mut p_tilde = p_release.value;
    if opts.clip_proportions {
        let (p, hit) = clip_unit(p_tilde);
        p_tilde = p;
        flags.proportion_clipped = hit;
    }

    // A design where every stratum is a census has a constant (zero) variance
    // estimate, which can be released exactly.
    let v_release = if sens.delta_v > 0.0 {
        let r = gaussian_mechanism(&mut rng, est.var_hat, sens.delta_v, budget.rho2())?;
        noise.push(NoiseRecord {
            statistic: "variance",
            stratum: None,
            sensitivity: sens.delta_v,
            rho: budget.rho2(),
            variance: r.noise_variance,
        });
        r.value
    } else {
        est.var_hat
    };
    let (v_tilde, floored) = floor_zero(v_release + p_release.noise_variance);
    flags.variance_floored = floored;

    finish(
        p_tilde,
        v_tilde,
        opts,
        AlgorithmTag::PopNzPubSz,
        *budget,
        flags,
        noise,
    )
}

/// Stratum-level noise with private sample sizes.
///
/// Each stratum releases a noisy count (`rho1`, sensitivity 1) and a noisy
/// sample size (`rho2`, sensitivity 1) floored at 2; the stratum proportion is
/// their ratio. The variance estimate uses the second-order expansion of the
/// reciprocal of the noisy size: the exact-design binomial term evaluated at
/// the noisy quantities plus one term per noise source.
pub fn str_nz_priv_sz(
    stream: &RandomStream,
    design: &Design,
    counts: &StratumCounts,
    budget: &PrivacyBudget,
    opts: &DpOptions,
) -> Result<(CiResult, Vec<PrivateStratumRelease>)> {
    budget.require_split()?;
    counts.validate(design)?;
    let (rho1, rho2) = (budget.rho1(), budget.rho2());
    let mut flags = ClipFlags::default();
    let mut noise = Vec::with_capacity(2 * design.len());
    let mut releases = Vec::with_capacity(design.len());

    for (h, (s, &c)) in design.strata().iter().zip(counts.counts()).enumerate() {
        let mut rng = stream.substream(h as u64).rng();
        let count = gaussian_mechanism(&mut rng, c as f64, 1.0, rho1)?;
        let size = gaussian_mechanism(&mut rng, s.sample_size() as f64, 1.0, rho2)?;
        noise.push(NoiseRecord {
            statistic: "stratum_count",
            stratum: Some(h),
            sensitivity: 1.0,
            rho: rho1,
            variance: count.noise_variance,
        });
        noise.push(NoiseRecord {
            statistic: "stratum_size",
            stratum: Some(h),
            sensitivity: 1.0,
            rho: rho2,
            variance: size.noise_variance,
        });

        let mut stratum_flags = ClipFlags::default();
        let c_tilde = count.value;
        let n_tilde = if size.value < 2.0 {
            stratum_flags.noisy_size_floored = true;
            2.0
        } else {
            size.value
        };
        let mut p_tilde = c_tilde / n_tilde;
        if opts.clip_proportions {
            let (p, hit) = clip_unit(p_tilde);
            p_tilde = p;
            stratum_flags.proportion_clipped = hit;
        }

        let n_pop = s.population_size() as f64;
        let (fpc, fpc_floored) = floor_zero((n_pop - n_tilde) / (n_pop - 1.0));
        stratum_flags.fpc_floored = fpc_floored;
        let n2 = n_tilde * n_tilde;
        let raw = fpc * p_tilde * (1.0 - p_tilde) / n_tilde
            + 1.0 / (2.0 * rho1 * n2)
            + p_tilde * p_tilde / (2.0 * rho2 * n2);
        let (v_tilde, floored) = floor_zero(raw);
        stratum_flags.variance_floored = floored;
        flags.merge(&stratum_flags);

        releases.push(PrivateStratumRelease {
            stratum: h,
            p_tilde,
            v_tilde,
            c_tilde: Some(c_tilde),
            n_tilde: Some(n_tilde),
            clipped: stratum_flags,
        });
    }

    let p_tilde: Vec<f64> = releases.iter().map(|r| r.p_tilde).collect();
    let v_tilde: Vec<f64> = releases.iter().map(|r| r.v_tilde).collect();
    let ci = finish(
        weighted_sum(design, &p_tilde),
        weighted_variance_sum(design, &v_tilde),
        opts,
        AlgorithmTag::StrNzPrivSz,
        *budget,
        flags,
        noise,
    )?;
    Ok((ci, releases))
}

/// Interval for `p_a - p_b` from two intervals on independent populations.
///
/// Only post-processing of the two inputs; each input keeps its own budget,
/// listed in `per_dataset_budgets`.
pub fn difference_ci(a: &CiResult, b: &CiResult, alpha: f64) -> Result<CiResult> {
    for (name, r) in [("first", a), ("second", b)] {
        if !(r.variance_estimate >= 0.0) || !r.variance_estimate.is_finite() {
            return Err(Error::arg(format!(
                "{name} input has no usable variance estimate ({})",
                r.variance_estimate
            )));
        }
    }
    let mut ci = wald_interval(
        a.point_estimate - b.point_estimate,
        a.variance_estimate + b.variance_estimate,
        alpha,
    )?;
    ci.algorithm = AlgorithmTag::Difference;
    ci.per_dataset_budgets = a.budget_spent.iter().chain(&b.budget_spent).copied().collect();
    ci.noise = a.noise.iter().chain(&b.noise).cloned().collect();
    Ok(ci)
}

/// Dispatch by tag. Non-private intervals ignore `stream` and `budget`.
pub fn run_algorithm(
    algorithm: AlgorithmTag,
    stream: &RandomStream,
    design: &Design,
    counts: &StratumCounts,
    budget: &PrivacyBudget,
    opts: &DpOptions,
) -> Result<(CiResult, Vec<PrivateStratumRelease>)> {
    match algorithm {
        AlgorithmTag::NonPrivate => {
            let mut ci = crate::estimators::non_private_ci(design, counts, opts.alpha)?;
            if opts.clip_interval {
                let lower = ci.lower.clamp(0.0, 1.0);
                let upper = ci.upper.clamp(0.0, 1.0);
                ci.clipped.interval_clipped = lower != ci.lower || upper != ci.upper;
                ci.lower = lower;
                ci.upper = upper;
            }
            Ok((ci, Vec::new()))
        }
        AlgorithmTag::StrNzPubSz => str_nz_pub_sz(stream, design, counts, budget, opts),
        AlgorithmTag::PopNzPubSz => {
            pop_nz_pub_sz(stream, design, counts, budget, opts).map(|ci| (ci, Vec::new()))
        }
        AlgorithmTag::StrNzPrivSz => str_nz_priv_sz(stream, design, counts, budget, opts),
        AlgorithmTag::Difference => Err(Error::arg(
            "the difference interval combines two results; use difference_ci",
        )),
    }
}

//! Interval results and their provenance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::PrivacyBudget;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmTag {
    #[serde(rename = "nonprivate")]
    NonPrivate,
    /// Noise on each stratum proportion, public sample sizes.
    #[serde(rename = "str-pub")]
    StrNzPubSz,
    /// Noise on the aggregate proportion and its variance estimate, public
    /// sample sizes.
    #[serde(rename = "pop-pub")]
    PopNzPubSz,
    /// Noise on each stratum count and sample size.
    #[serde(rename = "str-priv")]
    StrNzPrivSz,
    /// Difference of two independent interval estimates.
    #[serde(rename = "difference")]
    Difference,
}

impl AlgorithmTag {
    pub const PRIVATE: [AlgorithmTag; 3] = [
        AlgorithmTag::StrNzPubSz,
        AlgorithmTag::PopNzPubSz,
        AlgorithmTag::StrNzPrivSz,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmTag::NonPrivate => "nonprivate",
            AlgorithmTag::StrNzPubSz => "str-pub",
            AlgorithmTag::PopNzPubSz => "pop-pub",
            AlgorithmTag::StrNzPrivSz => "str-priv",
            AlgorithmTag::Difference => "difference",
        }
    }
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonprivate" => Ok(AlgorithmTag::NonPrivate),
            "str-pub" => Ok(AlgorithmTag::StrNzPubSz),
            "pop-pub" => Ok(AlgorithmTag::PopNzPubSz),
            "str-priv" => Ok(AlgorithmTag::StrNzPrivSz),
            "difference" => Ok(AlgorithmTag::Difference),
            other => Err(Error::arg(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Which post-processing or flooring steps actually changed a value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClipFlags {
    /// A noisy proportion was clipped onto `[0, 1]`.
    pub proportion_clipped: bool,
    /// The final interval was clipped onto `[0, 1]`.
    pub interval_clipped: bool,
    /// A negative variance estimate was floored at zero.
    pub variance_floored: bool,
    /// A noisy sample size was floored at 2.
    pub noisy_size_floored: bool,
    /// A finite-population factor went negative (noisy size above the stratum
    /// size) and was floored at zero.
    pub fpc_floored: bool,
}

impl ClipFlags {
    pub fn any(&self) -> bool {
        self.proportion_clipped
            || self.interval_clipped
            || self.variance_floored
            || self.noisy_size_floored
            || self.fpc_floored
    }

    pub(crate) fn merge(&mut self, other: &ClipFlags) {
        self.proportion_clipped |= other.proportion_clipped;
        self.interval_clipped |= other.interval_clipped;
        self.variance_floored |= other.variance_floored;
        self.noisy_size_floored |= other.noisy_size_floored;
        self.fpc_floored |= other.fpc_floored;
    }
}

/// One Gaussian-mechanism invocation: the statistic it protected, the
/// sensitivity and budget it was calibrated to, and the noise variance used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRecord {
    pub statistic: &'static str,
    /// Stratum index for stratum-level releases. Releases on different strata
    /// touch disjoint records and compose in parallel.
    pub stratum: Option<usize>,
    pub sensitivity: f64,
    pub rho: f64,
    pub variance: f64,
}

/// A confidence interval with its variance estimate and provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CiResult {
    pub point_estimate: f64,
    pub variance_estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub algorithm: AlgorithmTag,
    pub budget_spent: Option<PrivacyBudget>,
    /// Budgets of the independent inputs of a [`AlgorithmTag::Difference`]
    /// interval. The inputs cover disjoint datasets so they are reported side
    /// by side rather than summed.
    pub per_dataset_budgets: Vec<PrivacyBudget>,
    pub clipped: ClipFlags,
    pub noise: Vec<NoiseRecord>,
}

impl CiResult {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Total zCDP cost of a noise ledger: releases on the same statistic across
/// strata compose in parallel (max), distinct statistics compose sequentially
/// (sum).
pub fn ledger_rho(noise: &[NoiseRecord]) -> f64 {
    let mut per_statistic: Vec<(&str, f64)> = Vec::new();
    for rec in noise {
        match per_statistic.iter_mut().find(|(s, _)| *s == rec.statistic) {
            Some((_, rho)) => *rho = rho.max(rec.rho),
            None => per_statistic.push((rec.statistic, rec.rho)),
        }
    }
    per_statistic.iter().map(|(_, rho)| rho).sum()
}

//! Public design facts (stratum and sample sizes, weights) and observed
//! stratum counts.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `sum(w_h) == 1` for user-supplied weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// One stratum of a stratified simple random sampling design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StratumDesign {
    population_size: u64,
    sample_size: u64,
    weight: f64,
}

impl StratumDesign {
    fn new(population_size: u64, sample_size: u64, weight: f64) -> Result<Self> {
        if sample_size < 2 {
            return Err(Error::InvalidDesign(format!(
                "sample size must be at least 2, got {sample_size}"
            )));
        }
        if sample_size > population_size {
            return Err(Error::InvalidDesign(format!(
                "sample size {sample_size} exceeds stratum size {population_size}"
            )));
        }
        if !(weight.is_finite() && weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidDesign(format!(
                "stratum weight must lie in (0, 1], got {weight}"
            )));
        }
        Ok(StratumDesign {
            population_size,
            sample_size,
            weight,
        })
    }

    /// `N_h`
    pub fn population_size(&self) -> u64 {
        self.population_size
    }

    /// `n_h`
    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    /// `w_h = N_h / N`
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `(N_h - n_h) / N_h`, the correction used by the variance estimator.
    pub fn fpc(&self) -> f64 {
        (self.population_size - self.sample_size) as f64 / self.population_size as f64
    }

    /// `N_h / n_h`
    pub fn sampling_weight(&self) -> f64 {
        self.population_size as f64 / self.sample_size as f64
    }
}

/// A validated stratified design: one [`StratumDesign`] per stratum with
/// weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Design {
    strata: Vec<StratumDesign>,
}

impl Design {
    /// Build from `(N_h, n_h)` pairs; weights are `N_h / sum(N_k)`.
    pub fn from_sizes(sizes: &[(u64, u64)]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidDesign("design has no strata".into()));
        }
        let total: u64 = sizes.iter().map(|&(n_pop, _)| n_pop).sum();
        let strata = sizes
            .iter()
            .map(|&(n_pop, n)| StratumDesign::new(n_pop, n, n_pop as f64 / total as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Design { strata })
    }

    /// Build from `(N_h, n_h, w_h)` triples. Weights are not renormalised:
    /// their sum must be one within [`WEIGHT_SUM_TOLERANCE`].
    pub fn with_weights(strata: &[(u64, u64, f64)]) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::InvalidDesign("design has no strata".into()));
        }
        let strata = strata
            .iter()
            .map(|&(n_pop, n, w)| StratumDesign::new(n_pop, n, w))
            .collect::<Result<Vec<_>>>()?;
        let sum: f64 = strata.iter().map(|s| s.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidDesign(format!(
                "stratum weights sum to {sum}, expected 1"
            )));
        }
        Ok(Design { strata })
    }

    pub fn strata(&self) -> &[StratumDesign] {
        &self.strata
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn population_size(&self) -> u64 {
        self.strata.iter().map(|s| s.population_size).sum()
    }

    pub fn max_sample_size(&self) -> u64 {
        self.strata.iter().map(|s| s.sample_size).max().unwrap_or(0)
    }
}

/// Observed number of attribute-positive units in each sampled stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumCounts {
    counts: Vec<u64>,
}

impl StratumCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        StratumCounts { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Check pairing with `design`: same length and `c_h <= n_h`.
    pub fn validate(&self, design: &Design) -> Result<()> {
        if self.counts.len() != design.len() {
            return Err(Error::InvalidCounts(format!(
                "{} counts for {} strata",
                self.counts.len(),
                design.len()
            )));
        }
        for (h, (&c, s)) in self.counts.iter().zip(design.strata()).enumerate() {
            if c > s.sample_size {
                return Err(Error::InvalidCounts(format!(
                    "stratum {h}: count {c} exceeds sample size {}",
                    s.sample_size
                )));
            }
        }
        Ok(())
    }
}

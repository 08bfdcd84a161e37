//! zCDP budget arithmetic.
//!
//! A [`PrivacyBudget`] carries a total `rho` together with the split used by
//! two-release algorithms. Sequential composition of zCDP releases adds their
//! `rho` values.

use serde::Serialize;

use crate::error::{Error, Result};

/// Total zCDP budget plus the `(rho1, rho2)` split consumed by algorithms that
/// release two noisy statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyBudget {
    rho: f64,
    rho1: f64,
    rho2: f64,
}

impl PrivacyBudget {
    pub const DEFAULT_SPLIT: f64 = 0.5;

    /// Budget with the default even split.
    pub fn new(rho: f64) -> Result<Self> {
        Self::with_split(rho, Self::DEFAULT_SPLIT)
    }

    /// Budget whose first component receives `fraction * rho`.
    pub fn with_split(rho: f64, fraction: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidBudget(format!(
                "rho must be positive and finite, got {rho}"
            )));
        }
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidBudget(format!(
                "split fraction must lie in [0, 1], got {fraction}"
            )));
        }
        let rho1 = rho * fraction;
        let rho2 = rho - rho1;
        Ok(PrivacyBudget { rho, rho1, rho2 })
    }

    /// Budget from explicit components; `rho = rho1 + rho2`.
    pub fn from_parts(rho1: f64, rho2: f64) -> Result<Self> {
        if !(rho1.is_finite() && rho2.is_finite() && rho1 >= 0.0 && rho2 >= 0.0) {
            return Err(Error::InvalidBudget(format!(
                "budget components must be nonnegative and finite, got ({rho1}, {rho2})"
            )));
        }
        let rho = rho1 + rho2;
        if rho <= 0.0 {
            return Err(Error::InvalidBudget("total rho must be positive".into()));
        }
        Ok(PrivacyBudget { rho, rho1, rho2 })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    /// Both components strictly positive, as required by the two-release
    /// algorithms.
    pub fn require_split(&self) -> Result<()> {
        if self.rho1 > 0.0 && self.rho2 > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidBudget(format!(
                "both split components must be positive, got ({}, {})",
                self.rho1, self.rho2
            )))
        }
    }

    /// Sequential composition: running a `self`-zCDP release and an
    /// `other`-zCDP release on the same data is `(self.rho + other.rho)`-zCDP.
    /// The split of the result records the two operands.
    pub fn compose(&self, other: &PrivacyBudget) -> PrivacyBudget {
        PrivacyBudget {
            rho: self.rho + other.rho,
            rho1: self.rho,
            rho2: other.rho,
        }
    }
}

/// Free-function form of [`PrivacyBudget::compose`].
pub fn compose_budgets(a: &PrivacyBudget, b: &PrivacyBudget) -> PrivacyBudget {
    a.compose(b)
}

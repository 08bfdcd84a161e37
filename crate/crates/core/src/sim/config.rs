//! Experiment configuration, read from TOML with a strict schema.
//!
//! ```toml
//! alpha = 0.1
//! strata = 20
//! base_seed = 7
//! repetitions = 10000
//! algorithms = ["nonprivate", "str-pub", "pop-pub", "str-priv"]
//! clip_proportions = true
//! clip_interval = false
//! split = 0.5
//! population_size = { uniform = [1500, 2000] }
//! sampling_rate = { uniform = [0.04, 0.08] }
//! proportion = { uniform = [0.4, 0.6] }
//! rho = "inverse-max-n"            # or { fixed = 0.01 } or { grid = [...] }
//! # min_sample_size = 50
//! ```

use serde::{Deserialize, Serialize};

use crate::ci::AlgorithmTag;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum IntParam {
    Fixed(u64),
    /// Discrete uniform on the closed range.
    Uniform([u64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RealParam {
    Fixed(f64),
    /// Continuous uniform on `[lo, hi)`.
    Uniform([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RhoRule {
    Fixed(f64),
    /// `rho = 1 / max_h n_h` of the realised design.
    InverseMaxN,
    Grid(Vec<f64>),
}

fn default_split() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub strata: usize,
    pub base_seed: u64,
    pub repetitions: usize,
    pub algorithms: Vec<AlgorithmTag>,
    #[serde(default)]
    pub clip_proportions: bool,
    #[serde(default)]
    pub clip_interval: bool,
    #[serde(default = "default_split")]
    pub split: f64,
    pub population_size: IntParam,
    pub sampling_rate: RealParam,
    pub proportion: RealParam,
    pub rho: RhoRule,
    #[serde(default)]
    pub min_sample_size: Option<u64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let row = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (row, column)
}

impl ExperimentConfig {
    /// Parse and validate. Malformed TOML is [`Error::Parse`]; unknown,
    /// missing or out-of-range keys are [`Error::Config`].
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let (row, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            Error::Parse {
                row,
                column,
                message: e.message().to_string(),
            }
        })?;
        let config: ExperimentConfig =
            table.try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.strata == 0 {
            return bad("strata must be at least 1".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty".into());
        }
        if self.algorithms.contains(&AlgorithmTag::Difference) {
            return bad("the difference interval is not a simulation algorithm".into());
        }
        if !(0.0..=1.0).contains(&self.split) {
            return bad(format!("split must lie in [0, 1], got {}", self.split));
        }
        match self.population_size {
            IntParam::Fixed(n) if n < 2 => return bad("population_size must be at least 2".into()),
            IntParam::Uniform([lo, hi]) if lo < 2 || lo > hi => {
                return bad(format!("population_size range [{lo}, {hi}] is invalid"))
            }
            _ => {}
        }
        check_real("sampling_rate", &self.sampling_rate, |x| x > 0.0 && x <= 1.0)?;
        check_real("proportion", &self.proportion, |x| (0.0..=1.0).contains(&x))?;
        match &self.rho {
            RhoRule::Fixed(r) if !(r.is_finite() && *r > 0.0) => {
                return bad(format!("rho must be positive, got {r}"))
            }
            RhoRule::Grid(g) if g.is_empty() => return bad("rho grid is empty".into()),
            RhoRule::Grid(g) if g.iter().any(|r| !(r.is_finite() && *r > 0.0)) => {
                return bad("rho grid values must be positive".into())
            }
            _ => {}
        }
        Ok(())
    }

    /// The algorithms to report, with the non-private baseline first.
    pub fn reported_algorithms(&self) -> Vec<AlgorithmTag> {
        let mut out = vec![AlgorithmTag::NonPrivate];
        for &a in &self.algorithms {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }
}

fn check_real(name: &str, p: &RealParam, ok: impl Fn(f64) -> bool) -> Result<()> {
    let valid = match *p {
        RealParam::Fixed(x) => ok(x),
        RealParam::Uniform([lo, hi]) => ok(lo) && ok(hi) && lo <= hi,
    };
    if valid {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} is out of range: {p:?}")))
    }
}

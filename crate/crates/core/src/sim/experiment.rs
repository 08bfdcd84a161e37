use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, RhoRule};
use super::population::{design_for, draw_counts, generate_population, sample_sizes, Population};
use crate::budget::PrivacyBudget;
use crate::ci::AlgorithmTag;
use crate::design::{Design, StratumCounts};
use crate::dp_ci::{run_algorithm, DpOptions};
use crate::error::{Error, Result};
use crate::random::{derive_stream, RandomStream};

/// Outcome of one algorithm in one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    pub algorithm: AlgorithmTag,
    pub covered: bool,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub clipped: bool,
}

impl Outcome {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionRecord {
    pub grid_index: usize,
    pub repetition: usize,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: AlgorithmTag,
    pub coverage: f64,
    pub mean_width: f64,
    /// Sample standard deviation of the widths; absent when `R = 1`.
    pub width_sd: Option<f64>,
    /// Mean width relative to the non-private mean width.
    pub width_ratio: f64,
    pub mean_point: f64,
    pub mean_lower: f64,
    pub mean_upper: f64,
    /// Fraction of repetitions in which any clip or floor fired.
    pub clipped_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub grid_index: usize,
    pub budget: PrivacyBudget,
    pub alpha: f64,
    pub repetitions: usize,
    pub true_proportion: f64,
    pub algorithms: Vec<AlgorithmSummary>,
}

impl ExperimentSummary {
    pub fn get(&self, algorithm: AlgorithmTag) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }
}

/// Everything a simulation run reports: the fixed population and design and
/// one summary per budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub population: Population,
    pub sample_sizes: Vec<u64>,
    pub points: Vec<ExperimentSummary>,
}

/// Substream used by each algorithm inside a repetition. Fixed per tag so
/// adding or removing an algorithm leaves the others' draws unchanged.
fn algorithm_stream_index(tag: AlgorithmTag) -> u64 {
    match tag {
        AlgorithmTag::NonPrivate => 1,
        AlgorithmTag::StrNzPubSz => 2,
        AlgorithmTag::PopNzPubSz => 3,
        AlgorithmTag::StrNzPrivSz => 4,
        AlgorithmTag::Difference => 5,
    }
}

/// A configuration with its population and design realised once.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub population: Population,
    pub sample_sizes: Vec<u64>,
    pub design: Design,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let population = generate_population(&config)?;
        let sample_sizes = sample_sizes(&config, &population)?;
        let design = design_for(&population, &sample_sizes)?;
        Ok(Experiment {
            config,
            population,
            sample_sizes,
            design,
        })
    }

    /// The configured `rho` values, one per grid point.
    pub fn rho_values(&self) -> Vec<f64> {
        match &self.config.rho {
            RhoRule::Fixed(r) => vec![*r],
            RhoRule::InverseMaxN => vec![1.0 / self.design.max_sample_size() as f64],
            RhoRule::Grid(g) => g.clone(),
        }
    }

    pub fn budget(&self, rho: f64) -> Result<PrivacyBudget> {
        let b = PrivacyBudget::with_split(rho, self.config.split)?;
        let needs_split = self
            .config
            .algorithms
            .iter()
            .any(|a| matches!(a, AlgorithmTag::PopNzPubSz | AlgorithmTag::StrNzPrivSz));
        if needs_split && b.require_split().is_err() {
            return Err(Error::Infeasible(format!(
                "split {} leaves a zero budget component for a two-release algorithm",
                self.config.split
            )));
        }
        Ok(b)
    }

    pub fn options(&self) -> DpOptions {
        DpOptions {
            alpha: self.config.alpha,
            clip_proportions: self.config.clip_proportions,
            clip_interval: self.config.clip_interval,
        }
    }

    pub fn repetition_stream(&self, grid_index: usize, repetition: usize) -> RandomStream {
        derive_stream(self.config.base_seed, &[grid_index as i64, repetition as i64])
    }

    /// Sample counts for one repetition.
    pub fn sample(&self, grid_index: usize, repetition: usize) -> Result<StratumCounts> {
        let stream = self.repetition_stream(grid_index, repetition).substream(0);
        draw_counts(&stream, &self.population, &self.sample_sizes)
    }

    /// Run one repetition: draw a sample and apply every reported algorithm.
    pub fn run_repetition(
        &self,
        grid_index: usize,
        repetition: usize,
        budget: &PrivacyBudget,
    ) -> Result<RepetitionRecord> {
        let stream = self.repetition_stream(grid_index, repetition);
        let counts = self.sample(grid_index, repetition)?;
        let opts = self.options();
        let truth = self.population.proportion;
        let outcomes = self
            .config
            .reported_algorithms()
            .into_iter()
            .map(|alg| {
                let sub = stream.substream(algorithm_stream_index(alg));
                let (ci, _) = run_algorithm(alg, &sub, &self.design, &counts, budget, &opts)?;
                Ok(Outcome {
                    algorithm: alg,
                    covered: ci.covers(truth),
                    point: ci.point_estimate,
                    lower: ci.lower,
                    upper: ci.upper,
                    clipped: ci.clipped.any(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RepetitionRecord {
            grid_index,
            repetition,
            outcomes,
        })
    }

    /// All repetitions at one grid point, in repetition order. Repetitions run
    /// in parallel; each owns its stream.
    pub fn run_point(&self, grid_index: usize, rho: f64) -> Result<Vec<RepetitionRecord>> {
        let budget = self.budget(rho)?;
        (0..self.config.repetitions)
            .into_par_iter()
            .map(|r| self.run_repetition(grid_index, r, &budget))
            .collect()
    }

    /// Aggregate repetition records. Records are ordered by repetition index
    /// before reduction, so the result does not depend on input order.
    pub fn summarize(
        &self,
        grid_index: usize,
        rho: f64,
        mut records: Vec<RepetitionRecord>,
    ) -> Result<ExperimentSummary> {
        if records.is_empty() {
            return Err(Error::arg("no repetition records to summarise"));
        }
        records.sort_by_key(|r| r.repetition);
        let budget = self.budget(rho)?;
        let reps = records.len() as f64;
        let algorithms = self.config.reported_algorithms();
        let mut rows: Vec<AlgorithmSummary> = algorithms
            .iter()
            .enumerate()
            .map(|(i, &alg)| {
                let outcomes: Vec<&Outcome> = records.iter().map(|r| &r.outcomes[i]).collect();
                let mean = |f: &dyn Fn(&Outcome) -> f64| outcomes.iter().map(|o| f(o)).sum::<f64>() / reps;
                let mean_width = mean(&|o| o.width());
                let width_sd = (records.len() > 1).then(|| {
                    let ss: f64 = outcomes.iter().map(|o| (o.width() - mean_width).powi(2)).sum();
                    (ss / (reps - 1.0)).sqrt()
                });
                AlgorithmSummary {
                    algorithm: alg,
                    coverage: mean(&|o| o.covered as u8 as f64),
                    mean_width,
                    width_sd,
                    width_ratio: f64::NAN,
                    mean_point: mean(&|o| o.point),
                    mean_lower: mean(&|o| o.lower),
                    mean_upper: mean(&|o| o.upper),
                    clipped_fraction: mean(&|o| o.clipped as u8 as f64),
                }
            })
            .collect();
        let baseline = rows[0].mean_width;
        for row in &mut rows {
            row.width_ratio = if row.algorithm == AlgorithmTag::NonPrivate {
                1.0
            } else {
                row.mean_width / baseline
            };
        }
        Ok(ExperimentSummary {
            grid_index,
            budget,
            alpha: self.config.alpha,
            repetitions: records.len(),
            true_proportion: self.population.proportion,
            algorithms: rows,
        })
    }

    /// Run every configured grid point. Returns the report and, when
    /// `keep_records` is set, the repetition records of each point.
    pub fn run(&self, keep_records: bool) -> Result<(SimulationReport, Vec<RepetitionRecord>)> {
        self.run_grid(&self.rho_values(), keep_records)
    }

    pub fn run_grid(
        &self,
        grid: &[f64],
        keep_records: bool,
    ) -> Result<(SimulationReport, Vec<RepetitionRecord>)> {
        if grid.is_empty() {
            return Err(Error::arg("rho grid is empty"));
        }
        let mut points = Vec::with_capacity(grid.len());
        let mut kept = Vec::new();
        for (g, &rho) in grid.iter().enumerate() {
            let records = self.run_point(g, rho)?;
            if keep_records {
                kept.extend(records.iter().cloned());
            }
            points.push(self.summarize(g, rho, records)?);
        }
        let report = SimulationReport {
            population: self.population.clone(),
            sample_sizes: self.sample_sizes.clone(),
            points,
        };
        Ok((report, kept))
    }
}

/// Run a single-budget experiment (`rho` fixed or `inverse-max-n`).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    if matches!(config.rho, RhoRule::Grid(_)) {
        return Err(Error::Config(
            "run_experiment needs a single rho; use rho_sweep for a grid".into(),
        ));
    }
    let (report, _) = Experiment::new(config.clone())?.run(false)?;
    Ok(report.points.into_iter().next().expect("one grid point"))
}

/// Run the experiment at each `rho` in `grid` on one shared population.
pub fn rho_sweep(config: &ExperimentConfig, grid: &[f64]) -> Result<SimulationReport> {
    if let Some(bad) = grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidBudget(format!("grid value {bad}")));
    }
    Experiment::new(config.clone())?.run_grid(grid, false).map(|(r, _)| r)
}

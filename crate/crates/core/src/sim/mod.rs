//! Finite-population simulation harness.
//!
//! A configuration fixes one population (stream `[-1]`) and one design
//! (stream `[-2]`). Repetition `r` at grid point `g` redraws only the sample
//! and the privacy noise, from stream `[g, r]`.

pub mod config;
pub mod experiment;
pub mod population;
pub mod qq;

pub use config::{ExperimentConfig, IntParam, RealParam, RhoRule};
pub use experiment::{
    rho_sweep, run_experiment, AlgorithmSummary, Experiment, ExperimentSummary, Outcome,
    RepetitionRecord, SimulationReport,
};
pub use population::{draw_sample, generate_population, sample_sizes, sizes_from_rates, Population};
pub use qq::{empirical_quantile, qq_data, theoretical_distribution, QqRow};

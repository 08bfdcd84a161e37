//! Finite populations and stratified simple random samples drawn from them.

use rand::Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, IntParam, RealParam};
use crate::design::{Design, StratumCounts};
use crate::error::{Error, Result};
use crate::random::{derive_stream, hypergeometric_count, RandomStream};

/// Stream index reserved for population generation.
pub const POPULATION_STREAM: i64 = -1;
/// Stream index reserved for the realised sampling rates.
pub const DESIGN_STREAM: i64 = -2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Population {
    pub sizes: Vec<u64>,
    /// Attribute-positive units per stratum.
    pub positives: Vec<u64>,
    pub stratum_proportions: Vec<f64>,
    pub proportion: f64,
}

impl Population {
    pub fn new(sizes: Vec<u64>, positives: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != positives.len() {
            return Err(Error::InvalidDesign(format!(
                "{} stratum sizes and {} positive counts",
                sizes.len(),
                positives.len()
            )));
        }
        if let Some(h) = (0..sizes.len()).find(|&h| positives[h] > sizes[h] || sizes[h] == 0) {
            return Err(Error::InvalidDesign(format!(
                "stratum {h}: K={} with N={}",
                positives[h], sizes[h]
            )));
        }
        let stratum_proportions = sizes
            .iter()
            .zip(&positives)
            .map(|(&n, &k)| k as f64 / n as f64)
            .collect();
        let proportion = positives.iter().sum::<u64>() as f64 / sizes.iter().sum::<u64>() as f64;
        Ok(Population {
            sizes,
            positives,
            stratum_proportions,
            proportion,
        })
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

fn draw_int<R: Rng>(rng: &mut R, p: &IntParam) -> u64 {
    match *p {
        IntParam::Fixed(v) => v,
        IntParam::Uniform([lo, hi]) => rng.random_range(lo..=hi),
    }
}

fn draw_real<R: Rng>(rng: &mut R, p: &RealParam) -> f64 {
    match *p {
        RealParam::Fixed(v) => v,
        RealParam::Uniform([lo, hi]) if lo == hi => lo,
        RealParam::Uniform([lo, hi]) => rng.random_range(lo..hi),
    }
}

/// Draw stratum sizes and proportions, then fix `K_h = round(p_h N_h)`.
/// The reported `p` is recomputed from the realised `K_h`.
pub fn generate_population(config: &ExperimentConfig) -> Result<Population> {
    let mut rng = derive_stream(config.base_seed, &[POPULATION_STREAM]).rng();
    let mut sizes = Vec::with_capacity(config.strata);
    let mut positives = Vec::with_capacity(config.strata);
    for _ in 0..config.strata {
        let n = draw_int(&mut rng, &config.population_size);
        let p = draw_real(&mut rng, &config.proportion);
        sizes.push(n);
        positives.push(round_half_up(p * n as f64).min(n));
    }
    Population::new(sizes, positives)
}

/// Draw per-stratum sampling rates and turn them into sample sizes
/// `max(round(r_h N_h), min_sample_size)`.
pub fn sample_sizes(config: &ExperimentConfig, population: &Population) -> Result<Vec<u64>> {
    let mut rng = derive_stream(config.base_seed, &[DESIGN_STREAM]).rng();
    let rates: Vec<f64> = (0..population.len())
        .map(|_| draw_real(&mut rng, &config.sampling_rate))
        .collect();
    sizes_from_rates(population, &rates, config.min_sample_size.unwrap_or(0))
}

pub fn sizes_from_rates(population: &Population, rates: &[f64], min_size: u64) -> Result<Vec<u64>> {
    if rates.len() != population.len() {
        return Err(Error::arg(format!(
            "{} rates for {} strata",
            rates.len(),
            population.len()
        )));
    }
    population
        .sizes
        .iter()
        .zip(rates)
        .enumerate()
        .map(|(h, (&big_n, &r))| {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::Infeasible(format!("stratum {h}: sampling rate {r}")));
            }
            let n = round_half_up(r * big_n as f64).max(min_size);
            if n < 2 || n > big_n {
                return Err(Error::Infeasible(format!(
                    "stratum {h}: sample size {n} with population {big_n} (need 2 <= n <= N)"
                )));
            }
            Ok(n)
        })
        .collect()
}

/// The public design implied by a population and sample sizes.
pub fn design_for(population: &Population, sizes: &[u64]) -> Result<Design> {
    let pairs: Vec<(u64, u64)> = population.sizes.iter().copied().zip(sizes.iter().copied()).collect();
    Design::from_sizes(&pairs)
}

/// One stratified simple random sample. Stratum `h` draws from
/// `stream.substream(h)`.
pub fn draw_sample(
    stream: &RandomStream,
    population: &Population,
    sizes: &[u64],
) -> Result<(Design, StratumCounts)> {
    let design = design_for(population, sizes)?;
    let counts = draw_counts(stream, population, sizes)?;
    Ok((design, counts))
}

pub(crate) fn draw_counts(
    stream: &RandomStream,
    population: &Population,
    sizes: &[u64],
) -> Result<StratumCounts> {
    let counts = (0..population.len())
        .map(|h| {
            let mut rng = stream.substream(h as u64).rng();
            hypergeometric_count(&mut rng, population.sizes[h], population.positives[h], sizes[h])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StratumCounts::new(counts))
}

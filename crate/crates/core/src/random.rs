//! Reproducible, splittable randomness.
//!
//! A [`RandomStream`] names an independent ChaCha12 keystream: the key comes
//! from `base_seed` and the 64-bit ChaCha stream selector from `stream_id`.
//! Distinct stream ids give non-overlapping keystreams, so repetitions and
//! strata can be processed in any order or in parallel without changing a
//! single draw.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(state: u64, index: u64) -> u64 {
    splitmix_finalize(state.wrapping_add(GOLDEN_GAMMA) ^ splitmix_finalize(index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RandomStream {
    pub base_seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(base_seed: u64, stream_id: u64) -> Self {
        RandomStream {
            base_seed,
            stream_id,
        }
    }

    /// A child stream keyed by `index`; used to give each stratum (or each
    /// algorithm within a repetition) its own draws.
    pub fn substream(&self, index: u64) -> RandomStream {
        RandomStream {
            base_seed: self.base_seed,
            stream_id: combine(self.stream_id, index),
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Map an index tuple (e.g. `[grid_point, repetition]`) to a stream.
///
/// The tuple length is mixed in first, so `[a]` and `[a, 0]` differ. Each
/// step is a bijection of the running state for a fixed index, so tuples of
/// equal length sharing a prefix never collide on their last element.
pub fn derive_stream(base_seed: u64, indices: &[i64]) -> RandomStream {
    let id = indices
        .iter()
        .fold(splitmix_finalize(indices.len() as u64), |h, &i| {
            combine(h, i as u64)
        });
    RandomStream::new(base_seed, id)
}

/// One draw from `N(mean, variance)`. A zero variance returns `mean` exactly
/// and consumes nothing from `rng`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, mean: f64, variance: f64) -> Result<f64> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::arg(format!(
            "variance must be nonnegative and finite, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(mean);
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok(mean + variance.sqrt() * z)
}

/// Number of attribute-positive units in a simple random sample of size
/// `sample` drawn without replacement from `population` units of which
/// `positives` carry the attribute.
///
/// Units are selected one at a time with exact integer probabilities
/// `K_remaining / N_remaining`, so the result is exactly hypergeometric. When
/// more than half the population is sampled the unsampled complement is drawn
/// instead.
pub fn hypergeometric_count<R: Rng + ?Sized>(
    rng: &mut R,
    population: u64,
    positives: u64,
    sample: u64,
) -> Result<u64> {
    if positives > population || sample > population {
        return Err(Error::arg(format!(
            "hypergeometric parameters out of range: N={population}, K={positives}, n={sample}"
        )));
    }
    let complement = sample > population / 2;
    let draws = if complement { population - sample } else { sample };
    let selected = count_selected(rng, population, positives, draws);
    Ok(if complement {
        positives - selected
    } else {
        selected
    })
}

fn count_selected<R: Rng + ?Sized>(rng: &mut R, population: u64, positives: u64, draws: u64) -> u64 {
    let mut remaining = population;
    let mut remaining_pos = positives;
    let mut selected = 0;
    for i in 0..draws {
        if remaining_pos == 0 {
            break;
        }
        if remaining_pos == remaining {
            // every unit left is positive
            selected += draws - i;
            break;
        }
        if rng.random_range(0..remaining) < remaining_pos {
            selected += 1;
            remaining_pos -= 1;
        }
        remaining -= 1;
    }
    selected
}

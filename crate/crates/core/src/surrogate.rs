//! Shuffled surrogates and the original-versus-surrogate plane comparison.
//!
//! Shuffles are Fisher-Yates driven by ChaCha20 (`rand_chacha`), which has
//! published reference outputs, and use a rejection-sampled bounded integer
//! helper defined here so the permutation for a given seed never depends on
//! the `rand` version or the platform word size.
//!
//! Shuffle `i` of a report with master seed `s` uses [`derive_seed`]`(s, i)`:
//!
//! ```text
//! seed_i = splitmix64(s ^ splitmix64(i + 0x9E37_79B9_7F4A_7C15))
//! ```

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infomeasures::{plane_point, PlaneQuantifiers};
use crate::ingest::TimeSeries;
use crate::ordinal::{distribution_from_values, ordinal_distribution, EmbeddingParams};
use crate::scalar::Float;

pub const SURROGATE_SUFFIX: &str = "~shuffled";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateReport<T> {
    pub name: String,
    pub original: PlaneQuantifiers<T>,
    /// In shuffle-index order.
    pub surrogates: Vec<PlaneQuantifiers<T>>,
    pub seed: u64,
    pub n_shuffles: usize,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-shuffle seed derived from the master seed and the shuffle index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// Uniform integer in `0..bound` by rejection.
fn uniform_below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    // 2^64 mod bound: values below it would bias the residue
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % bound;
        }
    }
}

/// In-place Fisher-Yates shuffle seeded with `seed`.
pub fn fisher_yates<V>(values: &mut [V], seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for i in (1..values.len()).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        values.swap(i, j);
    }
}

/// A uniformly random reordering of the series values; labels stay in place.
pub fn shuffle_series<T: Float>(series: &TimeSeries<T>, seed: u64) -> Result<TimeSeries<T>> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort { series: series.name().to_string(), len: series.len(), needed: 2 });
    }
    let mut values = series.values().to_vec();
    fisher_yates(&mut values, seed);
    Ok(series.renamed_with_values(format!("{}{SURROGATE_SUFFIX}", series.name()), values))
}

pub fn surrogate_test<T: Float>(
    series: &TimeSeries<T>,
    params: EmbeddingParams,
    n_shuffles: usize,
    seed: u64,
) -> Result<SurrogateReport<T>> {
    if n_shuffles == 0 {
        return Err(Error::InvalidArgument("at least one shuffle required".into()));
    }
    let original = plane_point(&ordinal_distribution(series, params)?)?;
    if series.len() < 2 {
        return Err(Error::SeriesTooShort { series: series.name().to_string(), len: series.len(), needed: 2 });
    }
    let surrogates = (0..n_shuffles)
        .into_par_iter()
        .map(|i| {
            let mut values = series.values().to_vec();
            fisher_yates(&mut values, derive_seed(seed, i as u64));
            plane_point(&distribution_from_values(series.name(), &values, params)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurrogateReport { name: series.name().to_string(), original, surrogates, seed, n_shuffles })
}

//! Bandt-Pompe ordinal patterns and their empirical distribution.
//!
//! A window of `D` values sampled with delay `tau` maps to the permutation
//! that sorts it ascending; equal values keep their time order. Patterns are
//! indexed by their lexicographic Lehmer rank in `0..D!`.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::TimeSeries;
use crate::scalar::Float;

pub const MAX_DIM: usize = 10;

/// Below `LENGTH_FACTOR * D!` observations the estimate is flagged as biased.
pub const LENGTH_FACTOR: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EmbeddingParams {
    pub dim: usize,
    pub tau: usize,
}

impl EmbeddingParams {
    pub fn new(dim: usize, tau: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParams(format!("dimension {dim} outside 2..={MAX_DIM}")));
        }
        if tau < 1 {
            return Err(Error::InvalidParams("delay must be at least 1".into()));
        }
        Ok(Self { dim, tau })
    }

    /// Number of states `D!`.
    pub fn states(&self) -> usize {
        factorial(self.dim)
    }

    /// Time span covered by one window, `(D - 1) * tau`.
    pub fn span(&self) -> usize {
        (self.dim - 1) * self.tau
    }
}

impl std::fmt::Display for EmbeddingParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "D={} tau={}", self.dim, self.tau)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A permutation `(r_0 ... r_{D-1})` of `0..D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrdinalPattern(Vec<usize>);

impl OrdinalPattern {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &r in &perm {
            if r >= perm.len() || std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidPermutation { len: perm.len(), perm });
            }
        }
        Ok(Self(perm))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl std::fmt::Display for OrdinalPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for r in &self.0 {
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// The permutation sorting `window` ascending, ties broken by offset.
pub fn extract_pattern<T: Float>(window: &[T], params: EmbeddingParams) -> Result<OrdinalPattern> {
    if window.len() != params.dim {
        return Err(Error::WindowLength { expected: params.dim, found: window.len() });
    }
    if let Some(index) = window.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { series: "window".into(), index });
    }
    let mut perm: Vec<usize> = (0..window.len()).collect();
    perm.sort_by(|&a, &b| window[a].partial_cmp(&window[b]).expect("finite values are ordered"));
    Ok(OrdinalPattern(perm))
}

/// Lexicographic Lehmer rank of a pattern.
pub fn pattern_rank(pattern: &OrdinalPattern) -> usize {
    lehmer_rank(&pattern.0)
}

fn lehmer_rank(perm: &[usize]) -> usize {
    let d = perm.len();
    let mut rank = 0;
    for i in 0..d {
        let smaller_after = perm[i + 1..].iter().filter(|&&r| r < perm[i]).count();
        rank = rank * (d - i) + smaller_after;
    }
    rank
}

/// Inverse of [`pattern_rank`].
pub fn pattern_unrank(rank: usize, dim: usize) -> Result<OrdinalPattern> {
    if dim == 0 || dim > 20 || rank >= factorial(dim) {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let mut digits = vec![0; dim];
    let mut r = rank;
    for i in (0..dim).rev() {
        let base = dim - i;
        digits[i] = r % base;
        r /= base;
    }
    let mut pool: Vec<usize> = (0..dim).collect();
    Ok(OrdinalPattern(digits.into_iter().map(|c| pool.remove(c)).collect()))
}

/// Empirical distribution of ordinal patterns for one series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrdinalDistribution<T> {
    pub params: EmbeddingParams,
    /// Indexed by pattern rank.
    pub counts: Vec<u64>,
    /// Number of windows, `N - (D - 1) * tau`.
    pub total: u64,
    pub probabilities: Vec<T>,
    pub series_len: usize,
    /// Set when `N < 5 * D!`.
    pub length_warning: bool,
}

impl<T: Float> OrdinalDistribution<T> {
    pub fn probability(&self, pattern: &OrdinalPattern) -> T {
        self.probabilities[pattern_rank(pattern)]
    }

    /// `counts[rank] / total` as an exact fraction.
    pub fn exact_probability(&self, rank: usize) -> Ratio<u64> {
        Ratio::new(self.counts[rank], self.total)
    }

    pub fn states(&self) -> usize {
        self.counts.len()
    }
}

pub fn ordinal_distribution<T: Float>(series: &TimeSeries<T>, params: EmbeddingParams) -> Result<OrdinalDistribution<T>> {
    distribution_from_values(series.name(), series.values(), params)
}

/// Same as [`ordinal_distribution`] on a bare slice; `name` only feeds error messages.
pub fn distribution_from_values<T: Float>(
    name: &str,
    values: &[T],
    params: EmbeddingParams,
) -> Result<OrdinalDistribution<T>> {
    let n = values.len();
    let needed = params.span() + 1;
    if n < needed {
        return Err(Error::SeriesTooShort { series: name.to_string(), len: n, needed });
    }
    if params.tau > n / 2 {
        return Err(Error::InvalidParams(format!("delay {} exceeds half the series length {n}", params.tau)));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { series: name.to_string(), index });
    }

    let states = params.states();
    let mut counts = vec![0u64; states];
    let windows = n - params.span();
    let mut scratch = [0usize; MAX_DIM];
    for start in 0..windows {
        counts[window_rank(values, start, params, &mut scratch)] += 1;
    }

    let total = windows as u64;
    let denom = T::of_usize(windows);
    let probabilities = counts.iter().map(|&c| T::of(c as f64) / denom).collect();
    Ok(OrdinalDistribution {
        params,
        counts,
        total,
        probabilities,
        series_len: n,
        length_warning: n < LENGTH_FACTOR * states,
    })
}

/// Rank of the window starting at `start`, without allocating.
fn window_rank<T: Float>(values: &[T], start: usize, params: EmbeddingParams, scratch: &mut [usize; MAX_DIM]) -> usize {
    let d = params.dim;
    let at = |k: usize| values[start + k * params.tau];
    // stable insertion sort of offsets by value
    for i in 0..d {
        let v = at(i);
        let mut j = i;
        while j > 0 && at(scratch[j - 1]) > v {
            scratch[j] = scratch[j - 1];
            j -= 1;
        }
        scratch[j] = i;
    }
    lehmer_rank(&scratch[..d])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> EmbeddingParams {
        EmbeddingParams::new(3, 1).unwrap()
    }

    fn pat(v: &[usize]) -> OrdinalPattern {
        OrdinalPattern::new(v.to_vec()).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(EmbeddingParams::new(1, 1).is_err());
        assert!(EmbeddingParams::new(11, 1).is_err());
        assert!(EmbeddingParams::new(3, 0).is_err());
        assert_eq!(EmbeddingParams::new(5, 1).unwrap().states(), 120);
    }

    #[test]
    fn worked_example_patterns() {
        assert_eq!(extract_pattern(&[9.0, 10.0, 6.0], p3()).unwrap(), pat(&[2, 0, 1]));
        assert_eq!(extract_pattern(&[6.0, 11.0, 3.0], p3()).unwrap(), pat(&[2, 0, 1]));
        assert_eq!(extract_pattern(&[10.0, 6.0, 11.0], p3()).unwrap(), pat(&[1, 0, 2]));
    }

    #[test]
    fn ties_keep_time_order() {
        assert_eq!(extract_pattern(&[5.0, 5.0, 5.0], p3()).unwrap(), pat(&[0, 1, 2]));
        assert_eq!(extract_pattern(&[2.0, 1.0, 2.0], p3()).unwrap(), pat(&[1, 0, 2]));
    }

    #[test]
    fn wrong_window_length() {
        assert!(matches!(extract_pattern(&[1.0, 2.0], p3()), Err(Error::WindowLength { expected: 3, found: 2 })));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(pattern_rank(&pat(&[0, 1, 2])), 0);
        assert_eq!(pattern_rank(&pat(&[2, 1, 0])), 5);
        assert_eq!(pattern_rank(&pat(&[1, 0, 2])), 2);
    }

    #[test]
    fn rank_matches_lexicographic_enumeration() {
        // all permutations of 0..4 in lexicographic order, generated independently
        let mut perms = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        let mut s = p;
                        s.sort();
                        if s == [0, 1, 2, 3] {
                            perms.push(p.to_vec());
                        }
                    }
                }
            }
        }
        for (i, p) in perms.into_iter().enumerate() {
            assert_eq!(pattern_rank(&pat(&p)), i);
        }
    }

    #[test]
    fn invalid_permutation() {
        assert!(OrdinalPattern::new(vec![0, 0, 1]).is_err());
        assert!(OrdinalPattern::new(vec![0, 3, 1]).is_err());
        assert!(pattern_unrank(6, 3).is_err());
    }

    #[test]
    fn unrank_roundtrip_all_up_to_seven() {
        for d in 1..=7 {
            for r in 0..factorial(d) {
                assert_eq!(pattern_rank(&pattern_unrank(r, d).unwrap()), r);
            }
        }
    }

    #[test]
    fn worked_example_distribution() {
        let s = TimeSeries::new("x", vec![4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0]).unwrap();
        let d = ordinal_distribution(&s, p3()).unwrap();
        assert_eq!(d.total, 5);
        assert_eq!(d.probability(&pat(&[0, 1, 2])), 0.4);
        assert_eq!(d.probability(&pat(&[2, 0, 1])), 0.4);
        assert_eq!(d.probability(&pat(&[1, 0, 2])), 0.2);
        for p in [[0, 2, 1], [1, 2, 0], [2, 1, 0]] {
            assert_eq!(d.probability(&pat(&p)), 0.0);
        }
        assert_eq!(d.exact_probability(pattern_rank(&pat(&[1, 0, 2]))), Ratio::new(1, 5));
        assert!(d.length_warning);
    }

    #[test]
    fn monotone_series_single_pattern() {
        let s = TimeSeries::new("x", (0..10).map(f64::from).collect()).unwrap();
        let d = ordinal_distribution(&s, p3()).unwrap();
        assert_eq!(d.probabilities[0], 1.0);
        assert!(d.probabilities[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn delay_two() {
        let s = TimeSeries::new("x", vec![1.0, 3.0, 2.0, 4.0, 3.0, 5.0]).unwrap();
        let d = ordinal_distribution(&s, EmbeddingParams::new(2, 2).unwrap()).unwrap();
        assert_eq!(d.total, 4);
        assert_eq!(d.counts, vec![4, 0]);
    }

    #[test]
    fn too_short_and_delay_cap() {
        let s = TimeSeries::new("x", vec![1.0, 2.0]).unwrap();
        assert!(matches!(ordinal_distribution(&s, p3()), Err(Error::SeriesTooShort { needed: 3, .. })));
        let s = TimeSeries::new("x", (0..9).map(f64::from).collect()).unwrap();
        assert!(matches!(ordinal_distribution(&s, EmbeddingParams::new(2, 5).unwrap()), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn single_precision() {
        let s = TimeSeries::new("x", vec![4.0f32, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0]).unwrap();
        let d = ordinal_distribution(&s, p3()).unwrap();
        assert_eq!(d.counts[0], 2);
    }
}

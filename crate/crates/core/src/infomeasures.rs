//! Shannon entropy, Jensen-Shannon disequilibrium and statistical complexity.
//!
//! Natural logarithms throughout, with `0 ln 0 = 0`. Probability vectors are
//! validated at entry: every entry must be non-negative and the total must be
//! within `1e-9` of one, in which case the vector is rescaled to sum to one.

use std::borrow::Cow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{EmbeddingParams, OrdinalDistribution};
use crate::scalar::{compensated_sum, xlogx, Float};

/// A point on the complexity-entropy causality plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneQuantifiers<T> {
    /// Normalized permutation entropy in `[0, 1]`.
    pub h: T,
    /// Permutation statistical complexity.
    pub c: T,
    pub params: EmbeddingParams,
    /// Number of windows behind the estimate.
    pub n_effective: u64,
    pub length_warning: bool,
}

fn sum_tolerance<T: Float>() -> T {
    T::of(1e-9).max(T::epsilon() * T::of(64.0))
}

fn validated<T: Float>(p: &[T]) -> Result<Cow<'_, [T]>> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if let Some(i) = p.iter().position(|&x| !x.is_finite() || x < T::zero()) {
        return Err(Error::InvalidDistribution(format!("entry {i} is {}", p[i])));
    }
    let total = compensated_sum(p.iter().copied());
    if (total - T::one()).abs() > sum_tolerance() {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    if total == T::one() {
        Ok(Cow::Borrowed(p))
    } else {
        Ok(Cow::Owned(p.iter().map(|&x| x / total).collect()))
    }
}

fn entropy_unchecked<T: Float>(p: &[T]) -> T {
    -compensated_sum(p.iter().map(|&x| xlogx(x)))
}

/// `-sum p_i ln p_i`, in nats.
pub fn shannon_entropy<T: Float>(p: &[T]) -> Result<T> {
    Ok(entropy_unchecked(&validated(p)?))
}

/// Shannon entropy divided by its maximum `ln M`, clamped to `[0, 1]`.
pub fn normalized_entropy<T: Float>(p: &[T]) -> Result<T> {
    if p.len() < 2 {
        return Err(Error::TooFewStates(p.len()));
    }
    let p = validated(p)?;
    Ok(normalized_unchecked(&p))
}

fn normalized_unchecked<T: Float>(p: &[T]) -> T {
    let h = entropy_unchecked(p) / T::of_usize(p.len()).ln();
    h.max(T::zero()).min(T::one())
}

/// Jensen-Shannon divergence `S[(P+Q)/2] - S[P]/2 - S[Q]/2`.
///
/// Evaluated as the mean Kullback-Leibler divergence to the mixture, whose
/// terms are individually non-negative; result is symmetric bit for bit.
pub fn jensen_shannon_divergence<T: Float>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    let p = validated(p)?;
    let q = validated(q)?;
    Ok(jsd_unchecked(&p, &q))
}

fn jsd_unchecked<T: Float>(p: &[T], q: &[T]) -> T {
    let two = T::of(2.0);
    let half_kl = |a: T, mix: T| if a > T::zero() { a * (two * a / mix).ln() } else { T::zero() };
    let total = compensated_sum(p.iter().zip(q).map(|(&a, &b)| {
        let mix = a + b;
        half_kl(a, mix) + half_kl(b, mix)
    }));
    (total / two).max(T::zero())
}

/// Normalization constant making the disequilibrium one at a delta distribution.
pub fn q0<T: Float>(states: usize) -> Result<T> {
    if states < 2 {
        return Err(Error::TooFewStates(states));
    }
    let m = T::of_usize(states);
    let one = T::one();
    let two = T::of(2.0);
    let bracket = ((m + one) / m) * (m + one).ln() - two * (two * m).ln() + m.ln();
    Ok(-two / bracket)
}

/// `Q0 * J[P, uniform] * H[P]`.
pub fn statistical_complexity<T: Float>(p: &[T]) -> Result<T> {
    if p.len() < 2 {
        return Err(Error::TooFewStates(p.len()));
    }
    let p = validated(p)?;
    Ok(complexity_unchecked(&p).1)
}

/// `(H, C)` for an already validated vector.
fn complexity_unchecked<T: Float>(p: &[T]) -> (T, T) {
    let m = p.len();
    let h = normalized_unchecked(p);
    if h == T::zero() {
        return (h, T::zero());
    }
    let uniform = vec![T::one() / T::of_usize(m); m];
    let c = q0::<T>(m).expect("m >= 2") * jsd_unchecked(p, &uniform) * h;
    (h, c)
}

/// Places an ordinal distribution on the plane.
pub fn plane_point<T: Float>(dist: &OrdinalDistribution<T>) -> Result<PlaneQuantifiers<T>> {
    if dist.probabilities.len() < 2 {
        return Err(Error::TooFewStates(dist.probabilities.len()));
    }
    let p = validated(&dist.probabilities)?;
    let (h, c) = complexity_unchecked(&p);
    Ok(PlaneQuantifiers {
        h,
        c,
        params: dist.params,
        n_effective: dist.total,
        length_warning: dist.length_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TimeSeries;
    use crate::ordinal::ordinal_distribution;
    use approx::assert_abs_diff_eq;

    // 40-digit mpmath evaluations rounded to double, frozen.
    const EXAMPLE_ENTROPY: f64 = 1.054_920_167_986_144_2;
    const EXAMPLE_H: f64 = 0.588_762_155_916_293_9;
    const EXAMPLE_C: f64 = 0.289_954_446_464_618_65;
    const Q0_6: f64 = 2.203_066_987_747_817;
    const Q0_2: f64 = 4.634_745_995_709_609_5;

    fn example() -> Vec<f64> {
        vec![0.4, 0.4, 0.2, 0.0, 0.0, 0.0]
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&[1.0 / 6.0; 6]).unwrap(), 6f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_entropy(&example()).unwrap(), EXAMPLE_ENTROPY, epsilon = 1e-14);
    }

    #[test]
    fn entropy_rejects_bad_vectors() {
        assert!(shannon_entropy(&[0.5, -0.1, 0.6]).is_err());
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy::<f64>(&[]).is_err());
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let p = [0.5 + 4e-10, 0.5];
        let h = normalized_entropy(&p).unwrap();
        assert_abs_diff_eq!(h, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalized_examples() {
        assert_eq!(normalized_entropy(&[0.25; 4]).unwrap(), 1.0);
        assert_eq!(normalized_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(normalized_entropy(&example()).unwrap(), EXAMPLE_H, epsilon = 1e-14);
        assert!(matches!(normalized_entropy(&[1.0]), Err(Error::TooFewStates(1))));
    }

    #[test]
    fn jsd_examples() {
        assert_eq!(jensen_shannon_divergence(&[0.25; 4], &[0.25; 4]).unwrap(), 0.0);
        assert_abs_diff_eq!(jensen_shannon_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(matches!(jensen_shannon_divergence(&[1.0, 0.0], &[1.0, 0.0, 0.0]), Err(Error::LengthMismatch(2, 3))));
    }

    #[test]
    fn jsd_matches_entropy_difference_form() {
        let p = example();
        let q = [0.1, 0.2, 0.3, 0.15, 0.15, 0.1];
        let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a + b) / 2.0).collect();
        let direct = shannon_entropy(&mix).unwrap() - shannon_entropy(&p).unwrap() / 2.0 - shannon_entropy(&q).unwrap() / 2.0;
        assert_abs_diff_eq!(jensen_shannon_divergence(&p, &q).unwrap(), direct, epsilon = 1e-15);
    }

    #[test]
    fn q0_examples() {
        assert_abs_diff_eq!(q0::<f64>(6).unwrap(), Q0_6, epsilon = 1e-14);
        assert_abs_diff_eq!(q0::<f64>(2).unwrap(), Q0_2, epsilon = 1e-14);
        assert!(q0::<f64>(1).is_err());
        for m in [2usize, 6, 24, 120] {
            let mut delta = vec![0.0; m];
            delta[0] = 1.0;
            let uniform = vec![1.0 / m as f64; m];
            let prod = q0::<f64>(m).unwrap() * jensen_shannon_divergence(&delta, &uniform).unwrap();
            assert_abs_diff_eq!(prod, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn complexity_examples() {
        assert_eq!(statistical_complexity(&[1.0 / 6.0; 6]).unwrap(), 0.0);
        assert_eq!(statistical_complexity(&[0.0, 1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(statistical_complexity(&example()).unwrap(), EXAMPLE_C, epsilon = 1e-14);
    }

    #[test]
    fn plane_point_examples() {
        let mono = TimeSeries::new("m", (0..20).map(f64::from).collect()).unwrap();
        let params = EmbeddingParams::new(3, 1).unwrap();
        let q = plane_point(&ordinal_distribution(&mono, params).unwrap()).unwrap();
        assert_eq!((q.h, q.c), (0.0, 0.0));

        let s = TimeSeries::new("x", vec![4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0]).unwrap();
        let q = plane_point(&ordinal_distribution(&s, params).unwrap()).unwrap();
        assert_abs_diff_eq!(q.h, EXAMPLE_H, epsilon = 1e-14);
        assert_abs_diff_eq!(q.c, EXAMPLE_C, epsilon = 1e-14);
        assert_eq!(q.n_effective, 5);
        assert!(q.length_warning);
    }

    #[test]
    fn single_precision_close_to_double() {
        let p32: Vec<f32> = example().into_iter().map(|x| x as f32).collect();
        let c = statistical_complexity(&p32).unwrap();
        assert!((c as f64 - EXAMPLE_C).abs() < 1e-5);
    }
}

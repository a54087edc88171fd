//! Rank correlations between plane quantifiers and per-series attributes.
//!
//! NaN marks a missing observation; pairs with a missing member are dropped
//! before anything else, and `n` counts the complete pairs that remain.
//!
//! Asymptotic p-values are two-sided: Student's t with `n - 2` degrees of
//! freedom for Spearman's rho, the tie-corrected normal approximation for
//! Kendall's tau-b. For `n <= 8` an exact permutation p-value is available
//! through [`PValue::Exact`].

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::infomeasures::PlaneQuantifiers;
use crate::ingest::Panel;
use crate::scalar::{compensated_sum, Float};

pub const MIN_PAIRS: usize = 3;
pub const MAX_EXACT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Method {
    #[default]
    Spearman,
    Kendall,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Spearman => "spearman",
            Method::Kendall => "kendall",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValue {
    #[default]
    Asymptotic,
    /// Enumerates every reordering of `y`; only for `n <= 8`.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult<T> {
    pub method: Method,
    /// Spearman's rho or Kendall's tau-b.
    pub rho: T,
    pub p_value: T,
    pub n: usize,
    pub group: String,
}

impl<T: Float> CorrelationResult<T> {
    pub fn stars(&self) -> &'static str {
        stars(self.p_value.as_f64())
    }
}

/// `**` below 1%, `*` below 5%.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn complete_pairs<T: Float>(x: &[T], y: &[T]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let (a, b): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.as_f64(), b.as_f64()))
        .unzip();
    if a.len() < MIN_PAIRS {
        return Err(Error::TooFewObservations { needed: MIN_PAIRS, found: a.len() });
    }
    Ok((a, b))
}

/// One-based ranks, ties receiving the mean of the ranks they span.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn spearman_coefficient(x: &[f64], y: &[f64]) -> Result<f64> {
    let rx = mid_ranks(x);
    let ry = mid_ranks(y);
    let mean = (x.len() as f64 + 1.0) / 2.0;
    let sxy = compensated_sum(rx.iter().zip(&ry).map(|(a, b)| (a - mean) * (b - mean)));
    let sxx = compensated_sum(rx.iter().map(|a| (a - mean) * (a - mean)));
    let syy = compensated_sum(ry.iter().map(|b| (b - mean) * (b - mean)));
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn spearman_pvalue(rho: f64, n: usize) -> f64 {
    let dof = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return (2.0 / factorial_f64(n)).min(1.0);
    }
    let t = rho * (dof / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, dof).expect("dof >= 1");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Tie summary of one coordinate: sums over tie groups of sizes `t`.
#[derive(Default)]
struct Ties {
    /// sum t(t-1)/2
    pairs: u64,
    /// sum t(t-1)(2t+5)
    v: f64,
    /// sum t(t-1)(t-2)
    w: f64,
}

fn ties_of_sorted(sorted: &[f64]) -> Ties {
    let mut out = Ties::default();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as u64;
        let tf = t as f64;
        out.pairs += t * (t - 1) / 2;
        out.v += tf * (tf - 1.0) * (2.0 * tf + 5.0);
        out.w += tf * (tf - 1.0) * (tf - 2.0);
        start = end;
    }
    out
}

/// Merge sort counting inversions (strictly decreasing pairs).
fn count_inversions(values: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_inversions(&mut values[..mid], buf) + count_inversions(&mut values[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if values[j] < values[i] {
            swaps += (mid - i) as u64;
            buf.push(values[j]);
            j += 1;
        } else {
            buf.push(values[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&values[i..mid]);
    buf.extend_from_slice(&values[j..n]);
    values.copy_from_slice(buf);
    swaps
}

struct KendallParts {
    tau: f64,
    /// concordant minus discordant
    score: f64,
    x_ties: Ties,
    y_ties: Ties,
}

/// Knight's O(n log n) tau-b.
fn kendall_parts(x: &[f64], y: &[f64]) -> Result<KendallParts> {
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let x_ties = ties_of_sorted(&xs);
    let mut joint = 0u64;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end] == pairs[start] {
            end += 1;
        }
        let t = (end - start) as u64;
        joint += t * (t - 1) / 2;
        start = end;
    }

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut scratch = Vec::with_capacity(ys.len());
    let discordant = count_inversions(&mut ys, &mut scratch);
    let y_ties = ties_of_sorted(&ys);

    let total = n * (n - 1) / 2;
    if x_ties.pairs == total {
        return Err(Error::ZeroVariance("x"));
    }
    if y_ties.pairs == total {
        return Err(Error::ZeroVariance("y"));
    }
    let score = total as f64 - x_ties.pairs as f64 - y_ties.pairs as f64 + joint as f64 - 2.0 * discordant as f64;
    let denom = ((total - x_ties.pairs) as f64 * (total - y_ties.pairs) as f64).sqrt();
    Ok(KendallParts { tau: (score / denom).clamp(-1.0, 1.0), score, x_ties, y_ties })
}

fn kendall_pvalue(parts: &KendallParts, n: usize) -> f64 {
    let nf = n as f64;
    let (xt, yt) = (&parts.x_ties, &parts.y_ties);
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let v1 = (2.0 * xt.pairs as f64) * (2.0 * yt.pairs as f64) / (2.0 * nf * (nf - 1.0));
    let v2 = xt.w * yt.w / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    let var = (v0 - xt.v - yt.v) / 18.0 + v1 + v2;
    if var <= 0.0 {
        return 1.0;
    }
    let z = parts.score / var.sqrt();
    libm::erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Fraction of all reorderings of `y` whose statistic is at least as extreme.
fn exact_pvalue(x: &[f64], y: &[f64], observed: f64, stat: impl Fn(&[f64], &[f64]) -> Result<f64>) -> Result<f64> {
    if x.len() > MAX_EXACT {
        return Err(Error::InvalidArgument(format!("exact p-values limited to n <= {MAX_EXACT}")));
    }
    let mut perm = y.to_vec();
    let n = perm.len();
    let mut c = vec![0usize; n];
    let target = observed.abs() - 1e-12;
    let mut hits = 0u64;
    let mut total = 1u64;
    if stat(x, &perm)?.abs() >= target {
        hits += 1;
    }
    // Heap's algorithm
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += 1;
            if stat(x, &perm)?.abs() >= target {
                hits += 1;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

pub fn spearman<T: Float>(x: &[T], y: &[T]) -> Result<CorrelationResult<T>> {
    spearman_with(x, y, PValue::Asymptotic)
}

pub fn spearman_with<T: Float>(x: &[T], y: &[T], pvalue: PValue) -> Result<CorrelationResult<T>> {
    let (a, b) = complete_pairs(x, y)?;
    let rho = spearman_coefficient(&a, &b)?;
    let p = match pvalue {
        PValue::Asymptotic => spearman_pvalue(rho, a.len()),
        PValue::Exact => exact_pvalue(&a, &b, rho, spearman_coefficient)?,
    };
    Ok(CorrelationResult { method: Method::Spearman, rho: T::of(rho), p_value: T::of(p), n: a.len(), group: String::new() })
}

pub fn kendall<T: Float>(x: &[T], y: &[T]) -> Result<CorrelationResult<T>> {
    kendall_with(x, y, PValue::Asymptotic)
}

pub fn kendall_with<T: Float>(x: &[T], y: &[T], pvalue: PValue) -> Result<CorrelationResult<T>> {
    let (a, b) = complete_pairs(x, y)?;
    let parts = kendall_parts(&a, &b)?;
    let p = match pvalue {
        PValue::Asymptotic => kendall_pvalue(&parts, a.len()),
        PValue::Exact => exact_pvalue(&a, &b, parts.tau, |u, v| kendall_parts(u, v).map(|k| k.tau))?,
    };
    Ok(CorrelationResult { method: Method::Kendall, rho: T::of(parts.tau), p_value: T::of(p), n: a.len(), group: String::new() })
}

pub fn correlate<T: Float>(method: Method, x: &[T], y: &[T]) -> Result<CorrelationResult<T>> {
    match method {
        Method::Spearman => spearman(x, y),
        Method::Kendall => kendall(x, y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellStatus {
    Ok,
    /// Fewer than three complete pairs.
    Insufficient,
    /// A coordinate has no rank variation.
    Degenerate,
}

impl std::fmt::Display for CellStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CellStatus::Ok => "ok",
            CellStatus::Insufficient => "insufficient",
            CellStatus::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryCell<T> {
    pub group: String,
    pub dim: usize,
    pub attribute: String,
    /// Complete pairs in this cell.
    pub n: usize,
    pub status: CellStatus,
    /// Present only when `status` is `Ok`.
    pub result: Option<CorrelationResult<T>>,
}

/// Plane points per embedding dimension, keyed by series name.
pub type QuantifierTable<T> = BTreeMap<usize, BTreeMap<String, PlaneQuantifiers<T>>>;

/// Correlates entropy against every attribute, for every group and dimension.
///
/// Cells are ordered by group, then dimension, then attribute column. A
/// series without a quantifier at some dimension counts as a missing pair.
pub fn correlation_battery<T: Float>(
    panel: &Panel<T>,
    quantifiers: &QuantifierTable<T>,
    groups: &[(String, Vec<String>)],
    method: Method,
) -> Result<Vec<BatteryCell<T>>> {
    let known: HashSet<&str> = panel.series.iter().map(|s| s.name.as_str()).collect();
    for (_, members) in groups {
        if let Some(m) = members.iter().find(|m| !known.contains(m.as_str())) {
            return Err(Error::UnknownSeries(m.clone()));
        }
    }
    let attrs = &panel.attributes;
    let mut cells = Vec::new();
    for (group, members) in groups {
        for (&dim, table) in quantifiers {
            let h: Vec<T> = members.iter().map(|m| table.get(m).map_or(T::nan(), |q| q.h)).collect();
            for attribute in &attrs.names {
                let a: Vec<T> = members.iter().map(|m| attrs.get(m, attribute).unwrap_or(T::nan())).collect();
                let n = h.iter().zip(&a).filter(|(x, y)| x.is_finite() && y.is_finite()).count();
                let (status, result) = match correlate(method, &h, &a) {
                    Ok(mut r) => {
                        r.group = group.clone();
                        (CellStatus::Ok, Some(r))
                    }
                    Err(Error::TooFewObservations { .. }) => (CellStatus::Insufficient, None),
                    Err(Error::ZeroVariance(_)) => (CellStatus::Degenerate, None),
                    Err(e) => return Err(e),
                };
                cells.push(BatteryCell { group: group.clone(), dim, attribute: attribute.clone(), n, status, result });
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spearman_perfect() {
        let r = spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(r.rho, 1.0);
        assert_abs_diff_eq!(r.p_value, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap().rho, -1.0);
    }

    #[test]
    fn spearman_with_tie() {
        // ranks of y: 1.5 1.5 3 4 5; textbook Pearson on ranks
        let r = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 1.0, 3.0, 4.0, 5.0]).unwrap();
        assert_abs_diff_eq!(r.rho, 9.5 / (10.0f64 * 9.5).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn kendall_basics() {
        let x = [3.0, 1.0, 4.0, 1.5, 5.0, 9.0];
        assert_eq!(kendall(&x, &x).unwrap().rho, 1.0);
        let rev: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(kendall(&x, &rev).unwrap().rho, -1.0);
    }

    #[test]
    fn missing_pairs_dropped() {
        let r = spearman(&[1.0, 2.0, f64::NAN, 4.0], &[2.0, 4.0, 5.0, 8.0]).unwrap();
        assert_eq!(r.n, 3);
        assert!(matches!(spearman(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]), Err(Error::TooFewObservations { found: 2, .. })));
    }

    #[test]
    fn zero_variance() {
        assert!(matches!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ZeroVariance("x"))));
        assert!(matches!(kendall(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]), Err(Error::ZeroVariance("y"))));
    }

    #[test]
    fn pvalue_reference_numbers() {
        // scipy.stats.spearmanr / kendalltau(method="asymptotic")
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0, 5.0, 6.0, 10.0, 8.0, 9.0];
        let s = spearman(&x, &y).unwrap();
        assert_abs_diff_eq!(s.rho, 0.903_030_303_030_302_8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.p_value, 0.000_343_612_197_763_282_2, epsilon = 1e-12);
        let k = kendall(&x, &y).unwrap();
        assert_abs_diff_eq!(k.rho, 0.733_333_333_333_333_3, epsilon = 1e-12);
        assert_abs_diff_eq!(k.p_value, 0.003_161_222_020_906_956_7, epsilon = 1e-12);

        let x = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 4.0, 5.0];
        let y = [3.0, 1.0, 2.0, 2.0, 5.0, 4.0, 6.0, 6.0];
        let s = spearman(&x, &y).unwrap();
        assert_abs_diff_eq!(s.rho, 0.788_956_854_059_301_8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.p_value, 0.019_936_718_107_142_433, epsilon = 1e-10);
        let k = kendall(&x, &y).unwrap();
        assert_abs_diff_eq!(k.rho, 0.640_512_615_220_348_6, epsilon = 1e-12);
        assert_abs_diff_eq!(k.p_value, 0.037_172_567_869_577_83, epsilon = 1e-12);
    }

    #[test]
    fn exact_pvalue_perfect_order() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = spearman_with(&x, &x, PValue::Exact).unwrap();
        assert_abs_diff_eq!(r.p_value, 2.0 / 120.0, epsilon = 1e-15);
        let r = kendall_with(&x, &x, PValue::Exact).unwrap();
        assert_abs_diff_eq!(r.p_value, 2.0 / 120.0, epsilon = 1e-15);
        let long: Vec<f64> = (0..9).map(f64::from).collect();
        assert!(spearman_with(&long, &long, PValue::Exact).is_err());
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.002), "**");
        assert_eq!(stars(0.023), "*");
        assert_eq!(stars(0.05), "");
    }
}

//! Efficiency ranking by distance to the fully random point `(H, C) = (1, 0)`,
//! and per-group summaries.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::infomeasures::PlaneQuantifiers;
use crate::ordinal::EmbeddingParams;
use crate::scalar::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Metric {
    /// `sqrt((1 - h)^2 + c^2)`.
    #[default]
    Euclidean,
    /// `1 - h`.
    EntropyOnly,
}

impl Metric {
    pub fn distance<T: Float>(self, q: &PlaneQuantifiers<T>) -> T {
        let dh = T::one() - q.h;
        match self {
            Metric::Euclidean => dh.hypot(q.c),
            Metric::EntropyOnly => dh.abs(),
        }
    }
}

/// Euclidean distance to the ideal random point.
pub fn efficiency_distance<T: Float>(q: &PlaneQuantifiers<T>) -> T {
    Metric::Euclidean.distance(q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry<T> {
    pub name: String,
    pub h: T,
    pub c: T,
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRanking<T> {
    /// Most efficient first; equal distances ordered by name.
    pub entries: Vec<RankEntry<T>>,
    pub params: EmbeddingParams,
    pub metric: Metric,
}

pub fn rank_series<T: Float>(points: &[(String, PlaneQuantifiers<T>)]) -> Result<EfficiencyRanking<T>> {
    rank_series_with(points, Metric::Euclidean)
}

pub fn rank_series_with<T: Float>(points: &[(String, PlaneQuantifiers<T>)], metric: Metric) -> Result<EfficiencyRanking<T>> {
    let (_, first) = points.first().ok_or_else(|| Error::InvalidArgument("nothing to rank".into()))?;
    let params = first.params;
    if let Some((_, q)) = points.iter().find(|(_, q)| q.params != params) {
        return Err(Error::MixedParams(params.to_string(), q.params.to_string()));
    }
    let mut entries: Vec<RankEntry<T>> = points
        .iter()
        .map(|(name, q)| RankEntry { name: name.clone(), h: q.h, c: q.c, distance: metric.distance(q) })
        .collect();
    entries.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(EfficiencyRanking { entries, params, metric })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary<T> {
    pub group: String,
    pub mean_h: T,
    pub std_h: T,
    pub mean_c: T,
    pub std_c: T,
    pub n: usize,
}

#[derive(Default)]
struct Moments<T> {
    n: usize,
    mean: T,
    m2: T,
    min: T,
    max: T,
}

impl<T: Float> Moments<T> {
    fn push(&mut self, x: T) {
        if self.n == 0 {
            self.min = x;
            self.max = x;
        }
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / T::of_usize(self.n);
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn mean(&self) -> T {
        self.mean.max(self.min).min(self.max)
    }

    /// Sample standard deviation, zero for a single observation.
    fn std(&self) -> T {
        if self.n < 2 {
            T::zero()
        } else {
            (self.m2.max(T::zero()) / T::of_usize(self.n - 1)).sqrt()
        }
    }
}

/// Mean and sample standard deviation of `h` and `c` per label, labels in
/// order of first appearance among `points`.
pub fn group_summary<T: Float>(
    points: &[(String, PlaneQuantifiers<T>)],
    labels: &HashMap<String, String>,
) -> Result<Vec<GroupSummary<T>>> {
    let mut order: Vec<&str> = Vec::new();
    let mut acc: HashMap<&str, (Moments<T>, Moments<T>)> = HashMap::new();
    for (name, q) in points {
        let label = labels.get(name).ok_or_else(|| Error::UnknownLabel(name.clone()))?;
        let entry = acc.entry(label.as_str()).or_insert_with(|| {
            order.push(label.as_str());
            Default::default()
        });
        entry.0.push(q.h);
        entry.1.push(q.c);
    }
    Ok(order
        .into_iter()
        .map(|label| {
            let (h, c) = &acc[label];
            GroupSummary {
                group: label.to_string(),
                mean_h: h.mean(),
                std_h: h.std(),
                mean_c: c.mean(),
                std_c: c.std(),
                n: h.n,
            }
        })
        .collect())
}

//! Permutation-information-theory quantifiers for panels of time series.
//!
//! The crate estimates Bandt-Pompe ordinal-pattern distributions, turns them
//! into a point on the complexity-entropy causality plane (normalized
//! permutation entropy against Jensen-Shannon statistical complexity), and
//! provides the tooling around that point: the exact complexity envelope,
//! shuffled-surrogate tests, efficiency rankings and rank correlations with
//! external per-series attributes.
//!
//! All numeric code is generic over [`Float`], implemented for `f32` and
//! `f64`. The aliases at the crate root pin the common `f64` instantiations.
//!
//! ```
//! use cecp::{ordinal_distribution, plane_point, EmbeddingParams, TimeSeries};
//!
//! let series = TimeSeries::<f64>::new("x", vec![4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0]).unwrap();
//! let dist = ordinal_distribution(&series, EmbeddingParams::new(3, 1).unwrap()).unwrap();
//! let point = plane_point(&dist).unwrap();
//! assert!((point.h - 0.588_762_155_916_294).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod error;
pub mod infomeasures;
pub mod ingest;
pub mod ordinal;
pub mod ranking;
pub mod scalar;
pub mod stats;
pub mod surrogate;
pub mod synthetic;

pub use bounds::{cached_envelope, contains, envelope, exact_bounds, ComplexityEnvelope, EnvelopeSample, FamilyPoint};
pub use error::{Error, Result};
pub use infomeasures::{
    jensen_shannon_divergence, normalized_entropy, plane_point, q0, shannon_entropy,
    statistical_complexity, PlaneQuantifiers,
};
pub use ingest::{clean_series, load_panel, Layout, MissingPolicy, Panel, RawSeries, TimeSeries};
pub use ordinal::{
    extract_pattern, ordinal_distribution, pattern_rank, pattern_unrank, EmbeddingParams,
    OrdinalDistribution, OrdinalPattern,
};
pub use ranking::{efficiency_distance, group_summary, rank_series, EfficiencyRanking, GroupSummary, Metric};
pub use scalar::Float;
pub use stats::{correlation_battery, kendall, spearman, CorrelationResult, Method};
pub use surrogate::{shuffle_series, surrogate_test, SurrogateReport};

/// Double-precision time series.
pub type TimeSeries64 = ingest::TimeSeries<f64>;
/// Double-precision panel.
pub type Panel64 = ingest::Panel<f64>;
/// Double-precision ordinal distribution.
pub type OrdinalDistribution64 = ordinal::OrdinalDistribution<f64>;
/// Double-precision plane point.
pub type PlaneQuantifiers64 = infomeasures::PlaneQuantifiers<f64>;
/// Double-precision complexity envelope.
pub type ComplexityEnvelope64 = bounds::ComplexityEnvelope<f64>;
/// Double-precision correlation result.
pub type CorrelationResult64 = stats::CorrelationResult<f64>;
/// Double-precision surrogate report.
pub type SurrogateReport64 = surrogate::SurrogateReport<f64>;
/// Double-precision efficiency ranking.
pub type EfficiencyRanking64 = ranking::EfficiencyRanking<f64>;
/// Double-precision group summary.
pub type GroupSummary64 = ranking::GroupSummary<f64>;

/// Single-precision time series.
pub type TimeSeries32 = ingest::TimeSeries<f32>;
/// Single-precision plane point.
pub type PlaneQuantifiers32 = infomeasures::PlaneQuantifiers<f32>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    InconsistentColumns { line: u64, expected: usize, found: usize },

    #[error("line {line}, column `{column}`: cannot parse `{value}` as a finite number")]
    Parse { line: u64, column: String, value: String },

    #[error("duplicate series name `{0}`")]
    DuplicateSeries(String),

    #[error("no data rows")]
    NoData,

    #[error("series `{series}` has a missing value at index {index}")]
    MissingValue { series: String, index: usize },

    #[error("series `{0}` is empty")]
    EmptySeries(String),

    #[error("series `{series}` has a non-finite value at index {index}")]
    NonFinite { series: String, index: usize },

    #[error("labels have length {labels}, values have length {values}")]
    LabelLength { labels: usize, values: usize },

    #[error("invalid embedding parameters: {0}")]
    InvalidParams(String),

    #[error("window has length {found}, expected {expected}")]
    WindowLength { expected: usize, found: usize },

    #[error("not a permutation of 0..{len}: {perm:?}")]
    InvalidPermutation { len: usize, perm: Vec<usize> },

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("series `{series}` has {len} values, at least {needed} required")]
    SeriesTooShort { series: String, len: usize, needed: usize },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("at least two states required, got {0}")]
    TooFewStates(usize),

    #[error("at least {needed} complete pairs required, got {found}")]
    TooFewObservations { needed: usize, found: usize },

    #[error("zero rank variance in `{0}`")]
    ZeroVariance(&'static str),

    #[error("mixed embedding parameters: {0} vs {1}")]
    MixedParams(String, String),

    #[error("unknown series `{0}`")]
    UnknownSeries(String),

    #[error("no group label for series `{0}`")]
    UnknownLabel(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.kind() {
            csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::InconsistentColumns {
                line: pos.as_ref().map(|p| p.line()).unwrap_or(0),
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ if err.is_io_error() => match err.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Csv(format!("{other:?}")),
            },
            _ => Error::Csv(err.to_string()),
        }
    }
}

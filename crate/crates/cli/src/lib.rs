//! Batch commands behind the `cecp` binary.
//!
//! Each command reads its inputs, computes in parallel over series, and
//! writes its tables in input order, so identical inputs and configuration
//! give byte-identical files.

pub mod output;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use cecp::bounds::{cached_envelope, DEFAULT_RESOLUTION};
use cecp::ingest::{load_attributes, load_groups, LoadOptions};
use cecp::ordinal::{factorial, MAX_DIM};
use cecp::ranking::{rank_series_with, Metric};
use cecp::stats::{correlation_battery, stars, CellStatus, Method, QuantifierTable};
use cecp::surrogate::{derive_seed, surrogate_test};
use cecp::{
    clean_series, group_summary, load_panel, ordinal_distribution, plane_point, EmbeddingParams, Error, Layout,
    MissingPolicy, Panel64, PlaneQuantifiers64, TimeSeries64,
};

pub use output::{Cell, Format, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const GROUP_ALL: &str = "all";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub layout: Layout,
    pub delimiter: u8,
    pub missing: MissingPolicy,
    pub dims: Vec<usize>,
    pub tau: usize,
    pub shuffles: usize,
    pub seed: Option<u64>,
    pub groups: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
    pub out: PathBuf,
    pub format: Format,
    pub resolution: usize,
    /// Envelope state count; overrides `dims` for `envelope`.
    pub states: Option<usize>,
    pub metric: Metric,
    pub method: Method,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            layout: Layout::Wide,
            delimiter: b',',
            missing: MissingPolicy::Drop,
            dims: vec![3, 4, 5],
            tau: 1,
            shuffles: 1,
            seed: None,
            groups: None,
            attributes: None,
            out: PathBuf::from("."),
            format: Format::Csv,
            resolution: DEFAULT_RESOLUTION,
            states: None,
            metric: Metric::Euclidean,
            method: Method::Spearman,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            bail!("at least one embedding dimension required");
        }
        if let Some(d) = self.dims.iter().find(|d| !(2..=MAX_DIM).contains(*d)) {
            bail!("embedding dimension {d} outside 2..={MAX_DIM}");
        }
        if self.tau < 1 {
            bail!("delay must be at least 1");
        }
        Ok(())
    }

    fn params(&self) -> Result<Vec<EmbeddingParams>> {
        self.validate()?;
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        dims.dedup();
        Ok(dims.into_iter().map(|d| EmbeddingParams::new(d, self.tau)).collect::<Result<_, _>>()?)
    }

    fn meta(&self, command: &str, dims: &str) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("cecp {VERSION} command={command} D={dims} tau={} seed={seed}", self.tau)
    }
}

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some series were skipped.
    Partial,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Partial => 1,
        }
    }

    fn from_skipped(skipped: bool) -> Self {
        if skipped {
            Outcome::Partial
        } else {
            Outcome::Success
        }
    }
}

pub const EXIT_FATAL: i32 = 2;

fn load_inputs(config: &RunConfig) -> Result<(Panel64, Vec<TimeSeries64>)> {
    if config.inputs.is_empty() {
        bail!("no input files given");
    }
    let options = LoadOptions { delimiter: config.delimiter, layout: config.layout };
    let mut panel: Option<Panel64> = None;
    for path in &config.inputs {
        let next: Panel64 = load_panel(path, &options).with_context(|| format!("loading {}", path.display()))?;
        match &mut panel {
            None => panel = Some(next),
            Some(p) => {
                for s in next.series {
                    if p.get(&s.name).is_some() {
                        return Err(Error::DuplicateSeries(s.name)).with_context(|| format!("loading {}", path.display()));
                    }
                    p.series.push(s);
                }
            }
        }
    }
    let mut panel = panel.expect("at least one input");
    if let Some(path) = &config.attributes {
        let attrs = load_attributes(path, config.delimiter).with_context(|| format!("loading {}", path.display()))?;
        panel.attach_attributes(attrs);
        for name in &panel.orphaned {
            eprintln!("warning: attribute row `{name}` matches no series");
        }
    }
    let series = panel
        .series
        .iter()
        .map(|s| clean_series(s, config.missing))
        .collect::<Result<Vec<_>, _>>()
        .context("cleaning series")?;
    Ok((panel, series))
}

fn dims_label(params: &[EmbeddingParams]) -> String {
    params.iter().map(|p| p.dim.to_string()).collect::<Vec<_>>().join(",")
}

/// Plane points per series for one parameter set; `Err` holds the skip reason.
fn points_for(series: &[TimeSeries64], params: EmbeddingParams) -> Vec<Result<PlaneQuantifiers64, Error>> {
    series.par_iter().map(|s| ordinal_distribution(s, params).and_then(|d| plane_point(&d))).collect()
}

fn read_group_labels(config: &RunConfig, known: &HashSet<&str>) -> Result<Vec<(String, String)>> {
    let Some(path) = &config.groups else { return Ok(Vec::new()) };
    let groups = load_groups(path, config.delimiter).with_context(|| format!("loading {}", path.display()))?;
    if let Some((name, _)) = groups.iter().find(|(n, _)| !known.contains(n.as_str())) {
        return Err(Error::UnknownSeries(name.clone())).with_context(|| format!("loading {}", path.display()));
    }
    Ok(groups)
}

/// `points_D{d}`, `ranking_D{d}` and, with a groups file, `summary_D{d}`.
pub fn cmd_analyze(config: &RunConfig) -> Result<Outcome> {
    let params = config.params()?;
    let (panel, series) = load_inputs(config)?;
    let known: HashSet<&str> = panel.series.iter().map(|s| s.name.as_str()).collect();
    let groups = read_group_labels(config, &known)?;
    std::fs::create_dir_all(&config.out)?;
    let mut skipped = false;

    for p in params {
        let meta = config.meta("analyze", &p.dim.to_string());
        let results = points_for(&series, p);
        let mut table = Table::new(meta.clone(), &["name", "h", "c", "distance", "n_effective", "length_warning"]);
        let mut ok = Vec::new();
        for (s, r) in series.iter().zip(results) {
            match r {
                Ok(q) => {
                    table.push(vec![
                        s.name().into(),
                        q.h.into(),
                        q.c.into(),
                        config.metric.distance(&q).into(),
                        q.n_effective.into(),
                        q.length_warning.into(),
                    ]);
                    ok.push((s.name().to_string(), q));
                }
                Err(e) => {
                    eprintln!("warning: D={} skipping `{}`: {e}", p.dim, s.name());
                    skipped = true;
                    table.push(vec![s.name().into(), Cell::Empty, Cell::Empty, Cell::Empty, 0usize.into(), true.into()]);
                }
            }
        }
        table.save(&config.out, &format!("points_D{}", p.dim), config.format)?;

        let mut ranking = Table::new(meta.clone(), &["rank", "name", "h", "c", "distance"]);
        if !ok.is_empty() {
            for (i, e) in rank_series_with(&ok, config.metric)?.entries.into_iter().enumerate() {
                ranking.push(vec![(i + 1).into(), e.name.into(), e.h.into(), e.c.into(), e.distance.into()]);
            }
        }
        ranking.save(&config.out, &format!("ranking_D{}", p.dim), config.format)?;

        if !groups.is_empty() {
            let mut summary = Table::new(meta, &["group", "mean_h", "std_h", "mean_c", "std_c", "n"]);
            let mut labels: HashMap<String, String> = ok.iter().map(|(n, _)| (n.clone(), GROUP_ALL.to_string())).collect();
            let mut rows = group_summary(&ok, &labels)?;
            labels = groups.iter().cloned().collect();
            let labelled: Vec<_> = ok.iter().filter(|(n, _)| labels.contains_key(n)).cloned().collect();
            rows.extend(group_summary(&labelled, &labels)?);
            for g in rows {
                summary.push(vec![g.group.into(), g.mean_h.into(), g.std_h.into(), g.mean_c.into(), g.std_c.into(), g.n.into()]);
            }
            summary.save(&config.out, &format!("summary_D{}", p.dim), config.format)?;
        }
    }
    Ok(Outcome::from_skipped(skipped))
}

/// `envelope_M{m}` (with `states`) or `envelope_D{d}` per dimension.
pub fn cmd_envelope(config: &RunConfig) -> Result<Outcome> {
    let targets: Vec<(String, usize)> = match config.states {
        Some(m) => vec![(format!("envelope_M{m}"), m)],
        None => config.params()?.into_iter().map(|p| (format!("envelope_D{}", p.dim), factorial(p.dim))).collect(),
    };
    std::fs::create_dir_all(&config.out)?;
    for (stem, m) in targets {
        let env = cached_envelope::<f64>(m, config.resolution)?;
        let meta = format!("cecp {VERSION} command=envelope M={m} resolution={}", config.resolution);
        let mut table = Table::new(meta, &["h", "c_min", "c_max"]);
        for s in &env.samples {
            table.push(vec![s.h.into(), s.c_min.into(), s.c_max.into()]);
        }
        table.save(&config.out, &stem, config.format)?;
    }
    Ok(Outcome::Success)
}

/// `shuffle_D{d}`: one original row and `shuffles` surrogate rows per series.
///
/// Series `i` (input order) uses master seed `derive_seed(seed, i)`, the same
/// for every dimension, so each dimension sees the same shuffled sequences.
pub fn cmd_shuffle_test(config: &RunConfig) -> Result<Outcome> {
    let Some(seed) = config.seed else { bail!("shuffle-test requires --seed") };
    if config.shuffles == 0 {
        bail!("--shuffles must be at least 1");
    }
    let params = config.params()?;
    let (_, series) = load_inputs(config)?;
    std::fs::create_dir_all(&config.out)?;
    let mut skipped = false;
    for p in params {
        let reports: Vec<_> = series
            .par_iter()
            .enumerate()
            .map(|(i, s)| surrogate_test(s, p, config.shuffles, derive_seed(seed, i as u64)))
            .collect();
        let mut table = Table::new(config.meta("shuffle-test", &p.dim.to_string()), &["name", "role", "shuffle", "h", "c", "distance"]);
        for (s, r) in series.iter().zip(reports) {
            match r {
                Ok(report) => {
                    let row = |role: &str, idx: Option<usize>, q: &PlaneQuantifiers64| {
                        vec![s.name().into(), role.into(), idx.into(), q.h.into(), q.c.into(), config.metric.distance(q).into()]
                    };
                    table.push(row("original", None, &report.original));
                    for (j, q) in report.surrogates.iter().enumerate() {
                        table.push(row("surrogate", Some(j), q));
                    }
                }
                Err(e) => {
                    eprintln!("warning: D={} skipping `{}`: {e}", p.dim, s.name());
                    skipped = true;
                }
            }
        }
        table.save(&config.out, &format!("shuffle_D{}", p.dim), config.format)?;
    }
    Ok(Outcome::from_skipped(skipped))
}

/// `correlations`: one row per (group, D, attribute).
pub fn cmd_correlate(config: &RunConfig) -> Result<Outcome> {
    if config.attributes.is_none() {
        bail!("correlate requires --attributes");
    }
    let params = config.params()?;
    let (panel, series) = load_inputs(config)?;
    let known: HashSet<&str> = panel.series.iter().map(|s| s.name.as_str()).collect();
    let labels = read_group_labels(config, &known)?;

    let mut groups: Vec<(String, Vec<String>)> = vec![(GROUP_ALL.into(), series.iter().map(|s| s.name().to_string()).collect())];
    for (name, label) in labels {
        match groups.iter_mut().skip(1).find(|(g, _)| *g == label) {
            Some((_, members)) => members.push(name),
            None => groups.push((label, vec![name])),
        }
    }

    let mut table_q: QuantifierTable<f64> = BTreeMap::new();
    let mut skipped = false;
    for &p in &params {
        let mut row = BTreeMap::new();
        for (s, r) in series.iter().zip(points_for(&series, p)) {
            match r {
                Ok(q) => {
                    row.insert(s.name().to_string(), q);
                }
                Err(e) => {
                    eprintln!("warning: D={} skipping `{}`: {e}", p.dim, s.name());
                    skipped = true;
                }
            }
        }
        table_q.insert(p.dim, row);
    }

    let cells = correlation_battery(&panel, &table_q, &groups, config.method)?;
    let meta = format!("{} method={}", config.meta("correlate", &dims_label(&params)), config.method);
    let mut table = Table::new(meta, &["group", "D", "attribute", "rho", "p_value", "n", "stars", "status"]);
    for cell in cells {
        let (rho, p, st) = match &cell.result {
            Some(r) => (Cell::from(r.rho), Cell::from(r.p_value), stars(r.p_value)),
            None => (Cell::Empty, Cell::Empty, ""),
        };
        table.push(vec![
            cell.group.into(),
            cell.dim.into(),
            cell.attribute.into(),
            rho,
            p,
            cell.n.into(),
            st.into(),
            cell.status.to_string().into(),
        ]);
        debug_assert!(cell.status == CellStatus::Ok || cell.result.is_none());
    }
    std::fs::create_dir_all(&config.out)?;
    table.save(&config.out, "correlations", config.format)?;
    Ok(Outcome::from_skipped(skipped))
}

/// Runs `command` and maps the result onto the exit-code contract
/// (0 success, 1 partial, 2 fatal), printing fatal diagnostics to stderr.
pub fn run_to_exit_code(command: impl FnOnce() -> Result<Outcome>) -> i32 {
    match command() {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FATAL
        }
    }
}

/// Output file path for a command's table.
pub fn output_path(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(format!("{stem}.{}", format.extension()))
}

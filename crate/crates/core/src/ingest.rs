//! Loading and cleaning panels of time series from delimited text.
//!
//! Two layouts are understood, both with a mandatory header row:
//!
//! * **wide**: first column holds a date label, every other column is one series;
//! * **long**: three columns `series,date,value`, one observation per row.
//!
//! Empty cells and the tokens `NA` / `NaN` (any case) are missing values; any
//! other non-numeric cell is a parse error. Dates are kept as opaque strings.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Float;

/// A named series of finite observations with optional date labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries<T> {
    name: String,
    values: Vec<T>,
    labels: Option<Vec<String>>,
}

impl<T: Float> TimeSeries<T> {
    pub fn new(name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        Self::build(name.into(), values, None)
    }

    pub fn with_labels(name: impl Into<String>, values: Vec<T>, labels: Vec<String>) -> Result<Self> {
        Self::build(name.into(), values, Some(labels))
    }

    fn build(name: String, values: Vec<T>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries(name));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { series: name, index });
        }
        if let Some(l) = &labels {
            if l.len() != values.len() {
                return Err(Error::LabelLength { labels: l.len(), values: values.len() });
            }
        }
        Ok(Self { name, values, labels })
    }

    /// Same labels, new values. Used by transforms that preserve length.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::build(self.name.clone(), self.values.iter().map(|&v| f(v)).collect(), self.labels.clone())
    }

    pub(crate) fn renamed_with_values(&self, name: String, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { name, values, labels: self.labels.clone() }
    }
}

impl<T> TimeSeries<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A series as read from disk, before the missing-value policy is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries<T> {
    pub name: String,
    pub values: Vec<Option<T>>,
    pub labels: Option<Vec<String>>,
}

impl<T> RawSeries<T> {
    pub fn missing_indices(&self) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, v)| v.is_none()).map(|(i, _)| i).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    Wide,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Drop,
    Fail,
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub layout: Layout,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { delimiter: b',', layout: Layout::Wide }
    }
}

/// Named per-series attributes, e.g. accounting ratios.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Attributes<T> {
    /// Attribute names in header order.
    pub names: Vec<String>,
    /// Series name to one value per attribute; `None` when the cell was missing.
    pub rows: BTreeMap<String, Vec<Option<T>>>,
}

impl<T: Copy> Attributes<T> {
    pub fn get(&self, series: &str, attribute: &str) -> Option<T> {
        let col = self.names.iter().position(|n| n == attribute)?;
        self.rows.get(series).and_then(|row| row[col])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel<T> {
    pub series: Vec<RawSeries<T>>,
    pub attributes: Attributes<T>,
    /// Attribute rows naming no series in the panel.
    pub orphaned: Vec<String>,
}

impl<T: Float> Panel<T> {
    pub fn get(&self, name: &str) -> Option<&RawSeries<T>> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Joins attributes by series name; unmatched attribute rows are recorded in `orphaned`.
    pub fn attach_attributes(&mut self, attributes: Attributes<T>) {
        let known: HashSet<&str> = self.series.iter().map(|s| s.name.as_str()).collect();
        self.orphaned = attributes.rows.keys().filter(|k| !known.contains(k.as_str())).cloned().collect();
        self.attributes = attributes;
    }

    pub fn clean(&self, policy: MissingPolicy) -> Result<Vec<TimeSeries<T>>> {
        self.series.iter().map(|s| clean_series(s, policy)).collect()
    }
}

fn parse_cell<T: Float>(cell: &str, line: u64, column: &str) -> Result<Option<T>> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    match cell.parse::<T>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::Parse { line, column: column.to_string(), value: cell.to_string() }),
    }
}

fn csv_reader<R: Read>(reader: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Loads a panel from a file on disk.
pub fn load_panel<T: Float>(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Panel<T>> {
    read_panel(File::open(path)?, options)
}

/// Loads a panel from any reader.
pub fn read_panel<T: Float, R: Read>(reader: R, options: &LoadOptions) -> Result<Panel<T>> {
    let mut rdr = csv_reader(reader, options.delimiter);
    let series = match options.layout {
        Layout::Wide => read_wide(&mut rdr)?,
        Layout::Long => read_long(&mut rdr)?,
    };
    Ok(Panel { series, attributes: Attributes::default(), orphaned: Vec::new() })
}

fn read_wide<T: Float, R: Read>(rdr: &mut csv::Reader<R>) -> Result<Vec<RawSeries<T>>> {
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Csv("wide layout needs a date column and at least one series column".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateSeries(n.clone()));
        }
    }
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<Option<T>>> = vec![Vec::new(); names.len()];
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        labels.push(record[0].to_string());
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse_cell(&record[j + 1], line, &names[j])?);
        }
    }
    if labels.is_empty() {
        return Err(Error::NoData);
    }
    Ok(names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| RawSeries { name, values, labels: Some(labels.clone()) })
        .collect())
}

fn read_long<T: Float, R: Read>(rdr: &mut csv::Reader<R>) -> Result<Vec<RawSeries<T>>> {
    let header = rdr.headers()?.clone();
    if header.len() != 3 {
        return Err(Error::Csv(format!("long layout needs columns series,date,value; found {} columns", header.len())));
    }
    let value_column = header[2].to_string();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<RawSeries<T>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let name = &record[0];
        let slot = *index.entry(name.to_string()).or_insert_with(|| {
            out.push(RawSeries { name: name.to_string(), values: Vec::new(), labels: Some(Vec::new()) });
            out.len() - 1
        });
        let value = parse_cell(&record[2], line, &value_column)?;
        let s = &mut out[slot];
        s.values.push(value);
        s.labels.as_mut().expect("long layout always carries labels").push(record[1].to_string());
    }
    if out.is_empty() {
        return Err(Error::NoData);
    }
    Ok(out)
}

/// Applies the missing-value policy, producing a series that satisfies the
/// [`TimeSeries`] invariants.
pub fn clean_series<T: Float>(raw: &RawSeries<T>, policy: MissingPolicy) -> Result<TimeSeries<T>> {
    if raw.values.is_empty() {
        return Err(Error::EmptySeries(raw.name.clone()));
    }
    if policy == MissingPolicy::Fail {
        if let Some(index) = raw.values.iter().position(Option::is_none) {
            return Err(Error::MissingValue { series: raw.name.clone(), index });
        }
    }
    let keep: Vec<usize> = (0..raw.values.len()).filter(|&i| raw.values[i].is_some()).collect();
    if keep.is_empty() {
        return Err(Error::EmptySeries(raw.name.clone()));
    }
    let values = keep.iter().map(|&i| raw.values[i].expect("filtered")).collect();
    match &raw.labels {
        Some(labels) => {
            TimeSeries::with_labels(raw.name.clone(), values, keep.iter().map(|&i| labels[i].clone()).collect())
        }
        None => TimeSeries::new(raw.name.clone(), values),
    }
}

/// Writes series in wide layout. Shorter series are padded with empty cells;
/// the date column comes from the longest labelled series, or a row index.
pub fn write_wide_csv<T: Float, W: Write>(series: &[TimeSeries<T>], writer: W, delimiter: u8) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    let rows = series.iter().map(TimeSeries::len).max().unwrap_or(0);
    let dates = series.iter().filter(|s| s.len() == rows).find_map(|s| s.labels());
    let mut header = vec!["date".to_string()];
    header.extend(series.iter().map(|s| s.name().to_string()));
    wtr.write_record(&header)?;
    for i in 0..rows {
        let mut record = vec![dates.map_or_else(|| i.to_string(), |d| d[i].clone())];
        record.extend(series.iter().map(|s| s.values().get(i).map_or_else(String::new, |v| v.to_string())));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads an attribute table (`name,attr1,attr2,...`, header mandatory).
pub fn load_attributes<T: Float>(path: impl AsRef<Path>, delimiter: u8) -> Result<Attributes<T>> {
    read_attributes(File::open(path)?, delimiter)
}

pub fn read_attributes<T: Float, R: Read>(reader: R, delimiter: u8) -> Result<Attributes<T>> {
    let mut rdr = csv_reader(reader, delimiter);
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Csv("attribute file needs a name column and at least one attribute".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let values = (0..names.len())
            .map(|j| parse_cell(&record[j + 1], line, &names[j]))
            .collect::<Result<Vec<_>>>()?;
        if rows.insert(record[0].to_string(), values).is_some() {
            return Err(Error::DuplicateSeries(record[0].to_string()));
        }
    }
    if rows.is_empty() {
        return Err(Error::NoData);
    }
    Ok(Attributes { names, rows })
}

/// Reads a `name,label` group assignment file (header mandatory), in file order.
pub fn load_groups(path: impl AsRef<Path>, delimiter: u8) -> Result<Vec<(String, String)>> {
    read_groups(File::open(path)?, delimiter)
}

pub fn read_groups<R: Read>(reader: R, delimiter: u8) -> Result<Vec<(String, String)>> {
    let mut rdr = csv_reader(reader, delimiter);
    let header = rdr.headers()?.clone();
    if header.len() != 2 {
        return Err(Error::Csv(format!("group file needs columns name,label; found {} columns", header.len())));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        if !seen.insert(record[0].to_string()) {
            return Err(Error::DuplicateSeries(record[0].to_string()));
        }
        out.push((record[0].to_string(), record[1].to_string()));
    }
    if out.is_empty() {
        return Err(Error::NoData);
    }
    Ok(out)
}

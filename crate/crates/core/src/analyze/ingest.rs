//! Reading numeric datasets from CSV or plain whitespace-separated text.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::SampleSet;

/// Which column holds the values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnSelector {
    /// First column (or every token of a headerless plain-text file).
    First,
    Name(String),
    /// Zero-based column index.
    Index(usize),
}

impl ColumnSelector {
    /// A column index when `text` is all digits, otherwise a header name.
    pub fn parse(text: &str) -> Self {
        match text.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(text.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectedRow {
    /// 1-based line number in the file.
    pub line: usize,
    pub text: String,
}

/// Outcome of reading a dataset: accepted values plus every rejected row.
#[derive(Clone, Debug)]
pub struct IngestReport {
    pub samples: SampleSet,
    pub rows_read: usize,
    pub nonpositive: Vec<RejectedRow>,
    pub non_numeric: Vec<RejectedRow>,
}

impl IngestReport {
    pub fn excluded(&self) -> usize {
        self.nonpositive.len() + self.non_numeric.len()
    }
}

enum Parsed {
    Value(f64),
    NonPositive,
    NotNumeric,
}

/// Locale-independent decimal or scientific notation; non-finite is rejected.
fn parse_value(field: &str) -> Parsed {
    match field.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Parsed::Value(v),
        Ok(v) if v.is_finite() => Parsed::NonPositive,
        _ => Parsed::NotNumeric,
    }
}

fn is_number(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok_and(f64::is_finite)
}

struct Collector {
    values: Vec<f64>,
    rows: usize,
    nonpositive: Vec<RejectedRow>,
    non_numeric: Vec<RejectedRow>,
}

impl Collector {
    fn new() -> Self {
        Collector { values: Vec::new(), rows: 0, nonpositive: Vec::new(), non_numeric: Vec::new() }
    }

    fn push(&mut self, line: usize, field: &str) {
        self.rows += 1;
        match parse_value(field) {
            Parsed::Value(v) => self.values.push(v),
            Parsed::NonPositive => self.nonpositive.push(RejectedRow { line, text: field.trim().into() }),
            Parsed::NotNumeric => self.non_numeric.push(RejectedRow { line, text: field.trim().into() }),
        }
    }
}

/// Reads positive values from `path`.
///
/// A first line whose selected field is not a number is a header. Files with
/// no header and no commas are read token by token, so one-per-line and
/// whitespace-separated text both work. Lines starting with `#` are comments.
/// Zero, negative and unparseable rows are counted, never silently dropped.
pub fn ingest_dataset(path: &Path, column: &ColumnSelector) -> Result<IngestReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut collector = Collector::new();

    let mut content = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some((first_line, first)) = content.next() else {
        return Err(Error::NoData(path.to_path_buf()));
    };
    let has_commas = text.lines().any(|l| !l.trim_start().starts_with('#') && l.contains(','));
    let first_fields: Vec<&str> =
        if has_commas { first.split(',').collect() } else { first.split_whitespace().collect() };
    let header = match column {
        ColumnSelector::Name(_) => true,
        ColumnSelector::First => !is_number(first_fields[0]),
        ColumnSelector::Index(i) => first_fields.get(*i).is_none_or(|f| !is_number(f)),
    };

    if !header && !has_commas && *column == ColumnSelector::First {
        for (line, l) in std::iter::once((first_line, first)).chain(content) {
            for token in l.split_whitespace() {
                collector.push(line, token);
            }
        }
    } else {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(header)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let index = match column {
            ColumnSelector::First => 0,
            ColumnSelector::Index(i) => *i,
            ColumnSelector::Name(name) => reader
                .headers()?
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Config(format!("column '{name}' not found in {}", path.display())))?,
        };
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            collector.push(line, record.get(index).unwrap_or(""));
        }
    }

    if collector.values.is_empty() {
        return Err(Error::NoData(path.to_path_buf()));
    }
    let source = path.display().to_string();
    Ok(IngestReport {
        samples: SampleSet::new(collector.values, 0, source),
        rows_read: collector.rows,
        nonpositive: collector.nonpositive,
        non_numeric: collector.non_numeric,
    })
}

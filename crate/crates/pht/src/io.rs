//! CSV ingestion and export.
//!
//! Rows become samples in file order. Every column other than the label is
//! a feature unless an explicit selection is given. Labels are mapped to
//! dense class ids: numerically when every label parses as an integer,
//! lexicographically otherwise.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use pht_core::{ClassId, Dataset, FeatureRange, Sample, StreamSchema};

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// A header name if the file has one with this text, otherwise a
    /// zero-based index when the text is numeric.
    pub fn parse(text: &str) -> Self {
        match text.parse::<usize>() {
            Ok(i) => Self::Index(i),
            Err(_) => Self::Name(text.to_string()),
        }
    }

    fn resolve(&self, header: Option<&[String]>, columns: usize) -> Option<usize> {
        match self {
            Self::Name(name) => header?.iter().position(|h| h == name),
            Self::Index(i) => {
                // A header column literally named "3" wins over index 3.
                let text = i.to_string();
                if let Some(pos) = header.and_then(|h| h.iter().position(|c| *c == text)) {
                    return Some(pos);
                }
                (*i < columns).then_some(*i)
            }
        }
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Name(n) => f.write_str(n),
            Self::Index(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    pub has_header: bool,
    /// Feature columns by header name or zero-based index, in output order.
    pub features: Option<Vec<String>>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: LabelColumn::Name("label".to_string()),
            has_header: true,
            features: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv syntax error: {0}")]
    Csv(#[from] csv::Error),
    #[error("input has no data rows")]
    Empty,
    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity { line: u64, expected: usize, found: usize },
    #[error("line {line}, column {column}: missing value")]
    Missing { line: u64, column: String },
    #[error("line {line}, column {column}: {value:?} is not a finite number")]
    NonNumeric { line: u64, column: String, value: String },
    #[error("label column {0} not found")]
    UnknownLabelColumn(String),
    #[error("feature column {0} not found")]
    UnknownFeatureColumn(String),
    #[error("no feature columns selected")]
    NoFeatures,
}

/// Reads a labeled CSV file into a dataset whose feature ranges are the
/// observed minimum and maximum of each column.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset, LoadError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, options)
}

pub fn read_csv(reader: impl Read, options: &CsvOptions) -> Result<Dataset, LoadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let first = match records.next() {
        Some(r) => r?,
        None => return Err(LoadError::Empty),
    };
    let columns = first.len();
    let header: Option<Vec<String>> = options.has_header.then(|| first.iter().map(str::to_string).collect());
    let column_name = |i: usize| -> String { header.as_ref().map(|h| h[i].clone()).unwrap_or_else(|| format!("f{i}")) };

    let label = options
        .label_column
        .resolve(header.as_deref(), columns)
        .ok_or_else(|| LoadError::UnknownLabelColumn(options.label_column.to_string()))?;
    let feature_cols: Vec<usize> = match &options.features {
        None => (0..columns).filter(|&c| c != label).collect(),
        Some(sel) => sel
            .iter()
            .map(|s| {
                LabelColumn::parse(s)
                    .resolve(header.as_deref(), columns)
                    .filter(|&c| c != label)
                    .ok_or_else(|| LoadError::UnknownFeatureColumn(s.clone()))
            })
            .collect::<Result<_, _>>()?,
    };
    if feature_cols.is_empty() {
        return Err(LoadError::NoFeatures);
    }

    let mut rows: Vec<(Vec<f64>, String)> = Vec::new();
    let mut handle = |record: csv::StringRecord| -> Result<(), LoadError> {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns {
            return Err(LoadError::Arity {
                line,
                expected: columns,
                found: record.len(),
            });
        }
        let mut features = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let cell = &record[c];
            if cell.is_empty() {
                return Err(LoadError::Missing {
                    line,
                    column: column_name(c),
                });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => features.push(v),
                _ => {
                    return Err(LoadError::NonNumeric {
                        line,
                        column: column_name(c),
                        value: cell.to_string(),
                    })
                }
            }
        }
        let tag = &record[label];
        if tag.is_empty() {
            return Err(LoadError::Missing {
                line,
                column: column_name(label),
            });
        }
        rows.push((features, tag.to_string()));
        Ok(())
    };
    if header.is_none() {
        handle(first)?;
    }
    for record in records {
        handle(record?)?;
    }
    if rows.is_empty() {
        return Err(LoadError::Empty);
    }

    let class_labels = order_labels(rows.iter().map(|(_, l)| l.as_str()));
    let mut ranges: Vec<(f64, f64)> = vec![(f64::INFINITY, f64::NEG_INFINITY); feature_cols.len()];
    let samples: Vec<Sample> = rows
        .into_iter()
        .enumerate()
        .map(|(i, (features, tag))| {
            for (r, &v) in ranges.iter_mut().zip(&features) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
            let label = class_labels
                .binary_search_by(|l| cmp_labels(l, &tag))
                .expect("label collected above");
            Sample {
                index: i as u64,
                features,
                label: label as ClassId,
            }
        })
        .collect();
    let schema = StreamSchema {
        feature_names: feature_cols.iter().map(|&c| column_name(c)).collect(),
        feature_ranges: ranges.into_iter().map(|(min, max)| FeatureRange { min, max }).collect(),
        class_ids: (0..class_labels.len() as ClassId).collect(),
        class_labels,
    };
    Ok(Dataset { schema, samples })
}

fn cmp_labels(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

fn order_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let distinct: BTreeSet<&str> = labels.collect();
    let numeric = distinct.iter().all(|l| l.parse::<i64>().is_ok());
    let mut out: Vec<String> = distinct.into_iter().map(str::to_string).collect();
    if numeric {
        out.sort_by(|a, b| cmp_labels(a, b));
    }
    out
}

/// Writes a dataset as CSV with a header and a trailing `label` column.
/// Floats use the shortest representation that round-trips exactly.
pub fn write_csv(dataset: &Dataset, writer: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = dataset.schema.feature_names.iter().map(String::as_str).collect();
    header.push("label");
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::new();
    for s in &dataset.samples {
        row.clear();
        row.extend(s.features.iter().map(|v| v.to_string()));
        let pos = dataset
            .schema
            .class_position(s.label)
            .expect("dataset samples match their schema");
        row.push(dataset.schema.class_labels[pos].clone());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

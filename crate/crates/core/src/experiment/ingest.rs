//! Converts a labelled CSV table into the dataset text format.

use std::collections::HashMap;

use crate::distributions::{Dataset, Provenance};
use crate::error::{Error, Result};

/// Reads a CSV with a header row. Every column except `label_column` must be
/// numeric; labels must be integers forming the contiguous range `1..=K`.
/// `source` is recorded in the dataset's provenance.
pub fn ingest_csv(text: &str, label_column: &str, source: &str) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        if let Some(first) = seen.insert(name, i + 1) {
            return Err(Error::parse(1, format!("duplicate column name `{name}` in columns {first} and {}", i + 1)));
        }
    }
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::parse(1, format!("no column named `{label_column}`")))?;
    if header.len() < 2 {
        return Err(Error::parse(1, "need at least one feature column besides the label"));
    }

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::parse(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let mut x = Vec::with_capacity(header.len() - 1);
        for (i, v) in rec.iter().enumerate() {
            if i == label_idx {
                let label: i64 = v.parse().map_err(|_| {
                    Error::parse(line, format!("column `{label_column}`: label `{v}` is not an integer"))
                })?;
                if label < 1 {
                    return Err(Error::parse(line, format!("column `{label_column}`: label {label} is below 1")));
                }
                raw_labels.push(label as usize);
            } else {
                let f: f64 = v.parse().ok().filter(|f: &f64| f.is_finite()).ok_or_else(|| {
                    Error::parse(line, format!("column `{}`: `{v}` is not a finite number", &header[i]))
                })?;
                x.push(f);
            }
        }
        features.push(x);
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let k = *raw_labels.iter().max().expect("non-empty");
    let mut present = vec![false; k];
    for &l in &raw_labels {
        present[l - 1] = true;
    }
    if let Some(missing) = present.iter().position(|p| !p) {
        return Err(Error::Domain(format!(
            "labels must be contiguous 1..K (K = {k}, label {} never occurs)",
            missing + 1
        )));
    }
    if k < 2 {
        return Err(Error::InvalidClassCount(k));
    }
    let labels = raw_labels.into_iter().map(|l| l - 1).collect();
    Dataset::new(features, labels, k, Provenance::Ingested { source: source.to_string() })
}

/// Dataset text with a leading comment marking it as ingested data.
pub fn ingested_text(ds: &Dataset) -> String {
    format!("# {}; no posterior available, empirical risk only\n{}", ds.provenance, ds.to_text())
}

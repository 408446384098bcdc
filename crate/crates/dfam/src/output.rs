//! Report, prediction, alert, feature and benchmark file writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use dfam_core::eval::{Confusion, EvalReport};
use dfam_core::features::FeatureVector;
use serde::Serialize;

use crate::error::{Error, Result};

pub fn write_report(path: &Path, report: &EvalReport) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::format(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Header `actual` followed by the labels; one row per actual label.
pub fn write_confusion_csv(path: &Path, confusion: &Confusion) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e))?;
    let csv_err = |e: csv::Error| Error::format(path, e);
    let mut header = vec!["actual".to_string()];
    header.extend(confusion.labels.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (label, row) in confusion.labels.iter().zip(&confusion.counts) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(u64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub window_index: usize,
    pub predicted: String,
    /// Aggregate DFAM score, or the naive Bayes posterior; empty otherwise.
    pub score: Option<f64>,
}

pub fn write_predictions(path: &Path, rows: &[Prediction]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::format(path, e))?;
    }
    if rows.is_empty() {
        w.write_record(["window_index", "predicted", "score"])
            .map_err(|e| Error::format(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One JSON document per line.
pub fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| Error::format(path, e))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Header is the feature names plus `label`.
pub fn write_features_csv(path: &Path, names: &[String], rows: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e))?;
    let csv_err = |e: csv::Error| Error::format(path, e);
    let mut header = names.to_vec();
    header.push("label".into());
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut rec: Vec<String> = row.values.iter().map(f64::to_string).collect();
        rec.push(row.label.as_ref().map(|l| l.name.clone()).unwrap_or_default());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

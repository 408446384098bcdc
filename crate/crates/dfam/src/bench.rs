//! Response-time benchmark: read a recording from disk, smooth and window
//! it, compute signatures or features, classify every window and append
//! each result to an in-memory alert sink.

use std::path::Path;
use std::time::Instant;

use dfam_core::dfam::{self, SignatureBuilder};
use dfam_core::features::FeatureExtractor;
use dfam_core::signal;
use dfam_core::{Recording, Error as CoreError};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifest;
use crate::model_file::AnyModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub repetition: usize,
    pub windows: usize,
    pub read_ms: f64,
    pub process_ms: f64,
    pub signature_ms: f64,
    pub classify_ms: f64,
    pub total_ms: f64,
    pub classify_per_window_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.collect();
        Self {
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            mean: v.iter().sum::<f64>() / v.len().max(1) as f64,
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub repetitions: usize,
    pub read_ms: Spread,
    pub process_ms: Spread,
    pub signature_ms: Spread,
    pub classify_ms: Spread,
    pub total_ms: Spread,
    pub classify_per_window_ms: Spread,
}

impl BenchSummary {
    pub fn of(records: &[BenchRecord]) -> Self {
        Self {
            repetitions: records.len(),
            read_ms: Spread::of(records.iter().map(|r| r.read_ms)),
            process_ms: Spread::of(records.iter().map(|r| r.process_ms)),
            signature_ms: Spread::of(records.iter().map(|r| r.signature_ms)),
            classify_ms: Spread::of(records.iter().map(|r| r.classify_ms)),
            total_ms: Spread::of(records.iter().map(|r| r.total_ms)),
            classify_per_window_ms: Spread::of(records.iter().map(|r| r.classify_per_window_ms)),
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Picks one recording of a manifest by subject and label; either may be
/// omitted when it is unambiguous.
pub fn select(recordings: Vec<Recording>, subject: Option<&str>, label: Option<&str>) -> Result<Recording> {
    let mut hits: Vec<Recording> = recordings
        .into_iter()
        .filter(|r| subject.is_none_or(|s| r.subject == s) && label.is_none_or(|l| r.label.name == l))
        .collect();
    match hits.len() {
        1 => Ok(hits.remove(0)),
        0 => Err(Error::BadConfig("no recording matches the selection".into())),
        n => Err(Error::BadConfig(format!(
            "{n} recordings match; narrow the selection with --subject and --label"
        ))),
    }
}

#[derive(Serialize)]
struct Notice<'a> {
    window_index: usize,
    detected: &'a str,
}

/// Times `repetitions` full passes over the recording selected from
/// `manifest_path`.
pub fn bench_response(
    model: &AnyModel,
    manifest_path: &Path,
    subject: Option<&str>,
    label: Option<&str>,
    repetitions: usize,
) -> Result<Vec<BenchRecord>> {
    if repetitions == 0 {
        return Err(Error::BadConfig("repetitions must be at least 1".into()));
    }
    let cfg = match model {
        AnyModel::Dfam(m) => m.config().clone(),
        AnyModel::Classifier(c) => c.config.clone(),
    };
    let builder = SignatureBuilder::from_config(&cfg)?;
    let extractor = FeatureExtractor::new(cfg.streams.clone(), cfg.window_size, cfg.sampling_hz)?;
    let seg = cfg.segmentation();
    let mut records = Vec::with_capacity(repetitions);
    for repetition in 0..repetitions {
        let start = Instant::now();
        let rec = select(manifest::load_manifest(manifest_path)?, subject, label)?;
        let read_ms = ms(start);

        let t = Instant::now();
        let windows = signal::segment_aligned(&rec.streams, &cfg.streams, &seg)?;
        let process_ms = ms(t);

        let t = Instant::now();
        let mut sink: Vec<String> = Vec::with_capacity(windows.len());
        let classify_ms;
        let signature_ms;
        match model {
            AnyModel::Dfam(m) => {
                let sigs = windows.iter().map(|w| builder.build(w)).collect::<dfam_core::Result<Vec<_>>>()?;
                signature_ms = ms(t);
                let t = Instant::now();
                for (i, sig) in sigs.iter().enumerate() {
                    let c = dfam::classify(sig, m)?;
                    sink.push(notice(i, &c.label.name)?);
                }
                classify_ms = ms(t);
            }
            AnyModel::Classifier(c) => {
                let feats = windows
                    .iter()
                    .map(|w| extractor.extract(w))
                    .collect::<dfam_core::Result<Vec<_>>>()?;
                signature_ms = ms(t);
                let t = Instant::now();
                for (i, f) in feats.iter().enumerate() {
                    sink.push(notice(i, c.classifier.predict(&f.values)?)?);
                }
                classify_ms = ms(t);
            }
        }
        let total_ms = ms(start);
        std::hint::black_box(&sink);
        records.push(BenchRecord {
            repetition,
            windows: windows.len(),
            read_ms,
            process_ms,
            signature_ms,
            classify_ms,
            total_ms,
            classify_per_window_ms: classify_ms / windows.len().max(1) as f64,
        });
    }
    Ok(records)
}

fn notice(window_index: usize, detected: &str) -> Result<String> {
    serde_json::to_string(&Notice { window_index, detected })
        .map_err(|e| Error::Core(CoreError::InvalidParameter(e.to_string())))
}

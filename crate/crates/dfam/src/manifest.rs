//! Per-subject JSON manifests and dataset directories.
//!
//! ```json
//! {
//!   "subject": "s01",
//!   "placement": "RR",
//!   "sampling_hz": 50.0,
//!   "recordings": [
//!     {
//!       "label": "walking+reading",
//!       "streams": {
//!         "phone_accel": "walking+reading_phone_accel.csv",
//!         "phone_gyro": "walking+reading_phone_gyro.csv",
//!         "watch_accel": "walking+reading_watch_accel.csv",
//!         "watch_gyro": "walking+reading_watch_gyro.csv"
//!       }
//!     }
//!   ]
//! }
//! ```
//!
//! Stream paths are relative to the manifest's directory. `kind` may be
//! given per recording; otherwise it is inferred from the label. A dataset
//! is either one manifest file or a directory whose subdirectories each
//! hold a `manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dfam_core::signal::StreamKind;
use dfam_core::{ActivityKind, ActivityLabel, Dataset, Placement, Recording};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream_csv;

/// A validated recording entry: its label and the file of each stream.
pub type Entry = (ActivityLabel, BTreeMap<StreamKind, String>);

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ActivityKind>,
    pub streams: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectManifest {
    pub subject: String,
    pub placement: String,
    pub sampling_hz: f64,
    pub recordings: Vec<RecordingEntry>,
}

impl SubjectManifest {
    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<(Placement, Vec<Entry>)> {
        if self.subject.trim().is_empty() {
            return Err(Error::Manifest("empty subject id".into()));
        }
        let placement: Placement = self
            .placement
            .parse()
            .map_err(|_| Error::Manifest(format!("unknown placement tag {:?}", self.placement)))?;
        if !(self.sampling_hz.is_finite() && self.sampling_hz > 0.0) {
            return Err(Error::Manifest(format!("bad sampling rate {}", self.sampling_hz)));
        }
        let mut out = Vec::with_capacity(self.recordings.len());
        for rec in &self.recordings {
            let label = match rec.kind {
                Some(kind) => ActivityLabel::new(rec.label.clone(), kind),
                None => ActivityLabel::named(rec.label.clone()),
            }
            .map_err(|e| Error::Manifest(format!("subject {}: {e}", self.subject)))?;
            let mut streams = BTreeMap::new();
            for (name, path) in &rec.streams {
                let kind: StreamKind = name
                    .parse()
                    .map_err(|_| Error::Manifest(format!("unknown stream {name:?} in {:?}", rec.label)))?;
                streams.insert(kind, path.clone());
            }
            if let Some(missing) = StreamKind::ALL.iter().find(|k| !streams.contains_key(k)) {
                return Err(Error::Manifest(format!(
                    "subject {}: recording {:?} is missing stream {missing}",
                    self.subject, rec.label
                )));
            }
            out.push((label, streams));
        }
        Ok((placement, out))
    }
}

pub fn read_manifest(path: &Path) -> Result<SubjectManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}

pub fn write_manifest(path: &Path, manifest: &SubjectManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| Error::format(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Validates a manifest completely, then reads every stream it names.
pub fn load_manifest(path: &Path) -> Result<Vec<Recording>> {
    let manifest = read_manifest(path)?;
    let (placement, entries) = manifest.validate()?;
    let dir = path.parent().unwrap_or(Path::new("."));
    for (_, streams) in &entries {
        for file in streams.values() {
            let p = dir.join(file);
            if !p.is_file() {
                return Err(Error::Manifest(format!("stream file {} does not exist", p.display())));
            }
        }
    }
    let mut recordings = Vec::with_capacity(entries.len());
    for (label, streams) in entries {
        let mut series = Vec::with_capacity(streams.len());
        for (kind, file) in streams {
            let p = dir.join(file);
            let s = stream_csv::read_stream(&p, kind, manifest.sampling_hz)?;
            stream_csv::check_rate(&p, &s)?;
            series.push(s);
        }
        recordings.push(Recording::new(manifest.subject.clone(), placement, label, series)?);
    }
    Ok(recordings)
}

/// Manifest files making up a dataset path, in sorted order.
pub fn manifest_paths(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let direct = path.join(MANIFEST_FILE);
    if direct.is_file() {
        return Ok(vec![direct]);
    }
    let entries = fs::read_dir(path).map_err(|e| Error::io(path, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        let candidate = entry.path().join(MANIFEST_FILE);
        if candidate.is_file() {
            found.push(candidate);
        }
    }
    found.sort();
    if found.is_empty() {
        return Err(Error::Manifest(format!("no {MANIFEST_FILE} under {}", path.display())));
    }
    Ok(found)
}

/// Loads every manifest of a dataset. All manifests are validated, and must
/// agree on the sampling rate, before any stream is read.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let paths = manifest_paths(path)?;
    let mut rate: Option<(f64, &Path)> = None;
    for p in &paths {
        let m = read_manifest(p)?;
        m.validate()?;
        match rate {
            None => rate = Some((m.sampling_hz, p)),
            Some((hz, first)) if hz != m.sampling_hz => {
                return Err(Error::Manifest(format!(
                    "{} declares {} Hz but {} declares {hz} Hz",
                    p.display(),
                    m.sampling_hz,
                    first.display()
                )))
            }
            Some(_) => {}
        }
    }
    let mut recordings = Vec::new();
    for p in paths {
        recordings.extend(load_manifest(&p)?);
    }
    Ok(Dataset::new(recordings))
}

//! Seeded synthetic phone + watch corpora with known dominant frequencies.
//!
//! Every axis of every stream is a sum of three sinusoids, one per spectrum
//! bin (`g = 3` at 50 Hz), plus Gaussian noise. Each tone is picked from
//! three candidates per bin, one per `H2` bucket:
//!
//! | bin | candidates (Hz) |
//! |---|---|
//! | (0, 8.33] | 1, 4, 7 |
//! | (8.33, 16.67] | 10, 13, 15.2 |
//! | (16.67, 25] | 19, 22, 24.2 |
//!
//! so an axis is described by a 3-digit base-3 tuple id. Phone streams
//! depend only on the pedestrian part of the label and watch streams only
//! on the secondary part, which gives concurrent activities the same phone
//! signature as their simple counterpart. Candidates sit in the middle of
//! their bucket, so per-subject jitter up to about 0.3 Hz keeps the bucket.
//!
//! Tone amplitudes are scaled by the inverse response of the default 3-tap
//! moving average, so every tone has unit amplitude after smoothing.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use dfam_core::signal::{StreamKind, TimeSeries};
use dfam_core::{ActivityKind, ActivityLabel, Placement, Recording};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifest::{self, RecordingEntry, SubjectManifest};
use crate::stream_csv;

pub const BIN_FREQUENCIES_HZ: [[f64; 3]; 3] = [[1.0, 4.0, 7.0], [10.0, 13.0, 15.2], [19.0, 22.0, 24.2]];

pub const PEDESTRIAN: [&str; 6] = [
    "walking",
    "standing",
    "running",
    "sitting",
    "climbing_stairs",
    "descending_stairs",
];

pub const SECONDARY: [&str; 6] = ["", "reading", "eating", "texting", "drinking", "calling"];

const LEADING: [&str; 9] = [
    "walking",
    "standing",
    "running",
    "walking+reading",
    "walking+eating",
    "standing+reading",
    "sitting",
    "climbing_stairs",
    "descending_stairs",
];

const GRAVITY: f64 = 9.81;

/// The first `count` activity names of the generator's fixed ordering.
pub fn activity_names(count: usize) -> Result<Vec<String>> {
    let mut names: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
    for sec in &SECONDARY[1..] {
        for ped in PEDESTRIAN {
            let n = format!("{ped}+{sec}");
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    if count < 2 || count > names.len() {
        return Err(Error::BadConfig(format!(
            "activity count must be in 2..={}, got {count}",
            names.len()
        )));
    }
    names.truncate(count);
    Ok(names)
}

/// (pedestrian code, secondary code) of a generator activity name.
pub fn component_codes(name: &str) -> Result<(usize, usize)> {
    let (ped, sec) = name.split_once('+').unwrap_or((name, ""));
    let p = PEDESTRIAN.iter().position(|x| *x == ped);
    let s = SECONDARY.iter().position(|x| *x == sec);
    match (p, s) {
        (Some(p), Some(s)) => Ok((p, s)),
        _ => Err(Error::BadConfig(format!("{name:?} is not a generator activity"))),
    }
}

/// Base-3 digits (bucket choice per bin) of one axis of one stream.
pub fn tuple_digits(codes: (usize, usize), kind: StreamKind, axis: usize) -> [usize; 3] {
    let device_axis = match kind {
        StreamKind::PHONE_ACCEL | StreamKind::WATCH_ACCEL => axis,
        _ => axis + 3,
    };
    let id = match kind {
        StreamKind::PHONE_ACCEL | StreamKind::PHONE_GYRO => (codes.0 * 7 + device_axis * 5) % 27,
        _ => (codes.1 * 7 + device_axis * 5 + 13) % 27,
    };
    [id % 3, (id / 3) % 3, id / 9]
}

/// Nominal tone frequencies of one axis.
pub fn nominal_tones(codes: (usize, usize), kind: StreamKind, axis: usize) -> [f64; 3] {
    let d = tuple_digits(codes, kind, axis);
    [0, 1, 2].map(|bin| BIN_FREQUENCIES_HZ[bin][d[bin]])
}

/// Magnitude response of the 3-tap moving average at `f` Hz.
fn smoothing_gain(f: f64, sampling_hz: f64) -> f64 {
    ((1.0 + 2.0 * (2.0 * PI * f / sampling_hz).cos()) / 3.0).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub activities: Vec<String>,
    pub subjects: usize,
    pub duration_s: f64,
    pub sampling_hz: f64,
    /// Standard deviation of the additive Gaussian noise.
    pub noise: f64,
    /// Half-width of the uniform per-subject offset applied to each tone.
    pub jitter_hz: f64,
    pub placement: Placement,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            activities: activity_names(6).expect("six activities exist"),
            subjects: 3,
            duration_s: 60.0,
            sampling_hz: 50.0,
            noise: 0.3,
            jitter_hz: 0.0,
            placement: Placement::RR,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.activities.len() < 2 {
            return Err(Error::BadConfig("need at least two activities".into()));
        }
        for a in &self.activities {
            component_codes(a)?;
        }
        if self.subjects == 0 {
            return Err(Error::BadConfig("need at least one subject".into()));
        }
        if !(self.sampling_hz.is_finite() && self.sampling_hz > 0.0) {
            return Err(Error::BadConfig(format!("bad sampling rate {}", self.sampling_hz)));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::BadConfig(format!("bad duration {}", self.duration_s)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::BadConfig(format!("bad noise amplitude {}", self.noise)));
        }
        if !(self.jitter_hz >= 0.0 && self.jitter_hz.is_finite()) {
            return Err(Error::BadConfig(format!("bad jitter {}", self.jitter_hz)));
        }
        Ok(())
    }

    pub fn samples_per_recording(&self) -> usize {
        (self.duration_s * self.sampling_hz).round() as usize
    }

    /// Like `validate`, and also requires every recording to hold at least
    /// one window of `window_size` samples.
    pub fn validate_for_window(&self, window_size: usize) -> Result<()> {
        self.validate()?;
        if self.samples_per_recording() < window_size {
            return Err(Error::BadConfig(format!(
                "{} s at {} Hz is shorter than one {window_size}-sample window",
                self.duration_s, self.sampling_hz
            )));
        }
        Ok(())
    }
}

pub fn subject_id(index: usize) -> String {
    format!("s{:02}", index + 1)
}

/// Per-subject generator state: its own random stream and tone offsets.
struct SubjectGen {
    rng: ChaCha8Rng,
    offsets: BTreeMap<(usize, StreamKind, usize, usize), f64>,
}

impl SubjectGen {
    fn new(seed: u64, subject: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(subject as u64 + 1);
        Self {
            rng,
            offsets: BTreeMap::new(),
        }
    }

    /// Offset of one tone, drawn once per subject in first-use order.
    fn offset(&mut self, jitter: f64, code: usize, kind: StreamKind, axis: usize, bin: usize) -> f64 {
        if jitter == 0.0 {
            return 0.0;
        }
        let rng = &mut self.rng;
        *self
            .offsets
            .entry((code, kind, axis, bin))
            .or_insert_with(|| rng.random_range(-jitter..=jitter))
    }

    fn stream(&mut self, cfg: &SynthConfig, codes: (usize, usize), kind: StreamKind, n: usize) -> Result<TimeSeries> {
        let noise = Normal::new(0.0, cfg.noise).map_err(|e| Error::BadConfig(e.to_string()))?;
        let code = match kind {
            StreamKind::PHONE_ACCEL | StreamKind::PHONE_GYRO => codes.0,
            _ => codes.1,
        };
        let mut axes: [Vec<f64>; 3] = Default::default();
        for (axis, values) in axes.iter_mut().enumerate() {
            let nominal = nominal_tones(codes, kind, axis);
            let mut tones = [(0.0, 0.0, 0.0); 3];
            for bin in 0..3 {
                let f = nominal[bin] + self.offset(cfg.jitter_hz, code, kind, axis, bin);
                let amp = 1.0 / smoothing_gain(f, cfg.sampling_hz).max(0.05);
                let phase = self.rng.random_range(0.0..2.0 * PI);
                tones[bin] = (f, amp, phase);
            }
            let dc = if kind == StreamKind::PHONE_ACCEL && axis == 2 {
                GRAVITY
            } else {
                0.0
            };
            *values = (0..n)
                .map(|i| {
                    let t = i as f64 / cfg.sampling_hz;
                    let signal: f64 = tones.iter().map(|(f, a, p)| a * (2.0 * PI * f * t + p).sin()).sum();
                    let e = if cfg.noise > 0.0 { noise.sample(&mut self.rng) } else { 0.0 };
                    dc + signal + e
                })
                .collect();
        }
        Ok(TimeSeries::from_axes(kind, cfg.sampling_hz, &axes[0], &axes[1], &axes[2])?)
    }

    fn recording(&mut self, cfg: &SynthConfig, subject: &str, name: &str, n: usize) -> Result<Recording> {
        let codes = component_codes(name)?;
        let streams = StreamKind::ALL
            .iter()
            .map(|&k| self.stream(cfg, codes, k, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Recording::new(subject, cfg.placement, ActivityLabel::named(name)?, streams)?)
    }
}

/// All recordings of a corpus, subject by subject.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<Recording>> {
    cfg.validate()?;
    let n = cfg.samples_per_recording();
    let mut out = Vec::with_capacity(cfg.subjects * cfg.activities.len());
    for s in 0..cfg.subjects {
        let mut gen = SubjectGen::new(cfg.seed, s);
        let id = subject_id(s);
        for name in &cfg.activities {
            out.push(gen.recording(cfg, &id, name, n)?);
        }
    }
    Ok(out)
}

/// One stretch of a concatenated scenario recording.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub label: String,
    pub start_ms: i64,
    pub end_ms: i64,
}

/// A single recording made of back-to-back activity segments for subject
/// `subject` of `cfg`. Returns the recording and its segment boundaries.
pub fn scenario(cfg: &SynthConfig, subject: usize, segments: &[(String, f64)]) -> Result<(Recording, Vec<Segment>)> {
    cfg.validate()?;
    if segments.is_empty() {
        return Err(Error::BadConfig("scenario needs at least one segment".into()));
    }
    let mut gen = SubjectGen::new(cfg.seed, subject);
    let mut axes: BTreeMap<StreamKind, [Vec<f64>; 3]> = BTreeMap::new();
    let mut bounds = Vec::with_capacity(segments.len());
    let mut start = 0usize;
    let step_ms = 1000.0 / cfg.sampling_hz;
    for (name, seconds) in segments {
        let n = (seconds * cfg.sampling_hz).round() as usize;
        if n == 0 {
            return Err(Error::BadConfig(format!("segment {name:?} is empty")));
        }
        let codes = component_codes(name)?;
        for kind in StreamKind::ALL {
            let s = gen.stream(cfg, codes, kind, n)?;
            let slot = axes.entry(kind).or_default();
            for (a, dst) in slot.iter_mut().enumerate() {
                dst.extend(s.axis(a));
            }
        }
        bounds.push(Segment {
            label: name.clone(),
            start_ms: (start as f64 * step_ms).round() as i64,
            end_ms: ((start + n - 1) as f64 * step_ms).round() as i64,
        });
        start += n;
    }
    let streams = axes
        .into_iter()
        .map(|(k, [x, y, z])| TimeSeries::from_axes(k, cfg.sampling_hz, &x, &y, &z))
        .collect::<dfam_core::Result<Vec<_>>>()?;
    let label = ActivityLabel::new("scenario", ActivityKind::SimplePedestrian)?;
    let rec = Recording::new(subject_id(subject), cfg.placement, label, streams)?;
    Ok((rec, bounds))
}

#[derive(Debug, Clone, Serialize)]
struct TruthAxis {
    axis: String,
    frequencies_hz: [f64; 3],
    h2_buckets: [usize; 3],
}

#[derive(Debug, Clone, Serialize)]
struct TruthActivity {
    label: String,
    kind: ActivityKind,
    axes: Vec<TruthAxis>,
}

#[derive(Debug, Clone, Serialize)]
struct Truth<'a> {
    seed: u64,
    sampling_hz: f64,
    duration_s: f64,
    noise: f64,
    jitter_hz: f64,
    bin_frequencies_hz: [[f64; 3]; 3],
    activities: Vec<TruthActivity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    segments: Option<&'a [Segment]>,
}

fn truth<'a>(cfg: &SynthConfig, names: &[String], segments: Option<&'a [Segment]>) -> Result<Truth<'a>> {
    let mut activities = Vec::new();
    for name in names {
        let codes = component_codes(name)?;
        let mut axes = Vec::new();
        for kind in StreamKind::ALL {
            for (a, axis) in ["x", "y", "z"].iter().enumerate() {
                axes.push(TruthAxis {
                    axis: format!("{kind}.{axis}"),
                    frequencies_hz: nominal_tones(codes, kind, a),
                    h2_buckets: tuple_digits(codes, kind, a),
                });
            }
        }
        activities.push(TruthActivity {
            label: name.clone(),
            kind: ActivityKind::infer(name),
            axes,
        });
    }
    Ok(Truth {
        seed: cfg.seed,
        sampling_hz: cfg.sampling_hz,
        duration_s: cfg.duration_s,
        noise: cfg.noise,
        jitter_hz: cfg.jitter_hz,
        bin_frequencies_hz: BIN_FREQUENCIES_HZ,
        activities,
        segments,
    })
}

pub const TRUTH_FILE: &str = "truth.json";

fn stream_file(label: &str, kind: StreamKind) -> String {
    format!("{label}_{kind}.csv")
}

/// Writes one subject directory: CSV streams plus `manifest.json`.
pub fn write_subject(dir: &Path, cfg: &SynthConfig, subject: &str, recordings: &[&Recording]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(recordings.len());
    for rec in recordings {
        let mut streams = BTreeMap::new();
        for s in &rec.streams {
            let file = stream_file(&rec.label.name, s.kind());
            stream_csv::write_stream(&dir.join(&file), s)?;
            streams.insert(s.kind().to_string(), file);
        }
        let kind = (ActivityKind::infer(&rec.label.name) != rec.label.kind).then_some(rec.label.kind);
        entries.push(RecordingEntry {
            label: rec.label.name.clone(),
            kind,
            streams,
        });
    }
    let m = SubjectManifest {
        subject: subject.to_string(),
        placement: cfg.placement.to_string(),
        sampling_hz: cfg.sampling_hz,
        recordings: entries,
    };
    manifest::write_manifest(&dir.join(manifest::MANIFEST_FILE), &m)
}

fn write_truth(path: &Path, truth: &Truth<'_>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(truth).map_err(|e| Error::format(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Generates a corpus into `dir`: one subdirectory per subject plus the
/// `truth.json` sidecar. Returns the recordings written.
pub fn write_corpus(dir: &Path, cfg: &SynthConfig) -> Result<Vec<Recording>> {
    let recordings = generate(cfg)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for s in 0..cfg.subjects {
        let id = subject_id(s);
        let own: Vec<&Recording> = recordings.iter().filter(|r| r.subject == id).collect();
        write_subject(&dir.join(&id), cfg, &id, &own)?;
    }
    write_truth(&dir.join(TRUTH_FILE), &truth(cfg, &cfg.activities, None)?)?;
    Ok(recordings)
}

/// Writes a single-subject scenario dataset to `dir`.
pub fn write_scenario(dir: &Path, cfg: &SynthConfig, segments: &[(String, f64)]) -> Result<(Recording, Vec<Segment>)> {
    let (rec, bounds) = scenario(cfg, 0, segments)?;
    write_subject(dir, cfg, &rec.subject.clone(), &[&rec])?;
    let mut names: Vec<String> = segments.iter().map(|(n, _)| n.clone()).collect();
    names.sort();
    names.dedup();
    write_truth(&dir.join(TRUTH_FILE), &truth(cfg, &names, Some(&bounds))?)?;
    Ok((rec, bounds))
}

/// `count` segments alternating between `a` and `b`, each `seconds` long.
pub fn alternating(a: &str, b: &str, count: usize, seconds: f64) -> Vec<(String, f64)> {
    (0..count)
        .map(|i| ((if i % 2 == 0 { a } else { b }).to_string(), seconds))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ordering_starts_with_the_six_core_activities() {
        let names = activity_names(6).unwrap();
        assert_eq!(
            names,
            ["walking", "standing", "running", "walking+reading", "walking+eating", "standing+reading"]
        );
        assert_eq!(activity_names(24).unwrap().len(), 24);
        assert!(activity_names(1).is_err());
        assert!(activity_names(1000).is_err());
    }

    #[test]
    fn tuple_ids_differ_between_codes() {
        for kind in StreamKind::ALL {
            for axis in 0..3 {
                let ids: std::collections::BTreeSet<[usize; 3]> =
                    (0..6).map(|c| tuple_digits((c, c), kind, axis)).collect();
                assert_eq!(ids.len(), 6);
            }
        }
    }

    #[test]
    fn recordings_have_the_requested_length() {
        let cfg = SynthConfig::default();
        let recs = generate(&cfg).unwrap();
        assert_eq!(recs.len(), 18);
        assert!(recs.iter().all(|r| r.streams.len() == 4 && r.streams.iter().all(|s| s.len() == 3000)));
    }
}

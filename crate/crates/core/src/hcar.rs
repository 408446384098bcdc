//! Two-state hierarchical detector.
//!
//! `S1` classifies short windows as moving or not. Once moving is seen the
//! detector switches to `S2`, which classifies one longer window as
//! distracted or not, raises an alert if distracted (unless an alert was
//! raised less than `reset_seconds` earlier), and always returns to `S1`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::activity::{ActivityKind, ActivityLabel, Dataset, Recording};
use crate::dfam::{self, DfamConfig, DfamModel, SignatureBuilder};
use crate::error::{Error, Result};
use crate::signal::{self, StreamKind, TimeSeries, Window};

pub const MOVING: &str = "moving";
pub const NOT_MOVING: &str = "not_moving";
pub const DISTRACTED: &str = "distracted";
pub const NOT_DISTRACTED: &str = "not_distracted";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum State {
    S1,
    S2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlertEvent {
    pub t_ms: i64,
    pub detected: String,
    pub window_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HcarConfig {
    pub s1: DfamConfig,
    pub s2: DfamConfig,
    pub reset_seconds: f64,
}

impl Default for HcarConfig {
    fn default() -> Self {
        Self {
            s1: DfamConfig {
                window_size: 64,
                overlap_ratio: 0.0,
                ..DfamConfig::default()
            },
            s2: DfamConfig::default(),
            reset_seconds: 10.0,
        }
    }
}

/// Signatures built and stored signatures compared, per state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub s1_windows: u64,
    pub s1_signatures: u64,
    pub s1_comparisons: u64,
    pub s2_windows: u64,
    pub s2_signatures: u64,
    pub s2_comparisons: u64,
}

/// What one `step` did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub window_index: usize,
    pub t_ms: i64,
    pub state: State,
    pub detected: String,
    pub next: State,
    pub alerted: bool,
}

#[derive(Debug, Clone)]
pub struct HcarDetector {
    state: State,
    s1: DfamModel,
    s2: DfamModel,
    s1_builder: SignatureBuilder,
    s2_builder: SignatureBuilder,
    reset_ms: f64,
    last_alert_t_ms: Option<i64>,
    counters: WorkCounters,
}

fn check_labels(model: &DfamModel, expected: [&str; 2]) -> Result<()> {
    let names: Vec<&str> = model.activities.iter().map(|a| a.label.as_str()).collect();
    if names.len() != 2 || !expected.iter().all(|e| names.contains(e)) {
        return Err(Error::InvalidDetector(format!(
            "model labels {names:?}, expected {expected:?}"
        )));
    }
    Ok(())
}

impl HcarDetector {
    pub fn new(s1: DfamModel, s2: DfamModel, reset_seconds: f64) -> Result<Self> {
        check_labels(&s1, [MOVING, NOT_MOVING])?;
        check_labels(&s2, [DISTRACTED, NOT_DISTRACTED])?;
        let (c1, c2) = (s1.config(), s2.config());
        if c1.window_size > c2.window_size {
            return Err(Error::InvalidDetector(format!(
                "S1 window {} exceeds S2 window {}",
                c1.window_size, c2.window_size
            )));
        }
        if c1.sampling_hz != c2.sampling_hz {
            return Err(Error::ConfigMismatch(format!(
                "S1 at {} Hz, S2 at {} Hz",
                c1.sampling_hz, c2.sampling_hz
            )));
        }
        if !(reset_seconds.is_finite() && reset_seconds > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reset_seconds must be positive, got {reset_seconds}"
            )));
        }
        Ok(Self {
            state: State::S1,
            s1_builder: SignatureBuilder::from_config(c1)?,
            s2_builder: SignatureBuilder::from_config(c2)?,
            s1,
            s2,
            reset_ms: reset_seconds * 1000.0,
            last_alert_t_ms: None,
            counters: WorkCounters::default(),
        })
    }

    pub fn state(&self) -> State {
        self.state
    }

    pub fn counters(&self) -> WorkCounters {
        self.counters
    }

    pub fn last_alert_t_ms(&self) -> Option<i64> {
        self.last_alert_t_ms
    }

    pub fn s1_model(&self) -> &DfamModel {
        &self.s1
    }

    pub fn s2_model(&self) -> &DfamModel {
        &self.s2
    }

    /// Window size expected in the current state.
    pub fn active_window(&self) -> usize {
        match self.state {
            State::S1 => self.s1.config().window_size,
            State::S2 => self.s2.config().window_size,
        }
    }

    fn active_streams(&self) -> &[StreamKind] {
        match self.state {
            State::S1 => &self.s1.config().streams,
            State::S2 => &self.s2.config().streams,
        }
    }

    /// Back to `S1` with no alert history and zeroed counters.
    pub fn reset(&mut self) {
        self.state = State::S1;
        self.last_alert_t_ms = None;
        self.counters = WorkCounters::default();
    }

    /// Classifies one aligned window set with the active state's model.
    /// The window's end time and index stamp the trace entry and any alert.
    pub fn step(&mut self, windows: &[Window]) -> Result<(TraceEntry, Option<AlertEvent>)> {
        let expected = self.active_window();
        if let Some(w) = windows.iter().find(|w| w.len() != expected) {
            return Err(Error::WindowSizeMismatch {
                expected,
                found: w.len(),
            });
        }
        let first = windows.first().ok_or(Error::InvalidStream("no windows".to_string()))?;
        let (t_ms, window_index) = (first.end_t_ms, first.index);
        let state = self.state;
        let (builder, model) = match state {
            State::S1 => (&self.s1_builder, &self.s1),
            State::S2 => (&self.s2_builder, &self.s2),
        };
        let sig = builder.build(windows)?;
        let result = dfam::classify(&sig, model)?;
        let detected = result.label.name;
        let comparisons = result.comparisons as u64;
        let c = &mut self.counters;
        let mut alert = None;
        let next = match state {
            State::S1 => {
                c.s1_windows += 1;
                c.s1_signatures += 1;
                c.s1_comparisons += comparisons;
                if detected == MOVING {
                    State::S2
                } else {
                    State::S1
                }
            }
            State::S2 => {
                c.s2_windows += 1;
                c.s2_signatures += 1;
                c.s2_comparisons += comparisons;
                if detected == DISTRACTED {
                    let quiet = self
                        .last_alert_t_ms
                        .is_none_or(|last| (t_ms - last) as f64 >= self.reset_ms);
                    if quiet {
                        self.last_alert_t_ms = Some(t_ms);
                        alert = Some(AlertEvent {
                            t_ms,
                            detected: detected.clone(),
                            window_index,
                        });
                    }
                }
                State::S1
            }
        };
        self.state = next;
        let entry = TraceEntry {
            window_index,
            t_ms,
            state,
            detected,
            next,
            alerted: alert.is_some(),
        };
        Ok((entry, alert))
    }

    /// Replays whole streams: each stream is low-pass filtered once, then a
    /// cursor takes back-to-back windows of the active state's size.
    pub fn simulate(&mut self, streams: &[TimeSeries]) -> Result<Simulation> {
        let mut kinds: Vec<StreamKind> = self.s1.config().streams.clone();
        kinds.extend(self.s2.config().streams.iter().copied());
        kinds.sort();
        kinds.dedup();
        let hz = self.s1.config().sampling_hz;
        let filter = self.s1.config().filter_length;
        let mut filtered = Vec::with_capacity(kinds.len());
        for kind in &kinds {
            let s = streams
                .iter()
                .find(|s| s.kind() == *kind)
                .ok_or(Error::MissingStream(*kind))?;
            signal::check_sampling(core::slice::from_ref(s), hz)?;
            let w1 = self.s1.config().window_size;
            if s.len() < w1 {
                return Err(Error::InsufficientSamples {
                    needed: w1,
                    available: s.len(),
                });
            }
            filtered.push(signal::lowpass_filter(s, filter)?);
        }
        let n = filtered.iter().map(TimeSeries::len).min().unwrap_or(0);
        let mut sim = Simulation::default();
        let mut cursor = 0;
        let mut index = 0;
        loop {
            let w = self.active_window();
            if cursor + w > n {
                break;
            }
            let windows: Vec<Window> = self
                .active_streams()
                .iter()
                .map(|kind| {
                    let s = &filtered[kinds.binary_search(kind).unwrap_or(0)];
                    let span = &s.samples()[cursor..cursor + w];
                    Window {
                        source: *kind,
                        index,
                        start_index: cursor,
                        end_t_ms: span[w - 1].t_ms,
                        axes: [
                            span.iter().map(|p| p.x).collect(),
                            span.iter().map(|p| p.y).collect(),
                            span.iter().map(|p| p.z).collect(),
                        ],
                    }
                })
                .collect();
            let (entry, alert) = self.step(&windows)?;
            sim.trace.push(entry);
            sim.alerts.extend(alert);
            cursor += w;
            index += 1;
        }
        sim.counters = self.counters;
        Ok(sim)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub alerts: Vec<AlertEvent>,
    pub trace: Vec<TraceEntry>,
    pub counters: WorkCounters,
}

impl Simulation {
    /// Mean stored-signature comparisons per S1 window.
    pub fn s1_comparisons_per_window(&self) -> f64 {
        if self.counters.s1_windows == 0 {
            return 0.0;
        }
        self.counters.s1_comparisons as f64 / self.counters.s1_windows as f64
    }
}

fn binary_labels(pos: &str, pos_kind: ActivityKind, neg: &str, neg_kind: ActivityKind) -> (ActivityLabel, ActivityLabel) {
    (
        ActivityLabel::new(pos, pos_kind).expect("constant label"),
        ActivityLabel::new(neg, neg_kind).expect("constant label"),
    )
}

/// Moving / not-moving relabelling of a dataset.
pub fn moving_dataset(dataset: &Dataset) -> Dataset {
    let (pos, neg) = binary_labels(MOVING, ActivityKind::SimplePedestrian, NOT_MOVING, ActivityKind::SimplePedestrian);
    dataset.binary(ActivityLabel::is_moving, &pos, &neg)
}

/// Distracted / not-distracted relabelling of a dataset.
pub fn distraction_dataset(dataset: &Dataset) -> Dataset {
    let (pos, neg) = binary_labels(
        DISTRACTED,
        ActivityKind::ConcurrentDistracted,
        NOT_DISTRACTED,
        ActivityKind::ConcurrentNondistracted,
    );
    dataset.binary(ActivityLabel::is_distracted, &pos, &neg)
}

/// Trains both binary models on every recording of `dataset`.
pub fn train_detector(dataset: &Dataset, cfg: &HcarConfig) -> Result<HcarDetector> {
    let s1 = dfam::train(&moving_dataset(dataset).recordings, &cfg.s1)?;
    let s2 = dfam::train(&distraction_dataset(dataset).recordings, &cfg.s2)?;
    HcarDetector::new(s1, s2, cfg.reset_seconds)
}

/// Convenience: replay one recording's streams through a fresh detector state.
pub fn simulate_recording(detector: &mut HcarDetector, recording: &Recording) -> Result<Simulation> {
    detector.reset();
    detector.simulate(&recording.streams)
}

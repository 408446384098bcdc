//! Motion streams, low-pass filtering and sliding-window segmentation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

pub const DEFAULT_SAMPLING_HZ: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Phone,
    Watch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sensor {
    Accelerometer,
    Gyroscope,
}

/// One device-sensor pair, e.g. the phone accelerometer.
///
/// The derived ordering (phone before watch, accelerometer before gyroscope)
/// is the canonical axis order of every signature and feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub struct StreamKind {
    pub device: Device,
    pub sensor: Sensor,
}

impl StreamKind {
    pub const PHONE_ACCEL: Self = Self::new(Device::Phone, Sensor::Accelerometer);
    pub const PHONE_GYRO: Self = Self::new(Device::Phone, Sensor::Gyroscope);
    pub const WATCH_ACCEL: Self = Self::new(Device::Watch, Sensor::Accelerometer);
    pub const WATCH_GYRO: Self = Self::new(Device::Watch, Sensor::Gyroscope);

    /// All four streams in canonical order.
    pub const ALL: [Self; 4] = [
        Self::PHONE_ACCEL,
        Self::PHONE_GYRO,
        Self::WATCH_ACCEL,
        Self::WATCH_GYRO,
    ];

    pub const fn new(device: Device, sensor: Sensor) -> Self {
        Self { device, sensor }
    }

    pub const fn as_str(self) -> &'static str {
        match (self.device, self.sensor) {
            (Device::Phone, Sensor::Accelerometer) => "phone_accel",
            (Device::Phone, Sensor::Gyroscope) => "phone_gyro",
            (Device::Watch, Sensor::Accelerometer) => "watch_accel",
            (Device::Watch, Sensor::Gyroscope) => "watch_gyro",
        }
    }
}

impl fmt::Display for StreamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StreamKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidStream(format!("unknown stream kind {s:?}")))
    }
}

impl From<StreamKind> for &'static str {
    fn from(k: StreamKind) -> Self {
        k.as_str()
    }
}

impl TryFrom<String> for StreamKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Which sensors take part in a run. Both devices are always used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SensorSubset {
    Accel,
    Gyro,
    #[default]
    Both,
}

impl SensorSubset {
    pub fn streams(self) -> Vec<StreamKind> {
        StreamKind::ALL
            .into_iter()
            .filter(|k| match self {
                SensorSubset::Accel => k.sensor == Sensor::Accelerometer,
                SensorSubset::Gyro => k.sensor == Sensor::Gyroscope,
                SensorSubset::Both => true,
            })
            .collect()
    }
}

impl FromStr for SensorSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accel" => Ok(Self::Accel),
            "gyro" => Ok(Self::Gyro),
            "both" => Ok(Self::Both),
            _ => Err(Error::InvalidParameter(format!(
                "sensor subset {s:?} (expected accel, gyro or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_ms: i64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Sample {
    pub const fn new(t_ms: i64, x: f64, y: f64, z: f64) -> Self {
        Self { t_ms, x, y, z }
    }

    #[inline]
    pub fn axis(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

/// A timestamped three-axis stream from one device sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    kind: StreamKind,
    sampling_hz: f64,
    samples: Vec<Sample>,
}

impl TimeSeries {
    /// Builds a stream, checking that timestamps strictly increase and the
    /// sampling rate is positive.
    pub fn new(kind: StreamKind, sampling_hz: f64, samples: Vec<Sample>) -> Result<Self> {
        if !(sampling_hz.is_finite() && sampling_hz > 0.0) {
            return Err(Error::BadSamplingRate(sampling_hz));
        }
        if samples.is_empty() {
            return Err(Error::InvalidStream(format!("{kind} has no samples")));
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].t_ms <= w[0].t_ms) {
            return Err(Error::InvalidStream(format!(
                "{kind} timestamps not strictly increasing at sample {}",
                i + 1
            )));
        }
        if samples
            .iter()
            .any(|s| !(s.x.is_finite() && s.y.is_finite() && s.z.is_finite()))
        {
            return Err(Error::InvalidStream(format!("{kind} has non-finite values")));
        }
        Ok(Self {
            kind,
            sampling_hz,
            samples,
        })
    }

    /// Builds a stream from per-axis values with timestamps at `1000 / sampling_hz` ms steps.
    pub fn from_axes(
        kind: StreamKind,
        sampling_hz: f64,
        x: &[f64],
        y: &[f64],
        z: &[f64],
    ) -> Result<Self> {
        if x.len() != y.len() || y.len() != z.len() {
            return Err(Error::InvalidStream(format!("{kind} axes differ in length")));
        }
        let dt = 1000.0 / sampling_hz;
        let samples = (0..x.len())
            .map(|i| Sample::new(math::round(i as f64 * dt) as i64, x[i], y[i], z[i]))
            .collect();
        Self::new(kind, sampling_hz, samples)
    }

    pub fn kind(&self) -> StreamKind {
        self.kind
    }

    pub fn sampling_hz(&self) -> f64 {
        self.sampling_hz
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.axis(axis)).collect()
    }

    /// Copy of samples `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.samples.len() {
            return Err(Error::InsufficientSamples {
                needed: end,
                available: self.samples.len(),
            });
        }
        Ok(Self {
            kind: self.kind,
            sampling_hz: self.sampling_hz,
            samples: self.samples[start..end].to_vec(),
        })
    }
}

/// A fixed-size window cut from one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub source: StreamKind,
    /// Ordinal `k` of the window within its stream.
    pub index: usize,
    pub start_index: usize,
    /// Timestamp of the last sample in the window.
    pub end_t_ms: i64,
    pub axes: [Vec<f64>; 3],
}

impl Window {
    pub fn len(&self) -> usize {
        self.axes[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes[0].is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub window_size: usize,
    pub overlap_ratio: f64,
    pub filter_length: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            window_size: 128,
            overlap_ratio: 0.7,
            filter_length: 3,
        }
    }
}

impl SegmentationConfig {
    pub fn new(window_size: usize, overlap_ratio: f64, filter_length: usize) -> Result<Self> {
        let cfg = Self {
            window_size,
            overlap_ratio,
            filter_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_window_size(self.window_size)?;
        let r = self.overlap_ratio;
        if !(r.is_finite() && (0.0..1.0).contains(&r)) || self.stride() < 1.0 {
            return Err(Error::BadOverlap(r));
        }
        if self.filter_length == 0 || self.filter_length % 2 == 0 {
            return Err(Error::BadFilterLength {
                length: self.filter_length,
                samples: 0,
            });
        }
        Ok(())
    }

    /// Fractional hop between consecutive window starts, `W * (1 - r)`.
    pub fn stride(&self) -> f64 {
        self.window_size as f64 * (1.0 - self.overlap_ratio)
    }

    /// Number of windows `segment` emits for a stream of `n` samples.
    pub fn window_count(&self, n: usize) -> usize {
        if n < self.window_size {
            return 0;
        }
        let span = (n - self.window_size) as f64;
        // The epsilon absorbs representation error in `1 - r` (0.9 -> 0.0999..98).
        math::floor(span / self.stride() + 1e-9) as usize + 1
    }

    /// Start offset of window `k`: `round(k * W * (1 - r))`.
    pub fn offset(&self, k: usize) -> usize {
        math::round(k as f64 * self.stride()) as usize
    }
}

pub fn validate_window_size(w: usize) -> Result<()> {
    if w < 8 || !w.is_power_of_two() {
        return Err(Error::BadWindowSize(w));
    }
    Ok(())
}

/// Centered `length`-tap moving average; edge samples use the widest
/// symmetric neighbourhood that fits.
pub fn lowpass_filter(stream: &TimeSeries, length: usize) -> Result<TimeSeries> {
    let n = stream.len();
    if length == 0 || length % 2 == 0 || length > n {
        return Err(Error::BadFilterLength { length, samples: n });
    }
    if length == 1 {
        return Ok(stream.clone());
    }
    let half = (length - 1) / 2;
    let src = stream.samples();
    let samples = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let span = &src[i - h..=i + h];
            let count = span.len() as f64;
            let (sx, sy, sz) = span
                .iter()
                .fold((0.0, 0.0, 0.0), |(a, b, c), s| (a + s.x, b + s.y, c + s.z));
            Sample::new(src[i].t_ms, sx / count, sy / count, sz / count)
        })
        .collect();
    Ok(TimeSeries {
        kind: stream.kind,
        sampling_hz: stream.sampling_hz,
        samples,
    })
}

/// Cuts `stream` into windows of `cfg.window_size` samples starting at
/// `round(k * W * (1 - r))` for `k = 0..window_count(N)`.
///
/// No filtering happens here; see [`filter_and_segment`].
pub fn segment(stream: &TimeSeries, cfg: &SegmentationConfig) -> Result<Vec<Window>> {
    cfg.validate()?;
    let w = cfg.window_size;
    let n = stream.len();
    if n < w {
        return Err(Error::InsufficientSamples {
            needed: w,
            available: n,
        });
    }
    let samples = stream.samples();
    let windows = (0..cfg.window_count(n))
        .map(|k| {
            let start = cfg.offset(k);
            let span = &samples[start..start + w];
            Window {
                source: stream.kind,
                index: k,
                start_index: start,
                end_t_ms: span[w - 1].t_ms,
                axes: [
                    span.iter().map(|s| s.x).collect(),
                    span.iter().map(|s| s.y).collect(),
                    span.iter().map(|s| s.z).collect(),
                ],
            }
        })
        .collect();
    Ok(windows)
}

/// Filters with `cfg.filter_length` taps, then segments.
pub fn filter_and_segment(stream: &TimeSeries, cfg: &SegmentationConfig) -> Result<Vec<Window>> {
    cfg.validate()?;
    if stream.len() < cfg.window_size {
        return Err(Error::InsufficientSamples {
            needed: cfg.window_size,
            available: stream.len(),
        });
    }
    let filtered = lowpass_filter(stream, cfg.filter_length)?;
    segment(&filtered, cfg)
}

/// Aligned window sets, one entry per window index `k`, each holding one
/// window per requested stream in the order of `kinds`.
///
/// Streams are paired by window index assuming a common start; the result is
/// truncated to the stream with the fewest windows.
pub fn segment_aligned(
    streams: &[TimeSeries],
    kinds: &[StreamKind],
    cfg: &SegmentationConfig,
) -> Result<Vec<Vec<Window>>> {
    let mut per_stream = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let stream = streams
            .iter()
            .find(|s| s.kind() == *kind)
            .ok_or(Error::MissingStream(*kind))?;
        per_stream.push(filter_and_segment(stream, cfg)?);
    }
    let count = per_stream.iter().map(Vec::len).min().unwrap_or(0);
    let mut iters: Vec<_> = per_stream.into_iter().map(Vec::into_iter).collect();
    Ok((0..count)
        .map(|_| iters.iter_mut().filter_map(Iterator::next).collect())
        .collect())
}

pub(crate) fn check_sampling(streams: &[TimeSeries], sampling_hz: f64) -> Result<()> {
    for s in streams {
        if (s.sampling_hz() - sampling_hz).abs() > 1e-9 * sampling_hz {
            return Err(Error::ConfigMismatch(format!(
                "{} sampled at {} Hz, expected {} Hz",
                s.kind(),
                s.sampling_hz(),
                sampling_hz
            )));
        }
    }
    Ok(())
}

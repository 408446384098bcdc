//! Time- and frequency-domain feature vectors for the baseline classifiers.
//!
//! Per stream, in canonical stream order:
//!
//! | features | count |
//! |---|---|
//! | per axis `x,y,z`: mean, min, max, std, var, fft_energy, fft_entropy | 21 |
//! | rms_corr: RMS of the three pairwise Pearson correlations | 1 |
//! | accelerometer: speed_mean, speed_median, speed_max | 3 |
//! | gyroscope: roll_mean, roll_median, roll_max | 3 |
//!
//! `std`/`var` are population moments. FFT energy is `sum |X_k|^2 / W` over
//! `k = 1..=W/2`; FFT entropy is the Shannon entropy (natural log) of the
//! same magnitudes normalised to sum one, and 0 for an all-zero spectrum.
//! Speed integrates the mean-removed acceleration (`v_0 = 0`,
//! `v_i = v_{i-1} + a_i / f_s`) and takes the Euclidean norm. Roll velocity
//! is the gyroscope x-axis series.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::activity::ActivityLabel;
use crate::error::{Error, Result};
use crate::math;
use crate::signal::{Sensor, StreamKind, Window};
use crate::spectral::{self, Fft};

const AXES: [&str; 3] = ["x", "y", "z"];
const AXIS_STATS: [&str; 7] = ["mean", "min", "max", "std", "var", "fft_energy", "fft_entropy"];

pub const FEATURES_PER_STREAM: usize = 3 * AXIS_STATS.len() + 1 + 3;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Arc<[String]>,
    pub label: Option<ActivityLabel>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Feature names for a stream selection, in extraction order.
pub fn feature_names(streams: &[StreamKind]) -> Vec<String> {
    let mut names = Vec::with_capacity(streams.len() * FEATURES_PER_STREAM);
    for kind in streams {
        for axis in AXES {
            for stat in AXIS_STATS {
                names.push(format!("{kind}.{axis}.{stat}"));
            }
        }
        names.push(format!("{kind}.rms_corr"));
        let prefix = match kind.sensor {
            Sensor::Accelerometer => "speed",
            Sensor::Gyroscope => "roll",
        };
        for stat in ["mean", "median", "max"] {
            names.push(format!("{kind}.{prefix}_{stat}"));
        }
    }
    names
}

/// Pearson correlation; 0 when either series has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let ma = math::mean(a);
    let mb = math::mean(b);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    (sab / math::sqrt(saa * sbb)).clamp(-1.0, 1.0)
}

/// Shannon entropy of magnitudes normalised to a distribution.
pub fn spectral_entropy(magnitudes: &[f64]) -> f64 {
    let total: f64 = magnitudes.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -magnitudes
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| {
            let p = m / total;
            p * math::ln(p)
        })
        .sum::<f64>()
}

/// Extracts feature vectors with a cached FFT plan.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    streams: Vec<StreamKind>,
    names: Arc<[String]>,
    sampling_hz: f64,
    window_size: usize,
    fft: Option<Fft>,
}

impl FeatureExtractor {
    pub fn new(streams: Vec<StreamKind>, window_size: usize, sampling_hz: f64) -> Result<Self> {
        if window_size < 2 {
            return Err(Error::DegenerateWindow(window_size));
        }
        if !(sampling_hz.is_finite() && sampling_hz > 0.0) {
            return Err(Error::BadSamplingRate(sampling_hz));
        }
        let fft = window_size
            .is_power_of_two()
            .then(|| Fft::new(window_size))
            .transpose()?;
        Ok(Self {
            names: feature_names(&streams).into(),
            streams,
            sampling_hz,
            window_size,
            fft,
        })
    }

    pub fn names(&self) -> &Arc<[String]> {
        &self.names
    }

    pub fn streams(&self) -> &[StreamKind] {
        &self.streams
    }

    fn magnitudes(&self, axis: &[f64]) -> Vec<f64> {
        match &self.fft {
            Some(fft) => fft.magnitudes(axis),
            None => spectral::direct_dft_magnitudes(axis),
        }
    }

    pub fn extract(&self, windows: &[Window]) -> Result<FeatureVector> {
        let w = self.window_size;
        let mut values = Vec::with_capacity(self.names.len());
        for kind in &self.streams {
            let window = windows
                .iter()
                .find(|win| win.source == *kind)
                .ok_or(Error::MissingStream(*kind))?;
            if window.axes.iter().any(|a| a.len() != w) {
                return Err(Error::ShapeMismatch(format!(
                    "{kind} window is not {w} samples on every axis"
                )));
            }
            for axis in &window.axes {
                let mean = math::mean(axis);
                let min = axis.iter().copied().fold(f64::INFINITY, f64::min);
                let max = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let var = axis.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / w as f64;
                let mut mags = self.magnitudes(axis);
                // rounding residue of the transform counts as zero
                let floor = 1e-9 * w as f64 * axis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                mags.iter_mut().filter(|m| **m <= floor).for_each(|m| *m = 0.0);
                let ac = &mags[1..];
                let energy = ac.iter().map(|m| m * m).sum::<f64>() / w as f64;
                values.extend([mean, min, max, math::sqrt(var), var, energy, spectral_entropy(ac)]);
            }
            let [x, y, z] = &window.axes;
            let corr = [pearson(x, y), pearson(x, z), pearson(y, z)];
            values.push(math::sqrt(corr.iter().map(|c| c * c).sum::<f64>() / 3.0));
            let series = match kind.sensor {
                Sensor::Accelerometer => self.speed(window),
                Sensor::Gyroscope => x.clone(),
            };
            let peak = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            values.extend([math::mean(&series), math::median(&series), peak]);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidStream(format!(
                "feature {} is not finite",
                self.names[i]
            )));
        }
        Ok(FeatureVector {
            values,
            names: self.names.clone(),
            label: None,
        })
    }

    fn speed(&self, window: &Window) -> Vec<f64> {
        let dt = 1.0 / self.sampling_hz;
        let means = window.axes.each_ref().map(|a| math::mean(a));
        let mut v = [0.0f64; 3];
        (0..window.len())
            .map(|i| {
                if i > 0 {
                    for d in 0..3 {
                        v[d] += (window.axes[d][i] - means[d]) * dt;
                    }
                }
                math::sqrt(v.iter().map(|c| c * c).sum())
            })
            .collect()
    }
}

/// One-shot feature extraction for an aligned window set.
pub fn extract_features(windows: &[Window], streams: &[StreamKind], sampling_hz: f64) -> Result<FeatureVector> {
    let w = windows.first().map(Window::len).unwrap_or(0);
    FeatureExtractor::new(streams.to_vec(), w, sampling_hz)?.extract(windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn win(kind: StreamKind, axes: [Vec<f64>; 3]) -> Window {
        Window {
            source: kind,
            index: 0,
            start_index: 0,
            end_t_ms: 0,
            axes,
        }
    }

    #[test]
    fn constant_axis_statistics() {
        let c = vec![3.5; 24];
        let w = win(StreamKind::PHONE_GYRO, [c.clone(), c.clone(), c]);
        let f = extract_features(&[w], &[StreamKind::PHONE_GYRO], 50.0).unwrap();
        for axis in AXES {
            let g = |s: &str| f.get(&format!("phone_gyro.{axis}.{s}")).unwrap();
            assert_eq!(g("mean"), 3.5);
            assert_eq!(g("min"), 3.5);
            assert_eq!(g("max"), 3.5);
            assert_eq!(g("std"), 0.0);
            assert_eq!(g("var"), 0.0);
            assert_eq!(g("fft_entropy"), 0.0);
            assert_eq!(g("fft_energy"), 0.0);
        }
        assert_eq!(f.get("phone_gyro.rms_corr").unwrap(), 0.0);
    }

    #[test]
    fn three_sample_mean_and_population_variance() {
        let a = vec![1.0, 2.0, 3.0];
        let w = win(StreamKind::WATCH_GYRO, [a.clone(), a.clone(), a]);
        let f = extract_features(&[w], &[StreamKind::WATCH_GYRO], 50.0).unwrap();
        assert_eq!(f.get("watch_gyro.x.mean").unwrap(), 2.0);
        assert!((f.get("watch_gyro.x.var").unwrap() - 2.0 / 3.0).abs() < 1e-15);
        // identical axes correlate perfectly
        assert!((f.get("watch_gyro.rms_corr").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(f.get("watch_gyro.roll_median").unwrap(), 2.0);
    }

    #[test]
    fn pearson_edge_cases() {
        assert!((pearson(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]) - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 4.0], &[-1.0, -2.0, -4.0]) + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[1.0, 1.0], &[0.0, 5.0]), 0.0);
    }

    #[test]
    fn speed_of_constant_acceleration_is_zero() {
        let g = vec![9.81; 32];
        let w = win(StreamKind::PHONE_ACCEL, [g.clone(), g.clone(), g]);
        let f = extract_features(&[w], &[StreamKind::PHONE_ACCEL], 50.0).unwrap();
        assert!(f.get("phone_accel.speed_max").unwrap() < 1e-12);
    }

    #[test]
    fn names_and_lengths() {
        let streams = [StreamKind::PHONE_ACCEL, StreamKind::WATCH_GYRO];
        let names = feature_names(&streams);
        assert_eq!(names.len(), 2 * FEATURES_PER_STREAM);
        let unique: alloc::collections::BTreeSet<_> = names.iter().collect();
        assert_eq!(unique.len(), names.len());
        assert_eq!(names[0], "phone_accel.x.mean");
        assert_eq!(names[FEATURES_PER_STREAM - 1], "phone_accel.speed_max");
        assert_eq!(names.last().unwrap(), "watch_gyro.roll_max");
    }

    #[test]
    fn degenerate_and_mismatched_windows() {
        let w = win(StreamKind::PHONE_ACCEL, [vec![1.0], vec![1.0], vec![1.0]]);
        assert_eq!(
            extract_features(&[w], &[StreamKind::PHONE_ACCEL], 50.0),
            Err(Error::DegenerateWindow(1))
        );
        let w = win(StreamKind::PHONE_ACCEL, [vec![1.0; 8], vec![1.0; 7], vec![1.0; 8]]);
        assert!(matches!(
            extract_features(&[w], &[StreamKind::PHONE_ACCEL], 50.0),
            Err(Error::ShapeMismatch(_))
        ));
    }
}

//! Dominant-frequency activity matching.
//!
//! Every aligned window set becomes a [`WindowSignature`]: for each sensor
//! axis, the hashed dominant frequency of each of `g` spectrum bins. Training
//! stores equalized signature lists per activity; classification scores a
//! test signature against every stored one with `(m/s)^s`, where `m` of the
//! `s` axes match exactly, and picks the activity with the largest sum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activity::{ActivityKind, ActivityLabel, Placement, Recording};
use crate::error::{Error, Result};
use crate::math;
use crate::signal::{self, SegmentationConfig, SensorSubset, StreamKind, Window};
use crate::spectral::{self, HashFunction, HashSpec, SpectrumAnalyzer};

pub const MODEL_VERSION: &str = "dfam/1";

const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

/// Parameters shared by training and classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfamConfig {
    pub window_size: usize,
    pub overlap_ratio: f64,
    pub bins: usize,
    pub hash: HashFunction,
    pub sampling_hz: f64,
    /// Streams in canonical order; they fix the signature axis order.
    pub streams: Vec<StreamKind>,
    pub placement: Option<Placement>,
    pub filter_length: usize,
    /// Seed of the equalization sampler.
    pub seed: u64,
}

impl Default for DfamConfig {
    fn default() -> Self {
        Self {
            window_size: 128,
            overlap_ratio: 0.7,
            bins: 3,
            hash: HashFunction::H2,
            sampling_hz: signal::DEFAULT_SAMPLING_HZ,
            streams: SensorSubset::Both.streams(),
            placement: None,
            filter_length: 3,
            seed: 0,
        }
    }
}

impl DfamConfig {
    pub fn validate(&self) -> Result<()> {
        self.segmentation().validate()?;
        self.hash_spec()?;
        if self.streams.is_empty() {
            return Err(Error::InvalidParameter("no streams selected".to_string()));
        }
        if self.streams.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "streams must be distinct and in canonical order".to_string(),
            ));
        }
        Ok(())
    }

    pub fn segmentation(&self) -> SegmentationConfig {
        SegmentationConfig {
            window_size: self.window_size,
            overlap_ratio: self.overlap_ratio,
            filter_length: self.filter_length,
        }
    }

    pub fn hash_spec(&self) -> Result<HashSpec> {
        HashSpec::new(self.hash, self.sampling_hz, self.window_size, self.bins)
    }

    /// Number of signature axes `s`.
    pub fn axis_count(&self) -> usize {
        3 * self.streams.len()
    }

    /// Axis names in signature order, e.g. `phone_accel.x`.
    pub fn axis_order(&self) -> Vec<String> {
        self.streams
            .iter()
            .flat_map(|k| AXIS_NAMES.iter().map(move |a| format!("{k}.{a}")))
            .collect()
    }
}

/// Per-axis `g`-tuples of bucket ids for one aligned window set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WindowSignature {
    pub axes: Vec<Vec<u32>>,
}

impl WindowSignature {
    pub fn new(axes: Vec<Vec<u32>>) -> Result<Self> {
        let g = axes.first().map(Vec::len).unwrap_or(0);
        if axes.is_empty() || g == 0 || axes.iter().any(|a| a.len() != g) {
            return Err(Error::ShapeMismatch(
                "signature axes must be non-empty and of equal length".to_string(),
            ));
        }
        Ok(Self { axes })
    }

    pub fn axis_count(&self) -> usize {
        self.axes.len()
    }

    pub fn bins(&self) -> usize {
        self.axes.first().map(Vec::len).unwrap_or(0)
    }
}

/// Computes signatures with a cached FFT plan.
#[derive(Debug, Clone)]
pub struct SignatureBuilder {
    analyzer: SpectrumAnalyzer,
    spec: HashSpec,
    streams: Vec<StreamKind>,
}

impl SignatureBuilder {
    pub fn new(spec: HashSpec, streams: Vec<StreamKind>) -> Result<Self> {
        Ok(Self {
            analyzer: SpectrumAnalyzer::new(spec.window_size, spec.sampling_hz)?,
            spec,
            streams,
        })
    }

    pub fn from_config(cfg: &DfamConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(cfg.hash_spec()?, cfg.streams.clone())
    }

    pub fn hash_spec(&self) -> &HashSpec {
        &self.spec
    }

    /// Signature of one aligned window set; `windows` may hold extra
    /// streams, which are ignored.
    pub fn build(&self, windows: &[Window]) -> Result<WindowSignature> {
        let index = windows.first().map(|w| w.index);
        if windows.iter().any(|w| Some(w.index) != index) {
            return Err(Error::MisalignedWindows(format!(
                "window indices {:?}",
                windows.iter().map(|w| w.index).collect::<Vec<_>>()
            )));
        }
        let mut axes = Vec::with_capacity(3 * self.streams.len());
        for kind in &self.streams {
            let window = windows
                .iter()
                .find(|w| w.source == *kind)
                .ok_or(Error::MissingStream(*kind))?;
            if window.len() != self.spec.window_size {
                return Err(Error::ShapeMismatch(format!(
                    "{kind} window has {} samples, expected {}",
                    window.len(),
                    self.spec.window_size
                )));
            }
            for axis in &window.axes {
                let spectrum = self.analyzer.spectrum(axis)?;
                let df = spectral::dominant_frequencies(&spectrum, self.spec.bins, self.spec.sampling_hz)?;
                axes.push(spectral::hash_tuple(&df, &self.spec)?);
            }
        }
        Ok(WindowSignature { axes })
    }

    /// Filters, segments and signs every aligned window of a recording.
    pub fn recording(&self, rec: &Recording, seg: &SegmentationConfig) -> Result<Vec<WindowSignature>> {
        signal::check_sampling(&rec.streams, self.spec.sampling_hz)?;
        signal::segment_aligned(&rec.streams, &self.streams, seg)?
            .iter()
            .map(|set| self.build(set))
            .collect()
    }
}

/// One-shot signature of an aligned window set.
pub fn build_signature(windows: &[Window], streams: &[StreamKind], spec: &HashSpec) -> Result<WindowSignature> {
    SignatureBuilder::new(*spec, streams.to_vec())?.build(windows)
}

/// Stored training instances of one activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivitySignatures {
    pub label: String,
    pub kind: ActivityKind,
    pub signatures: Vec<WindowSignature>,
}

impl ActivitySignatures {
    pub fn activity(&self) -> ActivityLabel {
        ActivityLabel {
            name: self.label.clone(),
            kind: self.kind,
        }
    }
}

/// Trained signature store. Activities are kept sorted by label name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfamModel {
    pub version: String,
    pub config: ModelConfig,
    pub activities: Vec<ActivitySignatures>,
}

/// [`DfamConfig`] plus the axis order it implies, as written to model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub dfam: DfamConfig,
    pub axis_order: Vec<String>,
}

impl DfamModel {
    pub fn new(config: DfamConfig, mut activities: Vec<ActivitySignatures>) -> Result<Self> {
        activities.sort_by(|a, b| a.label.cmp(&b.label));
        let axis_order = config.axis_order();
        let model = Self {
            version: MODEL_VERSION.to_string(),
            config: ModelConfig {
                dfam: config,
                axis_order,
            },
            activities,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn config(&self) -> &DfamConfig {
        &self.config.dfam
    }

    /// Structural checks applied after loading: version, axis order,
    /// signature shapes and bucket ranges.
    pub fn validate(&self) -> Result<()> {
        if self.version != MODEL_VERSION {
            return Err(Error::CorruptModel(format!(
                "unsupported version {:?}",
                self.version
            )));
        }
        let cfg = &self.config.dfam;
        cfg.validate()
            .map_err(|e| Error::CorruptModel(format!("bad config: {e}")))?;
        if self.config.axis_order != cfg.axis_order() {
            return Err(Error::CorruptModel(
                "axis order does not match the stream list".to_string(),
            ));
        }
        let s = cfg.axis_count();
        let h = cfg.hash_spec()?.bucket_count();
        for pair in self.activities.windows(2) {
            if pair[0].label >= pair[1].label {
                return Err(Error::CorruptModel(format!(
                    "activity labels unsorted or duplicated at {:?}",
                    pair[1].label
                )));
            }
        }
        for act in &self.activities {
            if act.label.trim().is_empty() {
                return Err(Error::CorruptModel("empty activity label".to_string()));
            }
            for sig in &act.signatures {
                if sig.axis_count() != s || sig.axes.iter().any(|a| a.len() != cfg.bins) {
                    return Err(Error::CorruptModel(format!(
                        "signature of {:?} does not have {s} axes of {} bins",
                        act.label, cfg.bins
                    )));
                }
                if sig.axes.iter().flatten().any(|&b| b >= h) {
                    return Err(Error::CorruptModel(format!(
                        "bucket id out of range in {:?}",
                        act.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<ActivityLabel> {
        self.activities.iter().map(ActivitySignatures::activity).collect()
    }

    pub fn signature_count(&self) -> usize {
        self.activities.iter().map(|a| a.signatures.len()).sum()
    }

    pub fn counts(&self) -> Vec<(String, usize)> {
        self.activities
            .iter()
            .map(|a| (a.label.clone(), a.signatures.len()))
            .collect()
    }

    /// Appends one labelled signature; earlier records are left untouched.
    pub fn append(&mut self, label: &ActivityLabel, signature: WindowSignature) -> Result<()> {
        let cfg = &self.config.dfam;
        if signature.axis_count() != cfg.axis_count() || signature.bins() != cfg.bins {
            return Err(Error::ShapeMismatch(format!(
                "signature {}x{} vs model {}x{}",
                signature.axis_count(),
                signature.bins(),
                cfg.axis_count(),
                cfg.bins
            )));
        }
        match self.activities.binary_search_by(|a| a.label.as_str().cmp(&label.name)) {
            Ok(i) => self.activities[i].signatures.push(signature),
            Err(i) => self.activities.insert(
                i,
                ActivitySignatures {
                    label: label.name.clone(),
                    kind: label.kind,
                    signatures: alloc::vec![signature],
                },
            ),
        }
        Ok(())
    }
}

/// Seeded uniform downsampling of every list to the shortest list's length.
/// Surviving signatures keep their original order.
pub fn equalize(
    per_activity: BTreeMap<ActivityLabel, Vec<WindowSignature>>,
    seed: u64,
) -> Vec<ActivitySignatures> {
    let min = per_activity.values().map(Vec::len).min().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    per_activity
        .into_iter()
        .map(|(label, sigs)| {
            let kept = if sigs.len() > min {
                let mut picked = rand::seq::index::sample(&mut rng, sigs.len(), min).into_vec();
                picked.sort_unstable();
                let mut slots: Vec<Option<WindowSignature>> = sigs.into_iter().map(Some).collect();
                picked.into_iter().filter_map(|i| slots[i].take()).collect()
            } else {
                sigs
            };
            ActivitySignatures {
                label: label.name,
                kind: label.kind,
                signatures: kept,
            }
        })
        .collect()
}

/// Builds an equalized model from precomputed signatures.
pub fn train_from_signatures(
    per_activity: Vec<(ActivityLabel, Vec<WindowSignature>)>,
    cfg: &DfamConfig,
) -> Result<DfamModel> {
    cfg.validate()?;
    let mut grouped: BTreeMap<ActivityLabel, Vec<WindowSignature>> = BTreeMap::new();
    for (label, sigs) in per_activity {
        grouped.entry(label).or_default().extend(sigs);
    }
    if grouped.is_empty() {
        return Err(Error::EmptyModel);
    }
    let mut names = BTreeMap::new();
    for label in grouped.keys() {
        if let Some(kind) = names.insert(label.name.clone(), label.kind) {
            if kind != label.kind {
                return Err(Error::InvalidLabel(format!(
                    "{:?} used with two different kinds",
                    label.name
                )));
            }
        }
    }
    if let Some((label, _)) = grouped.iter().find(|(_, s)| s.is_empty()) {
        return Err(Error::EmptyActivity(label.name.clone()));
    }
    let s = cfg.axis_count();
    if grouped
        .values()
        .flatten()
        .any(|sig| sig.axis_count() != s || sig.bins() != cfg.bins)
    {
        return Err(Error::ShapeMismatch(format!(
            "training signatures must have {s} axes of {} bins",
            cfg.bins
        )));
    }
    DfamModel::new(cfg.clone(), equalize(grouped, cfg.seed))
}

/// Segments and signs every recording, then trains an equalized model.
///
/// Recordings shorter than one window contribute nothing; an activity left
/// without any window is an error.
pub fn train<'a>(recordings: impl IntoIterator<Item = &'a Recording>, cfg: &DfamConfig) -> Result<DfamModel> {
    let builder = SignatureBuilder::from_config(cfg)?;
    let seg = cfg.segmentation();
    let mut per_activity = Vec::new();
    for rec in recordings {
        let sigs = match builder.recording(rec, &seg) {
            Ok(s) => s,
            Err(Error::InsufficientSamples { .. }) => Vec::new(),
            Err(e) => return Err(e),
        };
        per_activity.push((rec.label.clone(), sigs));
    }
    train_from_signatures(per_activity, cfg)
}

/// Number of axes whose `g`-tuples are identical.
#[inline]
pub fn matching_axes(a: &WindowSignature, b: &WindowSignature) -> usize {
    a.axes.iter().zip(&b.axes).filter(|(x, y)| x == y).count()
}

fn check_shapes(a: &WindowSignature, b: &WindowSignature) -> Result<()> {
    if a.axis_count() != b.axis_count() || a.bins() != b.bins() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.axis_count(),
            a.bins(),
            b.axis_count(),
            b.bins()
        )));
    }
    Ok(())
}

/// `(m/s)^s` for `m` matching axes out of `s`.
pub fn score(test: &WindowSignature, train_instance: &WindowSignature) -> Result<f64> {
    check_shapes(test, train_instance)?;
    let s = test.axis_count();
    let m = matching_axes(test, train_instance);
    Ok(math::powi(m as f64 / s as f64, s as u32))
}

/// Result of matching one test signature against a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: ActivityLabel,
    /// Aggregate score per activity, in model (label) order.
    pub scores: Vec<(String, f64)>,
    /// Number of stored signatures compared.
    pub comparisons: usize,
}

impl Classification {
    pub fn best_score(&self) -> f64 {
        self.scores
            .iter()
            .find(|(n, _)| *n == self.label.name)
            .map(|(_, s)| *s)
            .unwrap_or(0.0)
    }
}

/// Picks the activity with the largest summed score; ties go to the
/// lexicographically smallest label.
///
/// Sums are accumulated exactly as `sum m^s` (the scores scaled by `s^s`),
/// so equal aggregates compare equal regardless of summation order.
pub fn classify(test: &WindowSignature, model: &DfamModel) -> Result<Classification> {
    let cfg = model.config();
    let s = cfg.axis_count();
    if model.signature_count() == 0 {
        return Err(Error::EmptyModel);
    }
    if test.axis_count() != s || test.bins() != cfg.bins {
        return Err(Error::ShapeMismatch(format!(
            "test signature {}x{} vs model {}x{}",
            test.axis_count(),
            test.bins(),
            s,
            cfg.bins
        )));
    }
    let weights: Vec<u128> = (0..=s as u32).map(|m| (m as u128).pow(s as u32)).collect();
    let scale = weights[s] as f64;
    let mut best: Option<(usize, u128)> = None;
    let mut scores = Vec::with_capacity(model.activities.len());
    let mut comparisons = 0;
    for (i, act) in model.activities.iter().enumerate() {
        let total: u128 = act
            .signatures
            .iter()
            .map(|sig| weights[matching_axes(test, sig)])
            .sum();
        comparisons += act.signatures.len();
        scores.push((act.label.clone(), total as f64 / scale));
        // activities are sorted by name, so strict > keeps the smallest on ties
        if best.is_none_or(|(_, b)| total > b) {
            best = Some((i, total));
        }
    }
    let (idx, _) = best.ok_or(Error::EmptyModel)?;
    Ok(Classification {
        label: model.activities[idx].activity(),
        scores,
        comparisons,
    })
}

/// Optional stream-level smoothing: each window takes the most frequent
/// label among itself and up to `radius` neighbours on either side
/// (ties to the smallest label).
pub fn majority_smooth(labels: &[String], radius: usize) -> Vec<String> {
    (0..labels.len())
        .map(|i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius + 1).min(labels.len());
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for l in &labels[lo..hi] {
                *counts.entry(l.as_str()).or_default() += 1;
            }
            let mut winner = ("", 0);
            for (l, c) in counts {
                if c > winner.1 {
                    winner = (l, c);
                }
            }
            winner.0.to_string()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    use crate::signal::TimeSeries;

    fn sig(axes: &[[u32; 3]]) -> WindowSignature {
        WindowSignature::new(axes.iter().map(|a| a.to_vec()).collect()).unwrap()
    }

    fn label(n: &str) -> ActivityLabel {
        ActivityLabel::named(n).unwrap()
    }

    fn phone_accel_cfg() -> DfamConfig {
        DfamConfig {
            streams: vec![StreamKind::PHONE_ACCEL],
            ..DfamConfig::default()
        }
    }

    fn window(kind: StreamKind, index: usize, axes: [Vec<f64>; 3]) -> Window {
        Window {
            source: kind,
            index,
            start_index: 0,
            end_t_ms: 0,
            axes,
        }
    }

    #[test]
    fn score_piecewise_values() {
        let a = sig(&[[0, 1, 2], [1, 1, 1], [2, 2, 2]]);
        assert_eq!(score(&a, &a).unwrap(), 1.0);
        let none = sig(&[[1, 1, 2], [0, 1, 1], [2, 0, 2]]);
        assert_eq!(score(&a, &none).unwrap(), 0.0);
        let two = sig(&[[0, 1, 2], [1, 1, 1], [2, 2, 0]]);
        assert!((score(&a, &two).unwrap() - 8.0 / 27.0).abs() < 1e-15);
        assert!(matches!(
            score(&a, &sig(&[[0, 1, 2]])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn zero_windows_give_identical_tie_break_tuples() {
        let spec = HashSpec::new(HashFunction::H2, 50.0, 128, 3).unwrap();
        let z = vec![0.0; 128];
        let w = window(StreamKind::PHONE_ACCEL, 0, [z.clone(), z.clone(), z]);
        let s = build_signature(&[w], &[StreamKind::PHONE_ACCEL], &spec).unwrap();
        assert_eq!(s.axis_count(), 3);
        assert_eq!(s.axes[0], s.axes[1]);
        assert_eq!(s.axes[1], s.axes[2]);
        // lowest frequencies of each bin: indices 1, 22, 43
        let expected: Vec<u32> = [1usize, 22, 43]
            .iter()
            .map(|&k| spectral::hash_frequency(k as f64 * 50.0 / 128.0, &spec).unwrap())
            .collect();
        assert_eq!(s.axes[0], expected);
    }

    #[test]
    fn tone_on_x_touches_only_first_bin() {
        let x: Vec<f64> = (0..128)
            .map(|t| libm::sin(2.0 * PI * (5 * t) as f64 / 128.0))
            .collect();
        let z = vec![0.0; 128];
        let w = window(StreamKind::PHONE_ACCEL, 0, [x, z.clone(), z]);
        for (function, first_bin_differs) in [(HashFunction::H2, false), (HashFunction::H5, true)] {
            let spec = HashSpec::new(function, 50.0, 128, 3).unwrap();
            let s = build_signature(core::slice::from_ref(&w), &[StreamKind::PHONE_ACCEL], &spec).unwrap();
            assert_eq!(s.axes[1], s.axes[2]);
            assert_eq!(s.axes[0][1..], s.axes[1][1..]);
            // 1.953 Hz and the empty-bin 0.39 Hz share H2's bucket 0; H5 keeps them apart
            assert_eq!(s.axes[0][0] != s.axes[1][0], first_bin_differs);
        }
    }

    #[test]
    fn swapping_axes_swaps_signature_entries() {
        let spec = HashSpec::new(HashFunction::H6, 50.0, 64, 3).unwrap();
        let a: Vec<f64> = (0..64).map(|t| libm::sin(0.7 * t as f64)).collect();
        let b: Vec<f64> = (0..64).map(|t| libm::cos(2.1 * t as f64)).collect();
        let c = vec![0.0; 64];
        let w1 = window(StreamKind::WATCH_GYRO, 3, [a.clone(), b.clone(), c.clone()]);
        let w2 = window(StreamKind::WATCH_GYRO, 3, [b, a, c]);
        let s1 = build_signature(&[w1], &[StreamKind::WATCH_GYRO], &spec).unwrap();
        let s2 = build_signature(&[w2], &[StreamKind::WATCH_GYRO], &spec).unwrap();
        assert_eq!(s1.axes[0], s2.axes[1]);
        assert_eq!(s1.axes[1], s2.axes[0]);
        assert_eq!(s1.axes[2], s2.axes[2]);
    }

    #[test]
    fn misaligned_and_missing_windows() {
        let spec = HashSpec::new(HashFunction::H2, 50.0, 64, 3).unwrap();
        let z = vec![0.0; 64];
        let a = window(StreamKind::PHONE_ACCEL, 0, [z.clone(), z.clone(), z.clone()]);
        let b = window(StreamKind::WATCH_ACCEL, 1, [z.clone(), z.clone(), z.clone()]);
        let kinds = [StreamKind::PHONE_ACCEL, StreamKind::WATCH_ACCEL];
        assert!(matches!(
            build_signature(&[a.clone(), b], &kinds, &spec),
            Err(Error::MisalignedWindows(_))
        ));
        assert_eq!(
            build_signature(&[a], &kinds, &spec),
            Err(Error::MissingStream(StreamKind::WATCH_ACCEL))
        );
    }

    #[test]
    fn equalization_downsamples_to_min_count() {
        let mut per = BTreeMap::new();
        for (name, n) in [("a", 10u32), ("b", 7), ("c", 9)] {
            per.insert(label(name), (0..n).map(|i| sig(&[[i, 0, 0]])).collect::<Vec<_>>());
        }
        let eq = equalize(per.clone(), 42);
        assert!(eq.iter().all(|a| a.signatures.len() == 7));
        // b is kept whole and in order; others keep increasing order
        assert_eq!(eq[1].signatures, per[&label("b")]);
        for a in &eq {
            let ids: Vec<u32> = a.signatures.iter().map(|s| s.axes[0][0]).collect();
            assert!(ids.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(eq, equalize(per, 42));
    }

    #[test]
    fn minimal_model_and_empty_activity() {
        let cfg = phone_accel_cfg();
        let one = vec![(label("walking"), vec![sig(&[[0, 0, 0], [1, 1, 1], [2, 2, 2]])])];
        let m = train_from_signatures(one, &cfg).unwrap();
        assert_eq!(m.signature_count(), 1);
        let empty = vec![(label("walking"), vec![])];
        assert_eq!(
            train_from_signatures(empty, &cfg),
            Err(Error::EmptyActivity("walking".into()))
        );
    }

    #[test]
    fn classify_exact_match_and_ties() {
        let cfg = phone_accel_cfg();
        let walking = sig(&[[0, 0, 0], [1, 1, 1], [2, 2, 2]]);
        let other = sig(&[[1, 0, 0], [2, 1, 1], [0, 2, 2]]);
        let model = train_from_signatures(
            vec![(label("walking"), vec![walking.clone()]), (label("running"), vec![other.clone()])],
            &cfg,
        )
        .unwrap();
        let c = classify(&walking, &model).unwrap();
        assert_eq!(c.label.name, "walking");
        assert_eq!(c.comparisons, 2);
        assert_eq!(c.best_score(), 1.0);

        let tied = train_from_signatures(
            vec![(label("zeta"), vec![walking.clone()]), (label("alpha"), vec![walking.clone()])],
            &cfg,
        )
        .unwrap();
        assert_eq!(classify(&other, &tied).unwrap().label.name, "alpha");
        assert_eq!(classify(&walking, &tied).unwrap().label.name, "alpha");
    }

    #[test]
    fn classify_rejects_bad_shapes() {
        let cfg = phone_accel_cfg();
        let model = train_from_signatures(vec![(label("a"), vec![sig(&[[0, 0, 0]; 3])])], &cfg).unwrap();
        assert!(matches!(
            classify(&sig(&[[0, 0, 0]]), &model),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn model_validation_guards() {
        let cfg = phone_accel_cfg();
        let mut m = train_from_signatures(vec![(label("a"), vec![sig(&[[0, 0, 0]; 3])])], &cfg).unwrap();
        m.version = "dfam/0".into();
        assert!(matches!(m.validate(), Err(Error::CorruptModel(_))));
        m.version = MODEL_VERSION.into();
        m.activities[0].signatures[0].axes[0][0] = 99;
        assert!(matches!(m.validate(), Err(Error::CorruptModel(_))));
    }

    #[test]
    fn append_adds_one_signature() {
        let cfg = phone_accel_cfg();
        let base = sig(&[[0, 0, 0]; 3]);
        let mut m = train_from_signatures(vec![(label("running"), vec![base.clone()])], &cfg).unwrap();
        m.append(&label("running"), sig(&[[1, 1, 1]; 3])).unwrap();
        m.append(&label("cycling"), base.clone()).unwrap();
        assert_eq!(m.counts(), vec![("cycling".into(), 1), ("running".into(), 2)]);
        assert_eq!(m.activities[1].signatures[0], base);
        m.validate().unwrap();
    }

    #[test]
    fn train_segments_recordings() {
        let n = 600;
        let mk = |freq: f64, name: &str| {
            let x: Vec<f64> = (0..n).map(|t| libm::sin(2.0 * PI * freq * t as f64 / 50.0)).collect();
            let z = vec![0.0; n];
            let ts = TimeSeries::from_axes(StreamKind::PHONE_ACCEL, 50.0, &x, &z, &z).unwrap();
            Recording::new("p1", Placement::RR, label(name), vec![ts]).unwrap()
        };
        let recs = [mk(2.0, "walking"), mk(4.0, "running")];
        let cfg = DfamConfig {
            window_size: 64,
            overlap_ratio: 0.5,
            ..phone_accel_cfg()
        };
        let model = train(&recs, &cfg).unwrap();
        let per = cfg.segmentation().window_count(n);
        assert_eq!(model.counts(), vec![("running".into(), per), ("walking".into(), per)]);

        let mismatched = DfamConfig {
            sampling_hz: 100.0,
            ..cfg
        };
        assert!(matches!(train(&recs, &mismatched), Err(Error::ConfigMismatch(_))));
    }

    #[test]
    fn majority_smoothing() {
        let l: Vec<String> = ["a", "b", "a", "a", "c", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(majority_smooth(&l, 0), l);
        assert_eq!(majority_smooth(&l, 1), vec!["a", "a", "a", "a", "c", "c"]);
    }
}

//! Cross-validation splits, confusion matrices and the fold driver.
//!
//! Splits are made over recordings, never over windows, so overlapping
//! windows of one recording cannot land on both sides of a fold. A
//! [`Pipeline`] turns each recording into test items once; every fold then
//! fits on its training recordings and predicts each test item.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activity::{ActivityLabel, Dataset, Recording};
use crate::baselines::{Classifier, ClassifierParams};
use crate::dfam::{self, DfamConfig, SignatureBuilder, WindowSignature};
use crate::error::{Error, Result};
use crate::features::FeatureExtractor;
use crate::signal::{self, SegmentationConfig};

/// Train/test item indices of one fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub index: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Subject held out by a leave-one-subject-out fold.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub held_out: Option<String>,
}

/// Seeded shuffle into `k` folds; the first `n % k` folds get one extra item.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 || k > n {
        return Err(Error::BadFoldCount { folds: k, items: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    Ok((0..k)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let mut test = order[start..start + len].to_vec();
            test.sort_unstable();
            start += len;
            let train = (0..n).filter(|j| test.binary_search(j).is_err()).collect();
            Fold {
                index: i,
                train,
                test,
                held_out: None,
            }
        })
        .collect())
}

/// One fold per distinct subject (sorted), holding that subject out.
pub fn loso_split(dataset: &Dataset) -> Result<Vec<Fold>> {
    let subjects = dataset.subjects();
    if subjects.len() < 2 {
        return Err(Error::SingleSubject);
    }
    Ok(subjects
        .into_iter()
        .enumerate()
        .map(|(index, subject)| {
            let (test, train) = (0..dataset.len()).partition(|&i| dataset.recordings[i].subject == subject);
            Fold {
                index,
                train,
                test,
                held_out: Some(subject),
            }
        })
        .collect())
}

/// Deterministic per-fold seed (splitmix64 of master and fold index).
pub fn fold_seed(master: u64, fold: usize) -> u64 {
    let mut z = master ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Something that can be trained on labelled recordings and applied to
/// per-window items. This is the slot other classifiers plug into.
pub trait Pipeline {
    type Item;
    type Model;

    /// Per-window items of one recording, in window order.
    fn items(&self, recording: &Recording) -> Result<Vec<Self::Item>>;

    fn fit(&self, training: &[(&ActivityLabel, &[Self::Item])], seed: u64) -> Result<Self::Model>;

    fn predict(&self, model: &Self::Model, item: &Self::Item) -> Result<String>;
}

/// Items for every recording; recordings shorter than one window yield none.
pub fn prepare<P: Pipeline>(pipeline: &P, dataset: &Dataset) -> Result<Vec<Vec<P::Item>>> {
    dataset
        .recordings
        .iter()
        .map(|rec| match pipeline.items(rec) {
            Err(Error::InsufficientSamples { .. }) => Ok(Vec::new()),
            other => other,
        })
        .collect()
}

/// `(actual, predicted)` pairs of one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub index: usize,
    pub held_out: Option<String>,
    pub predictions: Vec<(String, String)>,
}

impl FoldOutcome {
    pub fn accuracy(&self) -> Option<f64> {
        if self.predictions.is_empty() {
            return None;
        }
        let hits = self.predictions.iter().filter(|(a, p)| a == p).count();
        Some(hits as f64 / self.predictions.len() as f64)
    }
}

/// Trains on the fold's training side and predicts every test item.
pub fn evaluate_fold<P: Pipeline>(
    pipeline: &P,
    dataset: &Dataset,
    items: &[Vec<P::Item>],
    fold: &Fold,
    master_seed: u64,
) -> Result<FoldOutcome> {
    let training: Vec<(&ActivityLabel, &[P::Item])> = fold
        .train
        .iter()
        .map(|&i| (&dataset.recordings[i].label, items[i].as_slice()))
        .collect();
    let model = pipeline
        .fit(&training, fold_seed(master_seed, fold.index))
        .map_err(|e| Error::FoldTrainingFailure {
            fold: fold.index,
            source: Box::new(e),
        })?;
    let mut predictions = Vec::new();
    for &i in &fold.test {
        let actual = &dataset.recordings[i].label.name;
        for item in &items[i] {
            predictions.push((actual.clone(), pipeline.predict(&model, item)?));
        }
    }
    Ok(FoldOutcome {
        index: fold.index,
        held_out: fold.held_out.clone(),
        predictions,
    })
}

/// Square count matrix; rows are actual labels, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl Confusion {
    pub fn new(labels: impl IntoIterator<Item = String>) -> Self {
        let labels: Vec<String> = labels.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let n = labels.len();
        Self {
            labels,
            counts: alloc::vec![alloc::vec![0; n]; n],
        }
    }

    fn slot(&mut self, label: &str) -> usize {
        match self.labels.binary_search_by(|l| l.as_str().cmp(label)) {
            Ok(i) => i,
            Err(i) => {
                self.labels.insert(i, label.into());
                for row in &mut self.counts {
                    row.insert(i, 0);
                }
                self.counts.insert(i, alloc::vec![0; self.labels.len()]);
                i
            }
        }
    }

    pub fn record(&mut self, actual: &str, predicted: &str) {
        let a = self.slot(actual);
        let p = self.slot(predicted);
        self.counts[a][p] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.trace() as f64 / total as f64)
    }

    pub fn row_total(&self, label: &str) -> u64 {
        self.labels
            .iter()
            .position(|l| l == label)
            .map_or(0, |i| self.counts[i].iter().sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub held_out: Option<String>,
    pub test_windows: usize,
    /// `None` when the fold had no test windows.
    pub accuracy: Option<f64>,
}

/// Per-stage wall-clock durations in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub read_ms: f64,
    pub process_ms: f64,
    pub signature_ms: f64,
    pub classify_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: String,
    pub pipeline: String,
    /// Pooled accuracy over every test window: trace / total.
    pub accuracy: f64,
    /// Mean of the per-fold accuracies (folds without test windows skipped).
    pub mean_fold_accuracy: f64,
    pub test_windows: u64,
    pub per_fold: Vec<FoldReport>,
    pub confusion: Confusion,
    /// Wall-clock timings are left out unless asked for, so that reports
    /// stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<StageTimings>,
}

impl EvalReport {
    /// Merges fold outcomes; `labels` seeds the confusion axes.
    pub fn merge(
        protocol: impl Into<String>,
        pipeline: impl Into<String>,
        labels: impl IntoIterator<Item = String>,
        mut outcomes: Vec<FoldOutcome>,
    ) -> Self {
        outcomes.sort_by_key(|o| o.index);
        let mut confusion = Confusion::new(labels);
        let mut per_fold = Vec::with_capacity(outcomes.len());
        for o in &outcomes {
            for (a, p) in &o.predictions {
                confusion.record(a, p);
            }
            per_fold.push(FoldReport {
                index: o.index,
                held_out: o.held_out.clone(),
                test_windows: o.predictions.len(),
                accuracy: o.accuracy(),
            });
        }
        let scored: Vec<f64> = per_fold.iter().filter_map(|f| f.accuracy).collect();
        let mean_fold_accuracy = if scored.is_empty() {
            0.0
        } else {
            scored.iter().sum::<f64>() / scored.len() as f64
        };
        Self {
            protocol: protocol.into(),
            pipeline: pipeline.into(),
            accuracy: confusion.accuracy().unwrap_or(0.0),
            mean_fold_accuracy,
            test_windows: confusion.total(),
            per_fold,
            confusion,
            timing: None,
        }
    }
}

/// Sequential evaluation over the given folds.
pub fn evaluate<P: Pipeline>(
    pipeline: &P,
    name: &str,
    protocol: &str,
    dataset: &Dataset,
    folds: &[Fold],
    seed: u64,
) -> Result<EvalReport> {
    let items = prepare(pipeline, dataset)?;
    let outcomes = folds
        .iter()
        .map(|fold| evaluate_fold(pipeline, dataset, &items, fold, seed))
        .collect::<Result<Vec<_>>>()?;
    let labels = dataset.labels().into_iter().map(|l| l.name);
    Ok(EvalReport::merge(protocol, name, labels, outcomes))
}

/// DFAM signatures matched against an equalized per-fold model.
#[derive(Debug, Clone)]
pub struct DfamPipeline {
    cfg: DfamConfig,
    builder: SignatureBuilder,
}

impl DfamPipeline {
    pub fn new(cfg: DfamConfig) -> Result<Self> {
        Ok(Self {
            builder: SignatureBuilder::from_config(&cfg)?,
            cfg,
        })
    }

    pub fn config(&self) -> &DfamConfig {
        &self.cfg
    }
}

impl Pipeline for DfamPipeline {
    type Item = WindowSignature;
    type Model = dfam::DfamModel;

    fn items(&self, recording: &Recording) -> Result<Vec<WindowSignature>> {
        self.builder.recording(recording, &self.cfg.segmentation())
    }

    fn fit(&self, training: &[(&ActivityLabel, &[WindowSignature])], seed: u64) -> Result<dfam::DfamModel> {
        let cfg = DfamConfig {
            seed,
            ..self.cfg.clone()
        };
        let per_activity = training.iter().map(|(l, s)| ((*l).clone(), s.to_vec())).collect();
        dfam::train_from_signatures(per_activity, &cfg)
    }

    fn predict(&self, model: &dfam::DfamModel, item: &WindowSignature) -> Result<String> {
        Ok(dfam::classify(item, model)?.label.name)
    }
}

/// Feature vectors fed to one of the classical classifiers.
#[derive(Debug, Clone)]
pub struct FeaturePipeline {
    extractor: FeatureExtractor,
    segmentation: SegmentationConfig,
    params: ClassifierParams,
}

impl FeaturePipeline {
    pub fn new(cfg: &DfamConfig, params: ClassifierParams) -> Result<Self> {
        cfg.validate()?;
        params.validate()?;
        Ok(Self {
            extractor: FeatureExtractor::new(cfg.streams.clone(), cfg.window_size, cfg.sampling_hz)?,
            segmentation: cfg.segmentation(),
            params,
        })
    }

    pub fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }
}

impl Pipeline for FeaturePipeline {
    type Item = Vec<f64>;
    type Model = Classifier;

    fn items(&self, recording: &Recording) -> Result<Vec<Vec<f64>>> {
        signal::segment_aligned(&recording.streams, self.extractor.streams(), &self.segmentation)?
            .iter()
            .map(|set| self.extractor.extract(set).map(|f| f.values))
            .collect()
    }

    fn fit(&self, training: &[(&ActivityLabel, &[Vec<f64>])], seed: u64) -> Result<Classifier> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (label, rows) in training {
            x.extend(rows.iter().cloned());
            y.extend(core::iter::repeat_n(label.name.as_str(), rows.len()));
        }
        let params = ClassifierParams {
            seed,
            ..self.params.clone()
        };
        Classifier::new(params)?.fit(&x, &y)
    }

    fn predict(&self, model: &Classifier, item: &Vec<f64>) -> Result<String> {
        model.predict(item).map(String::from)
    }
}

/// Per-label window counts on the test side of a set of outcomes.
pub fn test_counts(outcomes: &[FoldOutcome]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for (actual, _) in outcomes.iter().flat_map(|o| &o.predictions) {
        *counts.entry(actual.clone()).or_default() += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    use crate::activity::Placement;
    use crate::signal::{StreamKind, TimeSeries};

    #[test]
    fn even_and_uneven_folds() {
        let f = kfold_split(100, 10, 1).unwrap();
        assert!(f.iter().all(|f| f.test.len() == 10 && f.train.len() == 90));
        let f = kfold_split(103, 10, 1).unwrap();
        let sizes: Vec<usize> = f.iter().map(|f| f.test.len()).collect();
        assert_eq!(sizes, [11, 11, 11, 10, 10, 10, 10, 10, 10, 10]);
        let mut all: Vec<usize> = f.iter().flat_map(|f| f.test.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..103).collect::<Vec<_>>());
        assert_eq!(kfold_split(103, 10, 1).unwrap(), f);
        assert_ne!(kfold_split(103, 10, 2).unwrap(), f);
    }

    #[test]
    fn bad_fold_counts() {
        assert_eq!(kfold_split(5, 1, 0), Err(Error::BadFoldCount { folds: 1, items: 5 }));
        assert_eq!(kfold_split(5, 6, 0), Err(Error::BadFoldCount { folds: 6, items: 5 }));
    }

    fn rec(subject: &str, label: &str) -> Recording {
        let s = TimeSeries::from_axes(StreamKind::PHONE_ACCEL, 50.0, &[0.0; 4], &[0.0; 4], &[0.0; 4]).unwrap();
        Recording::new(subject, Placement::RR, ActivityLabel::named(label).unwrap(), vec![s]).unwrap()
    }

    #[test]
    fn loso_holds_out_each_subject_once() {
        let ds = Dataset::new(
            ["p3", "p1", "p2", "p1", "p5", "p4"]
                .iter()
                .map(|s| rec(s, "walking"))
                .collect(),
        );
        let folds = loso_split(&ds).unwrap();
        assert_eq!(folds.len(), 5);
        for f in &folds {
            let held = f.held_out.as_deref().unwrap();
            assert!(f.test.iter().all(|&i| ds.recordings[i].subject == held));
            assert!(f.train.iter().all(|&i| ds.recordings[i].subject != held));
            assert_eq!(f.train.len() + f.test.len(), ds.len());
        }
        let held: Vec<_> = folds.iter().map(|f| f.held_out.clone().unwrap()).collect();
        assert_eq!(held, ["p1", "p2", "p3", "p4", "p5"]);
        let single = Dataset::new(vec![rec("p1", "walking"), rec("p1", "sitting")]);
        assert_eq!(loso_split(&single), Err(Error::SingleSubject));
    }

    /// Each recording is one item carrying its own label.
    struct Stub {
        constant: Option<&'static str>,
    }

    impl Pipeline for Stub {
        type Item = String;
        type Model = ();

        fn items(&self, r: &Recording) -> Result<Vec<String>> {
            Ok(vec![r.label.name.clone(); 3])
        }

        fn fit(&self, training: &[(&ActivityLabel, &[String])], _: u64) -> Result<()> {
            if training.is_empty() {
                return Err(Error::EmptyModel);
            }
            Ok(())
        }

        fn predict(&self, _: &(), item: &String) -> Result<String> {
            Ok(self.constant.map_or_else(|| item.clone(), ToString::to_string))
        }
    }

    fn balanced() -> Dataset {
        let labels = ["a", "b", "c", "d"];
        Dataset::new((0..20).map(|i| rec("p1", labels[i % 4])).collect())
    }

    #[test]
    fn perfect_and_constant_stubs() {
        let ds = balanced();
        let folds = kfold_split(ds.len(), 5, 0).unwrap();
        let r = evaluate(&Stub { constant: None }, "stub", "kfold", &ds, &folds, 0).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion.trace(), r.confusion.total());
        assert_eq!(r.test_windows, 60);
        for l in ["a", "b", "c", "d"] {
            assert_eq!(r.confusion.row_total(l), 15);
        }
        let r = evaluate(&Stub { constant: Some("c") }, "stub", "kfold", &ds, &folds, 0).unwrap();
        assert!((r.accuracy - 0.25).abs() < 1e-12);
    }

    #[test]
    fn training_failure_names_the_fold() {
        let ds = balanced();
        let folds = vec![Fold {
            index: 4,
            train: vec![],
            test: vec![0],
            held_out: None,
        }];
        let err = evaluate(&Stub { constant: None }, "stub", "kfold", &ds, &folds, 0).unwrap_err();
        assert_eq!(
            err,
            Error::FoldTrainingFailure {
                fold: 4,
                source: Box::new(Error::EmptyModel)
            }
        );
    }

    #[test]
    fn confusion_grows_for_unseen_predictions() {
        let mut c = Confusion::new(["b".to_string(), "a".to_string()]);
        c.record("a", "z");
        c.record("b", "b");
        assert_eq!(c.labels, ["a", "b", "z"]);
        assert_eq!(c.counts, vec![vec![0, 0, 1], vec![0, 1, 0], vec![0, 0, 0]]);
        assert_eq!(c.accuracy(), Some(0.5));
    }

    #[test]
    fn fold_seeds_differ() {
        let seeds: BTreeSet<u64> = (0..10).map(|i| fold_seed(3, i)).collect();
        assert_eq!(seeds.len(), 10);
        assert_eq!(fold_seed(3, 2), fold_seed(3, 2));
    }
}

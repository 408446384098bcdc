//! Classical classifiers over feature vectors: Gaussian naive Bayes, CART
//! decision tree, random forest and k-nearest-neighbours.
//!
//! All of them share one contract: class labels are strings, encoded
//! internally by their sorted position, and every tie resolves to the
//! lexicographically smallest label.

mod forest;
mod knn;
mod naive_bayes;
mod tree;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use forest::RandomForest;
pub use knn::Knn;
pub use naive_bayes::GaussianNb;
pub use tree::{DecisionTree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    DecisionTree,
    RandomForest,
    Knn,
}

impl ClassifierKind {
    pub fn short_name(self) -> &'static str {
        match self {
            Self::NaiveBayes => "nb",
            Self::DecisionTree => "dt",
            Self::RandomForest => "rf",
            Self::Knn => "knn",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" | "naive_bayes" => Ok(Self::NaiveBayes),
            "dt" | "decision_tree" => Ok(Self::DecisionTree),
            "rf" | "random_forest" => Ok(Self::RandomForest),
            "knn" => Ok(Self::Knn),
            _ => Err(Error::InvalidParameter(format!("unknown classifier {s:?}"))),
        }
    }
}

/// Hyperparameters for every kind; each kind reads only its own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub kind: ClassifierKind,
    /// Neighbours for k-NN.
    pub k: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_split: usize,
    pub tree_count: usize,
    pub bootstrap: bool,
    /// Features tried per split; `None` means `floor(sqrt(d))` for forests
    /// and all features for single trees.
    pub max_features: Option<usize>,
    pub seed: u64,
    pub variance_floor: f64,
}

impl ClassifierParams {
    pub fn new(kind: ClassifierKind) -> Self {
        Self {
            kind,
            k: 1,
            max_depth: Some(12),
            min_split: 2,
            tree_count: 50,
            bootstrap: true,
            max_features: None,
            seed: 0,
            variance_floor: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.min_split < 2 {
            return bad("min_split must be at least 2");
        }
        if self.tree_count == 0 {
            return bad("tree_count must be at least 1");
        }
        if self.max_features == Some(0) {
            return bad("max_features must be at least 1");
        }
        if !(self.variance_floor.is_finite() && self.variance_floor > 0.0) {
            return bad("variance_floor must be positive");
        }
        Ok(())
    }

    fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_split: self.min_split,
            max_features: self.max_features,
        }
    }
}

/// Labels encoded as indices into the sorted class list.
#[derive(Debug, Clone)]
pub(crate) struct Encoded<'a> {
    pub x: &'a [Vec<f64>],
    pub y: Vec<usize>,
    pub classes: Vec<String>,
    pub dim: usize,
}

pub(crate) fn encode<'a, S: AsRef<str>>(x: &'a [Vec<f64>], labels: &[S]) -> Result<Encoded<'a>> {
    if x.is_empty() || x.len() != labels.len() {
        return Err(Error::DegenerateTrainingSet(format!(
            "{} samples with {} labels",
            x.len(),
            labels.len()
        )));
    }
    let dim = x[0].len();
    if dim == 0 {
        return Err(Error::DegenerateTrainingSet("zero-dimensional features".to_string()));
    }
    if let Some(row) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: row.len(),
        });
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateTrainingSet("non-finite feature value".to_string()));
    }
    let classes: Vec<String> = labels
        .iter()
        .map(|l| l.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if classes.len() < 2 {
        return Err(Error::DegenerateTrainingSet(format!(
            "need at least two classes, got {}",
            classes.len()
        )));
    }
    let y = labels
        .iter()
        .map(|l| classes.binary_search_by(|c| c.as_str().cmp(l.as_ref())).unwrap_or(0))
        .collect();
    Ok(Encoded { x, y, classes, dim })
}

/// Index of the largest count; ties go to the lowest index.
pub(crate) fn argmax_count(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Fitted {
    NaiveBayes(GaussianNb),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    Knn(Knn),
}

/// A classifier: hyperparameters plus, once fitted, its trained state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    params: ClassifierParams,
    classes: Vec<String>,
    dim: usize,
    state: Option<Fitted>,
}

impl Classifier {
    pub fn new(params: ClassifierParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            classes: Vec::new(),
            dim: 0,
            state: None,
        })
    }

    pub fn params(&self) -> &ClassifierParams {
        &self.params
    }

    pub fn kind(&self) -> ClassifierKind {
        self.params.kind
    }

    pub fn is_fitted(&self) -> bool {
        self.state.is_some()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Trains on `x` with string labels and returns the fitted classifier.
    pub fn fit<S: AsRef<str>>(&self, x: &[Vec<f64>], labels: &[S]) -> Result<Self> {
        self.params.validate()?;
        let data = encode(x, labels)?;
        let p = &self.params;
        let state = match p.kind {
            ClassifierKind::NaiveBayes => Fitted::NaiveBayes(GaussianNb::fit(&data, p.variance_floor)),
            ClassifierKind::DecisionTree => {
                Fitted::DecisionTree(DecisionTree::fit(&data, &p.tree_params(), None))
            }
            ClassifierKind::RandomForest => Fitted::RandomForest(RandomForest::fit(
                &data,
                &p.tree_params(),
                p.tree_count,
                p.bootstrap,
                p.seed,
            )),
            ClassifierKind::Knn => Fitted::Knn(Knn::fit(&data, p.k)),
        };
        Ok(Self {
            params: p.clone(),
            classes: data.classes,
            dim: data.dim,
            state: Some(state),
        })
    }

    /// Predicted class index into [`Classifier::classes`].
    pub fn predict_index(&self, x: &[f64]) -> Result<usize> {
        let state = self.state.as_ref().ok_or(Error::NotFitted)?;
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(match state {
            Fitted::NaiveBayes(m) => m.predict(x),
            Fitted::DecisionTree(m) => m.predict(x),
            Fitted::RandomForest(m) => m.predict(x),
            Fitted::Knn(m) => m.predict(x),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        let i = self.predict_index(x)?;
        Ok(&self.classes[i])
    }

    /// Normalised class posteriors (naive Bayes only).
    pub fn posteriors(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.state {
            None => Err(Error::NotFitted),
            Some(Fitted::NaiveBayes(m)) => {
                if x.len() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: x.len(),
                    });
                }
                Ok(m.posteriors(x))
            }
            Some(_) => Err(Error::InvalidParameter(format!(
                "{} does not produce posteriors",
                self.params.kind
            ))),
        }
    }
}

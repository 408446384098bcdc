use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{argmax_count, Encoded};

/// k-nearest-neighbours under Euclidean distance on min-max scaled features.
/// The scaling is fitted on the training set; constant features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    k: usize,
    classes: usize,
    offset: Vec<f64>,
    scale: Vec<f64>,
    points: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl Knn {
    pub(crate) fn fit(data: &Encoded<'_>, k: usize) -> Self {
        let d = data.dim;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for row in data.x {
            for j in 0..d {
                lo[j] = lo[j].min(row[j]);
                hi[j] = hi[j].max(row[j]);
            }
        }
        let scale: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| if h > l { 1.0 / (h - l) } else { 0.0 })
            .collect();
        let mut model = Self {
            k,
            classes: data.classes.len(),
            offset: lo,
            scale,
            points: Vec::new(),
            labels: data.y.clone(),
        };
        model.points = data.x.iter().map(|r| model.scaled(r)).collect();
        model
    }

    fn scaled(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(v, (o, s))| (v - o) * s)
            .collect()
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let q = self.scaled(x);
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; self.classes];
        for &(_, i) in dist.iter().take(self.k) {
            votes[self.labels[i]] += 1;
        }
        argmax_count(&votes)
    }
}

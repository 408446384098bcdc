use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use super::{argmax_count, Encoded};
use crate::math;

/// Bagged CART trees with per-split feature subsampling and majority vote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    classes: usize,
}

impl RandomForest {
    pub(crate) fn fit(
        data: &Encoded<'_>,
        params: &TreeParams,
        tree_count: usize,
        bootstrap: bool,
        seed: u64,
    ) -> Self {
        let default_features = (math::floor(math::sqrt(data.dim as f64)) as usize).max(1);
        let params = TreeParams {
            max_features: Some(params.max_features.unwrap_or(default_features)),
            ..*params
        };
        let n = data.y.len();
        let trees = (0..tree_count)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let sample: Vec<usize> = if bootstrap {
                    let mut s: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                    s.sort_unstable();
                    s
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_on(data, &params, Some(&mut rng), sample)
            })
            .collect();
        Self {
            trees,
            classes: data.classes.len(),
        }
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.classes];
        for tree in &self.trees {
            votes[tree.predict(x)] += 1;
        }
        argmax_count(&votes)
    }
}

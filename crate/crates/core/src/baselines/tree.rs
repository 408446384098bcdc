use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{argmax_count, Encoded};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_split: usize,
    /// Features examined per split; `None` or `>= d` means all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf { class: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// CART classification tree on Gini impurity. Samples with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n) * (c as f64 / n)).sum::<f64>()
}

struct Best {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct Grower<'a, 'r> {
    data: &'a Encoded<'a>,
    params: &'a TreeParams,
    rng: Option<&'r mut dyn RngCore>,
    nodes: Vec<Node>,
}

impl Grower<'_, '_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.data.dim;
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < d => {
                let mut picked = index::sample(rng, d, m).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<Best> {
        let classes = self.data.classes.len();
        let n = idx.len();
        let mut total = vec![0usize; classes];
        for &i in idx {
            total[self.data.y[i]] += 1;
        }
        let mut best: Option<Best> = None;
        let mut order = idx.to_vec();
        for f in self.candidate_features() {
            let x = self.data.x;
            order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            let mut left = vec![0usize; classes];
            for pos in 0..n - 1 {
                left[self.data.y[order[pos]]] += 1;
                let lo = x[order[pos]][f];
                let hi = x[order[pos + 1]][f];
                if lo == hi {
                    continue;
                }
                let nl = pos + 1;
                let nr = n - nl;
                let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                let impurity = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(Best {
                        feature: f,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let classes = self.data.classes.len();
        let mut counts = vec![0usize; classes];
        for &i in &idx {
            counts[self.data.y[i]] += 1;
        }
        let majority = argmax_count(&counts);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { class: majority });
        if pure || depth_capped || idx.len() < self.params.min_split {
            return slot;
        }
        // a zero-gain split is still taken so that consistent data can always be fitted exactly
        let Some(best) = self.best_split(&idx) else {
            return slot;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.data.x[i][best.feature] <= best.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        slot
    }
}

impl DecisionTree {
    pub(crate) fn fit(data: &Encoded<'_>, params: &TreeParams, rng: Option<&mut dyn RngCore>) -> Self {
        Self::fit_on(data, params, rng, (0..data.y.len()).collect())
    }

    pub(crate) fn fit_on(
        data: &Encoded<'_>,
        params: &TreeParams,
        rng: Option<&mut dyn RngCore>,
        sample: Vec<usize>,
    ) -> Self {
        let mut grower = Grower {
            data,
            params,
            rng,
            nodes: Vec::new(),
        };
        grower.grow(sample, 0);
        Self {
            nodes: grower.nodes,
        }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn split_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn root_threshold(&self) -> Option<f64> {
        match self.nodes.first() {
            Some(Node::Split { threshold, .. }) => Some(*threshold),
            _ => None,
        }
    }
}

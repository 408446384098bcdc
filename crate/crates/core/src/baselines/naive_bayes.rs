use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Encoded;
use crate::math;

/// Gaussian naive Bayes with empirical class priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    log_priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub(crate) fn fit(data: &Encoded<'_>, variance_floor: f64) -> Self {
        let c = data.classes.len();
        let d = data.dim;
        let mut counts = vec![0usize; c];
        let mut sums = vec![vec![0.0; d]; c];
        for (row, &y) in data.x.iter().zip(&data.y) {
            counts[y] += 1;
            for (s, v) in sums[y].iter_mut().zip(row) {
                *s += v;
            }
        }
        let means: Vec<Vec<f64>> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &n)| s.iter().map(|v| v / n as f64).collect())
            .collect();
        let mut variances = vec![vec![0.0; d]; c];
        for (row, &y) in data.x.iter().zip(&data.y) {
            for j in 0..d {
                let dv = row[j] - means[y][j];
                variances[y][j] += dv * dv;
            }
        }
        for (vars, &n) in variances.iter_mut().zip(&counts) {
            for v in vars.iter_mut() {
                *v = (*v / n as f64).max(variance_floor);
            }
        }
        let total = data.y.len() as f64;
        Self {
            log_priors: counts.iter().map(|&n| math::ln(n as f64 / total)).collect(),
            means,
            variances,
        }
    }

    /// Unnormalised log posterior per class.
    pub fn log_scores(&self, x: &[f64]) -> Vec<f64> {
        self.log_priors
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(lp, (mu, var))| {
                lp + x
                    .iter()
                    .zip(mu.iter().zip(var))
                    .map(|(v, (m, s2))| -0.5 * (math::ln(2.0 * PI * s2) + (v - m) * (v - m) / s2))
                    .sum::<f64>()
            })
            .collect()
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let scores = self.log_scores(x);
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        best
    }

    /// Posteriors normalised with log-sum-exp.
    pub fn posteriors(&self, x: &[f64]) -> Vec<f64> {
        let scores = self.log_scores(x);
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = scores.iter().map(|s| math::exp(s - top)).collect();
        let z: f64 = exp.iter().sum();
        exp.into_iter().map(|e| e / z).collect()
    }
}

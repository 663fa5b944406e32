use serde::{Deserialize, Serialize};

use super::ModelError;

/// Empirical CDF of training-set win probabilities, mapping a probability
/// to a percentile score in `[0, 100]`.
///
/// Each distinct training value sits at its midpoint rank
/// `(first + last) / 2 + 0.5` out of `n`; values in between are linearly
/// interpolated. Probabilities below the smallest training value score 0,
/// above the largest score 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileTransform {
    sorted: Vec<f64>,
}

impl PercentileTransform {
    pub fn fit(train_probs: &[f64]) -> Result<Self, ModelError> {
        if train_probs.is_empty() {
            return Err(ModelError::EmptyInput("percentile transform"));
        }
        if train_probs.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::NonFinite("percentile transform"));
        }
        let mut sorted = train_probs.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(PercentileTransform { sorted })
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Midpoint-rank fraction of the training value `v` (which must occur).
    fn mid_fraction(&self, v: f64) -> f64 {
        let first = self.sorted.partition_point(|&x| x < v);
        let last = self.sorted.partition_point(|&x| x <= v) - 1;
        ((first + last) as f64 / 2.0 + 0.5) / self.sorted.len() as f64
    }

    pub fn pscore(&self, prob: f64) -> f64 {
        let lo = self.sorted[0];
        let hi = self.sorted[self.sorted.len() - 1];
        if prob < lo {
            return 0.0;
        }
        if prob > hi {
            return 100.0;
        }
        let above = self.sorted.partition_point(|&x| x <= prob);
        let left = self.sorted[above - 1];
        if left == prob || above == self.sorted.len() {
            return 100.0 * self.mid_fraction(left);
        }
        let right = self.sorted[above];
        let (fl, fr) = (self.mid_fraction(left), self.mid_fraction(right));
        100.0 * (fl + (fr - fl) * (prob - left) / (right - left))
    }
}

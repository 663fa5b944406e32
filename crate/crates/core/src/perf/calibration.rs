use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub mean_predicted: f64,
    pub observed_rate: f64,
}

/// Equal-width reliability bins over `[0, 1]`; `p = 1` falls in the last bin.
pub fn reliability_bins(probs: &[f64], labels: &[bool], n_bins: usize) -> Result<Vec<ReliabilityBin>, ModelError> {
    if probs.is_empty() {
        return Err(ModelError::EmptyInput("calibration"));
    }
    if probs.len() != labels.len() {
        return Err(ModelError::LabelCount { rows: probs.len(), labels: labels.len() });
    }
    if n_bins == 0 {
        return Err(ModelError::EmptyInput("calibration bins"));
    }
    let mut sums = vec![(0usize, 0.0f64, 0.0f64); n_bins];
    for (&p, &y) in probs.iter().zip(labels) {
        if !(0.0..=1.0).contains(&p) {
            return Err(ModelError::NonFinite("calibration probability outside [0, 1]"));
        }
        let k = ((p * n_bins as f64) as usize).min(n_bins - 1);
        sums[k].0 += 1;
        sums[k].1 += p;
        sums[k].2 += f64::from(u8::from(y));
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(k, (count, p, y))| {
            let c = count.max(1) as f64;
            ReliabilityBin {
                lower: k as f64 / n_bins as f64,
                upper: (k + 1) as f64 / n_bins as f64,
                count,
                mean_predicted: p / c,
                observed_rate: y / c,
            }
        })
        .collect())
}

/// Bin-weighted mean absolute gap between predicted and observed win rate.
pub fn expected_calibration_error(probs: &[f64], labels: &[bool], n_bins: usize) -> Result<f64, ModelError> {
    let n = probs.len() as f64;
    Ok(reliability_bins(probs, labels, n_bins)?
        .iter()
        .map(|b| b.count as f64 / n * (b.mean_predicted - b.observed_rate).abs())
        .sum())
}

/// Share of correct calls at threshold 0.5; an exact 0.5 earns half credit.
pub fn accuracy(probs: &[f64], labels: &[bool]) -> f64 {
    if probs.is_empty() {
        return 0.0;
    }
    let credit: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            if p == 0.5 {
                0.5
            } else if (p > 0.5) == y {
                1.0
            } else {
                0.0
            }
        })
        .sum();
    credit / probs.len() as f64
}

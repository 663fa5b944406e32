use serde::{Deserialize, Serialize};

use super::ModelError;

/// Per-feature z-scoring fitted on training rows. Zero-variance columns are
/// dropped and listed in `dropped`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub feature_names: Vec<String>,
    /// Indices (into the full row) of the columns kept.
    pub retained: Vec<usize>,
    pub means: Vec<f64>,
    /// Population standard deviations, all strictly positive.
    pub stds: Vec<f64>,
    pub dropped: Vec<String>,
}

impl Standardizer {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R], feature_names: &[&str]) -> Result<Self, ModelError> {
        if rows.len() < 2 {
            return Err(ModelError::TooFewRows { got: rows.len(), min: 2 });
        }
        let d = feature_names.len();
        for r in rows {
            check_width(r.as_ref(), d)?;
        }
        let n = rows.len() as f64;
        let mut out = Standardizer {
            feature_names: feature_names.iter().map(|s| s.to_string()).collect(),
            retained: Vec::new(),
            means: Vec::new(),
            stds: Vec::new(),
            dropped: Vec::new(),
        };
        for j in 0..d {
            let mean = rows.iter().map(|r| r.as_ref()[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r.as_ref()[j] - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std.is_finite() && std > 1e-12 * (1.0 + mean.abs()) {
                out.retained.push(j);
                out.means.push(mean);
                out.stds.push(std);
            } else {
                log::debug!("dropping zero-variance feature `{}`", feature_names[j]);
                out.dropped.push(feature_names[j].to_string());
            }
        }
        Ok(out)
    }

    /// Standardized values of the retained columns.
    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        self.retained
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&j, (m, s))| (row[j] - m) / s)
            .collect()
    }

    pub fn n_inputs(&self) -> usize {
        self.feature_names.len()
    }

    pub fn retained_names(&self) -> impl Iterator<Item = &str> {
        self.retained.iter().map(|&j| self.feature_names[j].as_str())
    }
}

pub(crate) fn check_width(row: &[f64], expected: usize) -> Result<(), ModelError> {
    if row.len() != expected {
        return Err(ModelError::RowWidth { expected, got: row.len() });
    }
    Ok(())
}

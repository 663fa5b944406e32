//! Sign-constrained logistic regression fitted by projected gradient descent.

use serde::{Deserialize, Serialize};

use super::standardize::{check_width, Standardizer};
use super::ModelError;
use crate::ingest::Role;

/// Direction in which a feature may move the predicted probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn project(self, w: f64) -> f64 {
        match self {
            Sign::Positive => w.max(0.0),
            Sign::Negative => w.min(0.0),
        }
    }

    pub fn admits(self, w: f64) -> bool {
        match self {
            Sign::Positive => w >= 0.0,
            Sign::Negative => w <= 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// L2 penalty on the weights (not the bias).
    pub l2: f64,
    pub max_iterations: usize,
    /// Stop once one step lowers the loss by less than this.
    pub tolerance: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { l2: 1e-4, max_iterations: 10_000, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
    pub loss: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    n: usize,
    d: usize,
    l2: f64,
}

impl Problem<'_> {
    fn margins(&self, w: &[f64], b: f64, out: &mut [f64]) {
        for (i, z) in out.iter_mut().enumerate() {
            let row = &self.x[i * self.d..(i + 1) * self.d];
            *z = b + row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
        }
    }

    fn loss(&self, w: &[f64], b: f64, z: &mut [f64]) -> f64 {
        self.margins(w, b, z);
        let data: f64 = z.iter().zip(self.y).map(|(&z, &y)| softplus(z) - y * z).sum();
        data / self.n as f64 + 0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>()
    }

    /// Gradient at the margins currently stored in `z`.
    fn gradient(&self, w: &[f64], z: &[f64], gw: &mut [f64]) -> f64 {
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for i in 0..self.n {
            let r = sigmoid(z[i]) - self.y[i];
            gb += r;
            let row = &self.x[i * self.d..(i + 1) * self.d];
            for (g, a) in gw.iter_mut().zip(row) {
                *g += r * a;
            }
        }
        let n = self.n as f64;
        for (g, wj) in gw.iter_mut().zip(w) {
            *g = *g / n + self.l2 * wj;
        }
        gb / n
    }
}

/// Fits `P(y = 1 | x) = sigmoid(w . x + b)` with every `w_j` projected onto
/// its allowed half-line after each step. Step sizes come from backtracking
/// on the projected-gradient sufficient-decrease condition.
pub fn fit_logistic<R: AsRef<[f64]>>(x: &[R], y: &[bool], signs: &[Sign], config: &FitConfig) -> LogisticFit {
    let n = x.len();
    let d = signs.len();
    let flat: Vec<f64> = x.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(u8::from(v))).collect();
    let problem = Problem { x: &flat, y: &yf, n, d, l2: config.l2 };

    let mut w = vec![0.0; d];
    let prior = yf.iter().sum::<f64>() / n.max(1) as f64;
    let mut b = if prior > 0.0 && prior < 1.0 { (prior / (1.0 - prior)).ln() } else { 0.0 };

    let mut z = vec![0.0; n];
    let mut z_new = vec![0.0; n];
    let mut gw = vec![0.0; d];
    let mut w_new = vec![0.0; d];
    let mut f = problem.loss(&w, b, &mut z);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        let gb = problem.gradient(&w, &z, &mut gw);
        let (f_new, b_new) = loop {
            for j in 0..d {
                w_new[j] = signs[j].project(w[j] - step * gw[j]);
            }
            let b_try = b - step * gb;
            let f_try = problem.loss(&w_new, b_try, &mut z_new);
            let mut lin = (b_try - b) * gb;
            let mut quad = (b_try - b).powi(2);
            for j in 0..d {
                let dj = w_new[j] - w[j];
                lin += dj * gw[j];
                quad += dj * dj;
            }
            if f_try <= f + lin + quad / (2.0 * step) + 1e-15 || step < 1e-12 {
                break (f_try, b_try);
            }
            step *= 0.5;
        };
        iterations += 1;
        let decrease = f - f_new;
        if decrease >= 0.0 {
            std::mem::swap(&mut w, &mut w_new);
            std::mem::swap(&mut z, &mut z_new);
            b = b_new;
            f = f_new;
        }
        if decrease < config.tolerance {
            converged = true;
            break;
        }
        step *= 2.0;
    }

    LogisticFit { weights: w, bias: b, converged, iterations, loss: f }
}

/// Contribution of one feature to a prediction, on the logit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub feature: String,
    pub value: f64,
    pub contribution: f64,
}

/// Per-role win-probability model over standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinModel {
    pub role: Role,
    /// One constraint per input feature (retained or not).
    pub signs: Vec<Sign>,
    pub standardizer: Standardizer,
    /// One weight per retained feature.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Training mean of each standardized retained feature.
    pub train_means: Vec<f64>,
}

pub const MIN_TRAIN_ROWS: usize = 50;

/// Fits one role's model: standardize, then constrained logistic regression.
pub fn fit_win_model<R: AsRef<[f64]>>(
    role: Role,
    rows: &[R],
    labels: &[bool],
    feature_names: &[&str],
    signs: &[Sign],
    config: &FitConfig,
) -> Result<WinModel, ModelError> {
    if rows.len() != labels.len() {
        return Err(ModelError::LabelCount { rows: rows.len(), labels: labels.len() });
    }
    if signs.len() != feature_names.len() {
        return Err(ModelError::RowWidth { expected: feature_names.len(), got: signs.len() });
    }
    if rows.len() < MIN_TRAIN_ROWS {
        return Err(ModelError::TooFewRows { got: rows.len(), min: MIN_TRAIN_ROWS });
    }
    let wins = labels.iter().filter(|l| **l).count();
    if wins == 0 || wins == labels.len() {
        return Err(ModelError::SingleClass { role });
    }
    let standardizer = Standardizer::fit(rows, feature_names)?;
    let x: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply(r.as_ref())).collect();
    let retained_signs: Vec<Sign> = standardizer.retained.iter().map(|&j| signs[j]).collect();
    let fit = fit_logistic(&x, labels, &retained_signs, config);
    if !fit.converged {
        log::warn!("{role} model hit {} iterations without converging", fit.iterations);
    }
    let n = x.len() as f64;
    let train_means = (0..retained_signs.len())
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    Ok(WinModel {
        role,
        signs: signs.to_vec(),
        standardizer,
        weights: fit.weights,
        bias: fit.bias,
        converged: fit.converged,
        iterations: fit.iterations,
        train_means,
    })
}

const PROB_FLOOR: f64 = 1e-15;

impl WinModel {
    pub fn logit(&self, row: &[f64]) -> Result<f64, ModelError> {
        check_width(row, self.standardizer.n_inputs())?;
        let x = self.standardizer.apply(row);
        Ok(self.bias + x.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>())
    }

    /// Win probability, kept strictly inside (0, 1).
    pub fn predict(&self, row: &[f64]) -> Result<f64, ModelError> {
        Ok(sigmoid(self.logit(row)?).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
    }

    /// Prediction from named values; every input feature must be present.
    pub fn predict_named(&self, values: &[(&str, f64)]) -> Result<f64, ModelError> {
        let row = self
            .standardizer
            .feature_names
            .iter()
            .map(|name| {
                values
                    .iter()
                    .find(|(k, _)| k == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| ModelError::MissingFeature(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.predict(&row)
    }

    /// Mean training logit, the baseline of [`WinModel::attribute`].
    pub fn mean_logit(&self) -> f64 {
        self.bias + self.train_means.iter().zip(&self.weights).map(|(m, w)| m * w).sum::<f64>()
    }

    /// Exact additive attribution `w_j * (x_j - mean_j)` on the logit scale,
    /// sorted by magnitude. Dropped features contribute 0. The contributions
    /// sum to `logit(row) - mean_logit()`.
    pub fn attribute(&self, row: &[f64]) -> Result<Vec<Contribution>, ModelError> {
        check_width(row, self.standardizer.n_inputs())?;
        let x = self.standardizer.apply(row);
        let mut out: Vec<Contribution> = self
            .standardizer
            .feature_names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let contribution = match self.standardizer.retained.iter().position(|&r| r == j) {
                    Some(k) => self.weights[k] * (x[k] - self.train_means[k]),
                    None => 0.0,
                };
                Contribution { feature: name.clone(), value: row[j], contribution }
            })
            .collect();
        out.sort_by(|a, b| b.contribution.abs().total_cmp(&a.contribution.abs()));
        Ok(out)
    }

    /// Weight of a feature in standardized units, 0 when it was dropped.
    pub fn weight(&self, feature: &str) -> Option<f64> {
        let j = self.standardizer.feature_names.iter().position(|n| n == feature)?;
        Some(match self.standardizer.retained.iter().position(|&r| r == j) {
            Some(k) => self.weights[k],
            None => 0.0,
        })
    }

    /// Coefficients on the original feature scale and the matching intercept.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let s = &self.standardizer;
        let mut coefs = vec![0.0; s.n_inputs()];
        let mut intercept = self.bias;
        for (k, &j) in s.retained.iter().enumerate() {
            coefs[j] = self.weights[k] / s.stds[k];
            intercept -= self.weights[k] * s.means[k] / s.stds[k];
        }
        (coefs, intercept)
    }

    /// True when every weight respects its sign constraint.
    pub fn respects_signs(&self) -> bool {
        self.standardizer
            .retained
            .iter()
            .zip(&self.weights)
            .all(|(&j, &w)| self.signs[j].admits(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn separable() -> (Vec<[f64; 1]>, Vec<bool>) {
        let x: Vec<[f64; 1]> = (0..100).map(|i| [i as f64]).collect();
        let y = (0..100).map(|i| i >= 50).collect();
        (x, y)
    }

    #[test]
    fn separable_data_positive_weight() {
        let (x, y) = separable();
        let m = fit_win_model(Role::Mid, &x, &y, &["x"], &[Sign::Positive], &FitConfig::default()).unwrap();
        assert!(m.weights[0] > 0.0);
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(r, &l)| (m.predict(&r[..]).unwrap() > 0.5) == l)
            .count();
        assert_eq!(correct, 100);
    }

    #[test]
    fn flipped_labels_clamp_weight() {
        let (x, y) = separable();
        let flipped: Vec<bool> = y.iter().map(|v| !v).collect();
        let m = fit_win_model(Role::Mid, &x, &flipped, &["x"], &[Sign::Positive], &FitConfig::default()).unwrap();
        assert_eq!(m.weights[0], 0.0);
        assert!((m.predict(&[10.0]).unwrap() - 0.5).abs() < 1e-6);
        assert!(m.respects_signs());
    }

    #[test]
    fn rejects_one_class_and_small_samples() {
        let x: Vec<[f64; 1]> = (0..60).map(|i| [i as f64]).collect();
        let y = vec![true; 60];
        assert!(matches!(
            fit_win_model(Role::Top, &x, &y, &["x"], &[Sign::Positive], &FitConfig::default()),
            Err(ModelError::SingleClass { .. })
        ));
        let (x, y) = separable();
        assert!(matches!(
            fit_win_model(Role::Top, &x[..10], &y[..10], &["x"], &[Sign::Positive], &FitConfig::default()),
            Err(ModelError::TooFewRows { .. })
        ));
    }

    #[test]
    fn recovers_generating_weights() {
        let truth = [1.0, -0.5, 0.8];
        let bias = 0.3;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..10_000 {
            let row: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let z = bias + row.iter().zip(truth).map(|(a, w)| a * w).sum::<f64>();
            y.push(rng.random::<f64>() < sigmoid(z));
            x.push(row);
        }
        let signs = [Sign::Positive, Sign::Negative, Sign::Positive];
        let m = fit_win_model(Role::Bot, &x, &y, &["a", "b", "c"], &signs, &FitConfig::default()).unwrap();
        assert!(m.converged);
        let (coefs, intercept) = m.raw_coefficients();
        for (c, t) in coefs.iter().zip(truth) {
            assert!((c - t).abs() < 0.1, "{coefs:?}");
        }
        assert!((intercept - bias).abs() < 0.1);
    }

    #[test]
    fn zero_model_predicts_half() {
        let x: Vec<[f64; 1]> = (0..60).map(|i| [i as f64]).collect();
        let y: Vec<bool> = (0..60).map(|i| i % 2 == 0).collect();
        let mut m = fit_win_model(Role::Top, &x, &y, &["x"], &[Sign::Positive], &FitConfig::default()).unwrap();
        m.weights = vec![0.0];
        m.bias = 0.0;
        assert_eq!(m.predict(&[3.0]).unwrap(), 0.5);
        m.weights = vec![1.0];
        assert_eq!(m.predict(&[m.standardizer.means[0]]).unwrap(), 0.5);
    }

    #[test]
    fn named_prediction_reports_missing_feature() {
        let (x, y) = separable();
        let m = fit_win_model(Role::Mid, &x, &y, &["kla"], &[Sign::Positive], &FitConfig::default()).unwrap();
        assert!(m.predict_named(&[("kla", 3.0)]).is_ok());
        match m.predict_named(&[("gold", 3.0)]) {
            Err(ModelError::MissingFeature(name)) => assert_eq!(name, "kla"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn attribution_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<[f64; 3]> = (0..500)
            .map(|_| std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let y: Vec<bool> = x.iter().map(|r| r[0] - r[2] + 0.5 * r[1] > 0.0).collect();
        let signs = [Sign::Positive, Sign::Positive, Sign::Negative];
        let m = fit_win_model(Role::Jungle, &x, &y, &["a", "b", "c"], &signs, &FitConfig::default()).unwrap();
        for row in x.iter().take(20) {
            let c = m.attribute(row).unwrap();
            let total: f64 = c.iter().map(|c| c.contribution).sum();
            assert!((total - (m.logit(row).unwrap() - m.mean_logit())).abs() < 1e-9);
            assert!(c.windows(2).all(|w| w[0].contribution.abs() >= w[1].contribution.abs()));
        }
        let at_mean = m.standardizer.means.clone();
        assert!(m.attribute(&at_mean).unwrap().iter().all(|c| c.contribution.abs() < 1e-12));

        let mut one = at_mean.clone();
        one[1] += 2.0;
        let nonzero = m.attribute(&one).unwrap().iter().filter(|c| c.contribution.abs() > 1e-12).count();
        assert_eq!(nonzero, 1);
    }
}

//! Out-of-fold PScores: k-fold cross-validation per role.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::logistic::{fit_win_model, FitConfig, Sign, WinModel};
use super::percentile::PercentileTransform;
use super::ModelError;
use crate::features::{FeatureRow, FEATURE_NAMES, N_FEATURES, OBJECTIVE_CONTEST_LOSERATE, WORTHLESS_DEATH_RATIO};
use crate::ingest::Role;

/// Monotonicity constraints for the fifteen features: everything helps
/// except worthless deaths and lost objective contests.
pub fn default_signs() -> [Sign; N_FEATURES] {
    let mut signs = [Sign::Positive; N_FEATURES];
    signs[WORTHLESS_DEATH_RATIO] = Sign::Negative;
    signs[OBJECTIVE_CONTEST_LOSERATE] = Sign::Negative;
    signs
}

/// Anything that can be fitted on one role's rows and return probabilities.
pub trait ProbabilityModel: Send + Sync {
    fn predict_proba(&self, row: &[f64]) -> Result<f64, ModelError>;
}

pub trait WinModelTrainer: Sync {
    type Model: ProbabilityModel;
    fn fit(&self, role: Role, rows: &[&[f64]], labels: &[bool]) -> Result<Self::Model, ModelError>;
}

impl ProbabilityModel for WinModel {
    fn predict_proba(&self, row: &[f64]) -> Result<f64, ModelError> {
        self.predict(row)
    }
}

/// The reference backend: sign-constrained logistic regression.
#[derive(Debug, Clone)]
pub struct LogisticTrainer {
    pub signs: Vec<Sign>,
    pub config: FitConfig,
}

impl Default for LogisticTrainer {
    fn default() -> Self {
        LogisticTrainer { signs: default_signs().to_vec(), config: FitConfig::default() }
    }
}

impl WinModelTrainer for LogisticTrainer {
    type Model = WinModel;

    fn fit(&self, role: Role, rows: &[&[f64]], labels: &[bool]) -> Result<WinModel, ModelError> {
        fit_win_model(role, rows, labels, &FEATURE_NAMES, &self.signs, &self.config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    /// Fit one transform per role on all folds' training predictions
    /// instead of one per (role, fold).
    pub pooled_transform: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 5, seed: 0, pooled_transform: false }
    }
}

/// Fold of a game: seeded SHA-256 of the game id, so every row of one game
/// lands in the same fold.
pub fn fold_of(game_id: &str, seed: u64, folds: usize) -> usize {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(game_id.as_bytes());
    let digest = h.finalize();
    let v = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    (v % folds as u64) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PScoreRecord {
    pub game_id: String,
    pub player_id: String,
    pub role: Role,
    pub win_prob: f64,
    pub pscore: f64,
    pub fold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldModel<M> {
    pub role: Role,
    pub fold: usize,
    pub model: M,
    pub transform: PercentileTransform,
}

/// All fitted (role, fold) models plus the fold assignment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet<M> {
    pub config: CvConfig,
    /// Indexed by `role.index() * folds + fold`.
    pub models: Vec<FoldModel<M>>,
}

impl<M: ProbabilityModel> ModelSet<M> {
    pub fn get(&self, role: Role, fold: usize) -> Option<&FoldModel<M>> {
        self.models.get(role.index() * self.config.folds + fold)
    }

    /// Scores rows with the model of the fold each row's game belongs to.
    pub fn score(&self, rows: &[FeatureRow]) -> Result<Vec<PScoreRecord>, ModelError> {
        rows.par_iter()
            .map(|r| {
                let fold = fold_of(&r.game_id, self.config.seed, self.config.folds);
                let fm = self.get(r.role, fold).ok_or(ModelError::MissingModel { role: r.role, fold })?;
                let win_prob = fm.model.predict_proba(&r.values)?;
                Ok(PScoreRecord {
                    game_id: r.game_id.clone(),
                    player_id: r.player_id.clone(),
                    role: r.role,
                    win_prob,
                    pscore: fm.transform.pscore(win_prob),
                    fold,
                })
            })
            .collect()
    }
}

pub struct CrossValidation<M> {
    pub records: Vec<PScoreRecord>,
    pub models: ModelSet<M>,
}

/// Fits `folds` models per role and gives every row its out-of-fold PScore.
/// Records come back in input order; the result depends only on the rows
/// and the seed.
pub fn cross_val_pscores<T: WinModelTrainer>(
    rows: &[FeatureRow],
    config: &CvConfig,
    trainer: &T,
) -> Result<CrossValidation<T::Model>, ModelError> {
    if config.folds < 2 {
        return Err(ModelError::Folds(config.folds));
    }
    let k = config.folds;
    let folds: Vec<usize> = rows.iter().map(|r| fold_of(&r.game_id, config.seed, k)).collect();

    let jobs: Vec<(Role, usize)> = Role::ALL.iter().flat_map(|&r| (0..k).map(move |f| (r, f))).collect();
    let fitted: Vec<(T::Model, Vec<f64>)> = jobs
        .par_iter()
        .map(|&(role, fold)| {
            let (x, y): (Vec<&[f64]>, Vec<bool>) = rows
                .iter()
                .zip(&folds)
                .filter(|(r, &f)| r.role == role && f != fold)
                .map(|(r, _)| (&r.values[..], r.win))
                .unzip();
            let wrap = |e| ModelError::Fold { role, fold, source: Box::new(e) };
            let model = trainer.fit(role, &x, &y).map_err(wrap)?;
            let train_probs = x.iter().map(|r| model.predict_proba(r)).collect::<Result<Vec<_>, _>>().map_err(wrap)?;
            Ok((model, train_probs))
        })
        .collect::<Result<_, ModelError>>()?;

    let mut pooled: Vec<Option<PercentileTransform>> = vec![None; Role::ALL.len()];
    if config.pooled_transform {
        for role in Role::ALL {
            let all: Vec<f64> = fitted[role.index() * k..(role.index() + 1) * k]
                .iter()
                .flat_map(|(_, p)| p.iter().copied())
                .collect();
            pooled[role.index()] = Some(PercentileTransform::fit(&all)?);
        }
    }

    let models = jobs
        .into_iter()
        .zip(fitted)
        .map(|((role, fold), (model, train_probs))| {
            let transform = match &pooled[role.index()] {
                Some(t) => t.clone(),
                None => PercentileTransform::fit(&train_probs)?,
            };
            Ok(FoldModel { role, fold, model, transform })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let models = ModelSet { config: *config, models };
    let records = models.score(rows)?;
    Ok(CrossValidation { records, models })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_assignment_is_stable_and_in_range() {
        for i in 0..200 {
            let id = format!("game-{i}");
            let f = fold_of(&id, 3, 5);
            assert!(f < 5);
            assert_eq!(f, fold_of(&id, 3, 5));
        }
        let spread: std::collections::HashSet<usize> = (0..200).map(|i| fold_of(&format!("g{i}"), 0, 5)).collect();
        assert_eq!(spread.len(), 5);
    }

    #[test]
    fn signs_match_feature_semantics() {
        let s = default_signs();
        assert_eq!(s.iter().filter(|s| **s == Sign::Negative).count(), 2);
        assert_eq!(FEATURE_NAMES[WORTHLESS_DEATH_RATIO], "worthless_death_ratio");
        assert_eq!(FEATURE_NAMES[OBJECTIVE_CONTEST_LOSERATE], "objective_contest_loserate");
    }

    #[test]
    fn rejects_single_fold() {
        let err = cross_val_pscores(&[], &CvConfig { folds: 1, ..Default::default() }, &LogisticTrainer::default());
        assert!(matches!(err, Err(ModelError::Folds(1))));
    }
}

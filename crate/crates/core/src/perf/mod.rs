//! Performance scores: per-role win-probability models, calibration, and
//! the percentile transform that turns probabilities into PScores.

mod calibration;
mod cv;
pub mod io;
mod logistic;
mod percentile;
mod standardize;

use thiserror::Error;

use crate::ingest::Role;

pub use calibration::{accuracy, expected_calibration_error, reliability_bins, ReliabilityBin};
pub use cv::{
    cross_val_pscores, default_signs, fold_of, CrossValidation, CvConfig, FoldModel, LogisticTrainer, ModelSet,
    PScoreRecord, ProbabilityModel, WinModelTrainer,
};
pub use logistic::{fit_logistic, fit_win_model, sigmoid, Contribution, FitConfig, LogisticFit, Sign, WinModel, MIN_TRAIN_ROWS};
pub use percentile::PercentileTransform;
pub use standardize::Standardizer;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("need at least {min} rows, got {got}")]
    TooFewRows { got: usize, min: usize },
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("row has {got} values, model expects {expected}")]
    RowWidth { expected: usize, got: usize },
    #[error("all labels of the {role} training set belong to one class")]
    SingleClass { role: Role },
    #[error("missing feature `{0}`")]
    MissingFeature(String),
    #[error("empty input to {0}")]
    EmptyInput(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("cross-validation needs at least 2 folds, got {0}")]
    Folds(usize),
    #[error("fold {fold} of {role}: {source}")]
    Fold { role: Role, fold: usize, source: Box<ModelError> },
    #[error("no model for {role} fold {fold}")]
    MissingModel { role: Role, fold: usize },
    #[error("model format: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

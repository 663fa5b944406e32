//! Evaluation: rolling outcome forecasts, cross-role fairness, rank
//! statistics against latent skill, model ablations, and the synthetic
//! corpus generator that provides the latent skills.

mod ablation;
mod fairness;
mod forecast;
mod stats;
mod synthetic;

use thiserror::Error;

use crate::rating::RatingError;

pub use ablation::{ablation_report, default_models, render_table, AblationConfig, RatingModel, VariantReport};
pub use fairness::{role_fairness, wasserstein_1d, FairnessReport, RolePairDistance};
pub use forecast::{
    ewma_pre_game, leakage_sentinel, pre_game_ratings, rolling_forecast_eval, ForecastConfig, ForecastFeatures,
    ForecastReport, ForecastWindowResult, PreGameRatings, RatingValue, ScopeMetrics, ScopedMetrics, Snapshot,
};
pub use stats::{average_ranks, cross_group_concordance, ks_uniform, pearson, spearman};
pub use synthetic::{
    context_name, generate_synthetic, logistic_dataset, read_latent, write_latent, LatentPlayer, SyntheticConfig,
    SyntheticCorpus, SyntheticError, LATENT_HEADER,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty sample")]
    EmptySample,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("role fairness needs at least 2 roles with 2 players, got {0}")]
    TooFewRoles(usize),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Rating(#[from] RatingError),
    #[error(transparent)]
    Synthetic(#[from] SyntheticError),
}

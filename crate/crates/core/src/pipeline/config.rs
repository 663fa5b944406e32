use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::eval::{ForecastConfig, RatingValue};
use crate::features::FeatureConfig;
use crate::perf::FitConfig;
use crate::rating::{RatingConfig, UpdateMode, Variant};

/// Everything a pipeline run depends on. Loaded from TOML; every section
/// and key is optional except `input.games`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    pub input: InputConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub rating: RatingSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Line-delimited JSON games.
    pub games: PathBuf,
    /// Optional latent skill table, enabling skill-recovery metrics.
    #[serde(default)]
    pub latent: Option<PathBuf>,
    /// Directory receiving every artifact and the manifest.
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub strict: bool,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("pskill-out")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub folds: usize,
    pub pooled_transform: bool,
    pub l2: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        ModelConfig { folds: 5, pooled_transform: false, l2: fit.l2, max_iterations: fit.max_iterations, tolerance: fit.tolerance }
    }
}

impl ModelConfig {
    pub fn fit(&self) -> FitConfig {
        FitConfig { l2: self.l2, max_iterations: self.max_iterations, tolerance: self.tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RatingSection {
    #[serde(flatten)]
    pub params: RatingConfig,
    pub mode: UpdateMode,
    pub variant: Variant,
}

impl Default for RatingSection {
    fn default() -> Self {
        RatingSection { params: RatingConfig::default(), mode: UpdateMode::Ffa, variant: Variant::Meta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSection {
    #[serde(flatten)]
    pub forecast: ForecastConfig,
    pub value: RatingValue,
    /// Also run every rating variant side by side.
    pub ablation: bool,
    pub ewma_alpha: f64,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            forecast: ForecastConfig::default(),
            value: RatingValue::Theta,
            ablation: true,
            ewma_alpha: crate::rating::EWMA_ALPHA,
        }
    }
}

impl PipelineConfig {
    pub fn new(games: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            seed: 0,
            input: InputConfig { games: games.into(), latent: None, out_dir: out_dir.into(), strict: false },
            features: FeatureConfig::default(),
            model: ModelConfig::default(),
            rating: RatingSection::default(),
            eval: EvalSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::config(m.to_string()));
        let mut paths = vec![&self.input.games, &self.input.out_dir];
        paths.extend(self.input.latent.as_ref());
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                if paths[i] == paths[j] {
                    return bad("input paths and out_dir must be distinct");
                }
            }
        }
        let f = &self.features;
        if !(f.worthless_death_window > 0.0 && f.multi_kill_window > 0.0) {
            return bad("feature windows must be positive");
        }
        let m = &self.model;
        if m.folds < 2 {
            return bad("model.folds must be at least 2");
        }
        if !(m.l2 >= 0.0 && m.tolerance > 0.0 && m.max_iterations > 0) {
            return bad("model.l2 must be >= 0, tolerance > 0 and max_iterations > 0");
        }
        let r = &self.rating.params;
        if ![r.mu0, r.sigma0, r.beta, r.kappa, r.tie_epsilon].iter().all(|v| v.is_finite() && *v > 0.0) {
            return bad("rating parameters must be positive");
        }
        let e = &self.eval;
        if e.forecast.train_days <= 0 || e.forecast.test_days <= 0 || e.forecast.bins == 0 {
            return bad("eval spans and bins must be positive");
        }
        if !(e.ewma_alpha > 0.0 && e.ewma_alpha <= 1.0) {
            return bad("eval.ewma_alpha must be in (0, 1]");
        }
        Ok(())
    }
}

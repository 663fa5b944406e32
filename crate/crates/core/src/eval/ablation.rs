//! Side-by-side comparison of rating variants on one corpus.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fairness::{role_fairness, FairnessReport};
use super::forecast::{ewma_pre_game, pre_game_ratings, rolling_forecast_eval, ForecastConfig, RatingValue, ScopedMetrics};
use super::stats::{cross_group_concordance, spearman};
use super::synthetic::LatentPlayer;
use super::EvalError;
use crate::ingest::{GameRecord, Role};
use crate::rating::{replay, EwmaTracker, PScoreTable, RatingConfig, UpdateMode, Variant, EWMA_ALPHA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RatingModel {
    Bayesian { mode: UpdateMode, variant: Variant },
    Ewma,
}

impl RatingModel {
    pub fn name(self) -> &'static str {
        match self {
            RatingModel::Bayesian { mode: UpdateMode::TeamOutcome, variant: Variant::Plain } => "OpenSkill",
            RatingModel::Bayesian { mode: UpdateMode::Ffa, variant: Variant::Plain } => "FFA_OpenSkill",
            RatingModel::Bayesian { mode: UpdateMode::TeamOutcome, variant: Variant::Meta } => "Meta_OpenSkill",
            RatingModel::Bayesian { mode: UpdateMode::Ffa, variant: Variant::Meta } => "Meta_FFA_OpenSkill",
            RatingModel::Ewma => "EWMA",
        }
    }

    pub fn is_bayesian(self) -> bool {
        matches!(self, RatingModel::Bayesian { .. })
    }
}

pub fn default_models() -> Vec<RatingModel> {
    let mut out = Vec::new();
    for variant in [Variant::Plain, Variant::Meta] {
        for mode in [UpdateMode::TeamOutcome, UpdateMode::Ffa] {
            out.push(RatingModel::Bayesian { mode, variant });
        }
    }
    out.push(RatingModel::Ewma);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationConfig {
    pub rating: RatingConfig,
    pub forecast: ForecastConfig,
    pub value: RatingValue,
    pub ewma_alpha: f64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            rating: RatingConfig::default(),
            forecast: ForecastConfig::default(),
            value: RatingValue::Theta,
            ewma_alpha: EWMA_ALPHA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub name: String,
    pub model: RatingModel,
    pub forecast: ScopedMetrics,
    pub windows: usize,
    pub fairness: Option<FairnessReport>,
    /// Against latent skill, when known.
    pub spearman: Option<f64>,
    pub cross_context_concordance: Option<f64>,
}

struct Profile {
    context_id: String,
    role_counts: [u32; 5],
}

fn profiles(games: &[GameRecord]) -> BTreeMap<String, Profile> {
    let mut out: BTreeMap<String, Profile> = BTreeMap::new();
    for g in games {
        for l in &g.lines {
            let p = out
                .entry(l.player_id.clone())
                .or_insert_with(|| Profile { context_id: l.context_id.clone(), role_counts: [0; 5] });
            p.context_id = l.context_id.clone();
            p.role_counts[l.role.index()] += 1;
        }
    }
    out
}

fn main_role(counts: &[u32; 5]) -> Role {
    let best = *counts.iter().max().expect("five roles");
    Role::ALL[counts.iter().position(|&c| c == best).expect("max exists")]
}

/// Runs every model over the same chronological corpus. `pscores` is needed
/// by FFA and EWMA models; `latent` enables the skill-recovery columns.
pub fn ablation_report(
    games: &[GameRecord],
    pscores: &PScoreTable,
    latent: Option<&[LatentPlayer]>,
    models: &[RatingModel],
    cfg: &AblationConfig,
) -> Result<Vec<VariantReport>, EvalError> {
    let profiles = profiles(games);
    let latent: Option<HashMap<&str, f64>> = latent.map(|l| l.iter().map(|p| (p.player_id.as_str(), p.skill)).collect());

    models
        .par_iter()
        .map(|&model| {
            let (log, finals): (_, BTreeMap<String, f64>) = match model {
                RatingModel::Bayesian { mode, variant } => {
                    let (state, updates) = replay(games, Some(pscores), cfg.rating, mode, variant)?;
                    let finals = state
                        .players
                        .keys()
                        .map(|id| Ok((id.clone(), cfg.value.of(&state.combined(id)?))))
                        .collect::<Result<_, EvalError>>()?;
                    (pre_game_ratings(games, &updates, cfg.value)?, finals)
                }
                RatingModel::Ewma => {
                    let log = ewma_pre_game(games, pscores, cfg.ewma_alpha)?;
                    let mut tracker = EwmaTracker::new(cfg.ewma_alpha);
                    for g in games {
                        for (l, s) in g.lines.iter().zip(pscores.for_game(g).map_err(|e| EvalError::Mismatch(e.to_string()))?) {
                            tracker.observe(&l.player_id, s);
                        }
                    }
                    (log, tracker.iter().map(|(k, v)| (k.to_string(), v)).collect())
                }
            };
            let forecast = rolling_forecast_eval(&log, &cfg.forecast)?;

            let mut by_role: BTreeMap<Role, Vec<f64>> = BTreeMap::new();
            for (id, v) in &finals {
                by_role.entry(main_role(&profiles[id].role_counts)).or_default().push(*v);
            }
            let fairness = role_fairness(&by_role).ok();

            let (spearman_v, concordance) = match &latent {
                Some(skills) => {
                    let known: Vec<(&String, f64, f64)> =
                        finals.iter().filter_map(|(id, v)| skills.get(id.as_str()).map(|s| (id, *v, *s))).collect();
                    let est: Vec<f64> = known.iter().map(|k| k.1).collect();
                    let truth: Vec<f64> = known.iter().map(|k| k.2).collect();
                    let groups: Vec<&str> = known.iter().map(|k| profiles[k.0].context_id.as_str()).collect();
                    (spearman(&est, &truth), cross_group_concordance(&est, &truth, &groups))
                }
                None => (None, None),
            };

            Ok(VariantReport {
                name: model.name().to_string(),
                model,
                forecast: forecast.pooled,
                windows: forecast.windows.len(),
                fairness,
                spearman: spearman_v,
                cross_context_concordance: concordance,
            })
        })
        .collect()
}

fn cell(v: Option<f64>, scale: f64) -> String {
    v.map(|x| format!("{:.2}", x * scale)).unwrap_or_else(|| "-".into())
}

/// Fixed-width summary, accuracies and ECE in percent.
pub fn render_table(reports: &[VariantReport]) -> String {
    let mut out = format!(
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
        "model", "acc", "acc_in", "acc_x", "ece", "w1", "rho", "x_pairs"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            r.name,
            cell(r.forecast.all.accuracy, 100.0),
            cell(r.forecast.intra.accuracy, 100.0),
            cell(r.forecast.inter.accuracy, 100.0),
            cell(r.forecast.all.ece, 100.0),
            cell(r.fairness.as_ref().map(|f| f.mean_distance), 1.0),
            cell(r.spearman, 1.0),
            cell(r.cross_context_concordance, 100.0),
        ));
    }
    out
}

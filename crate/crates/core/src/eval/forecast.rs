//! Rolling-window outcome forecasts from pre-game ratings.

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::ingest::{GameRecord, Role, Side};
use crate::perf::{accuracy, expected_calibration_error, fit_logistic, sigmoid, FitConfig, Sign, Standardizer};
use crate::rating::{CombinedRating, EwmaTracker, GameUpdate, PScoreTable};

/// Single value read off a combined rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatingValue {
    #[default]
    Theta,
    Mu,
}

impl RatingValue {
    pub fn of(self, r: &CombinedRating) -> f64 {
        match self {
            RatingValue::Theta => r.theta,
            RatingValue::Mu => r.mu,
        }
    }
}

/// Ratings of both line-ups just before and just after one game, in
/// `Role::ALL` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreGameRatings {
    pub game_id: String,
    pub timestamp: DateTime<Utc>,
    pub intra: bool,
    pub blue_won: bool,
    pub blue: [f64; 5],
    pub red: [f64; 5],
    pub blue_after: [f64; 5],
    pub red_after: [f64; 5],
}

fn line_up(game: &GameRecord) -> Result<[[usize; 5]; 2], EvalError> {
    let mut out = [[0; 5]; 2];
    for (s, side) in Side::BOTH.into_iter().enumerate() {
        for role in Role::ALL {
            out[s][role.index()] = game
                .lines
                .iter()
                .position(|l| l.side == side && l.role == role)
                .ok_or_else(|| EvalError::Mismatch(format!("game {} lacks {side} {role}", game.game_id)))?;
        }
    }
    Ok(out)
}

/// Pairs a rating replay with its games. `updates[i]` must belong to `games[i]`.
pub fn pre_game_ratings(games: &[GameRecord], updates: &[GameUpdate], value: RatingValue) -> Result<Vec<PreGameRatings>, EvalError> {
    if games.len() != updates.len() {
        return Err(EvalError::Mismatch(format!("{} games but {} rating updates", games.len(), updates.len())));
    }
    games
        .iter()
        .zip(updates)
        .map(|(g, u)| {
            if g.game_id != u.game_id {
                return Err(EvalError::Mismatch(format!("game {} paired with update {}", g.game_id, u.game_id)));
            }
            let idx = line_up(g)?;
            let find = |i: usize| {
                u.delta(&g.lines[i].player_id)
                    .ok_or_else(|| EvalError::Mismatch(format!("game {}: no delta for {}", g.game_id, g.lines[i].player_id)))
            };
            let mut r = PreGameRatings {
                game_id: g.game_id.clone(),
                timestamp: g.timestamp,
                intra: g.is_intra_context(),
                blue_won: g.winner == Side::Blue,
                blue: [0.0; 5],
                red: [0.0; 5],
                blue_after: [0.0; 5],
                red_after: [0.0; 5],
            };
            for k in 0..5 {
                let b = find(idx[0][k])?;
                let red = find(idx[1][k])?;
                r.blue[k] = value.of(&b.combined_before);
                r.red[k] = value.of(&red.combined_before);
                r.blue_after[k] = value.of(&b.combined_after);
                r.red_after[k] = value.of(&red.combined_after);
            }
            Ok(r)
        })
        .collect()
}

/// Smoothed PScore of each player before and after every game.
pub fn ewma_pre_game(games: &[GameRecord], pscores: &PScoreTable, alpha: f64) -> Result<Vec<PreGameRatings>, EvalError> {
    let mut tracker = EwmaTracker::new(alpha);
    games
        .iter()
        .map(|g| {
            let idx = line_up(g)?;
            let scores = pscores.for_game(g).map_err(|e| EvalError::Mismatch(e.to_string()))?;
            let before: Vec<f64> = g.lines.iter().map(|l| tracker.value(&l.player_id)).collect();
            let after: Vec<f64> = g.lines.iter().zip(&scores).map(|(l, &s)| tracker.observe(&l.player_id, s)).collect();
            let pick = |v: &[f64], side: usize| -> [f64; 5] { std::array::from_fn(|k| v[idx[side][k]]) };
            Ok(PreGameRatings {
                game_id: g.game_id.clone(),
                timestamp: g.timestamp,
                intra: g.is_intra_context(),
                blue_won: g.winner == Side::Blue,
                blue: pick(&before, 0),
                red: pick(&before, 1),
                blue_after: pick(&after, 0),
                red_after: pick(&after, 1),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastFeatures {
    /// Five BLUE-minus-RED differences, one per role.
    #[default]
    PerRoleDiff,
    /// One feature: difference of team mean ratings.
    MeanDiff,
}

/// Which side of the game the ratings are read from. Only `Before` is a
/// forecast; `After` exists to demonstrate what leakage looks like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Snapshot {
    #[default]
    Before,
    After,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForecastConfig {
    pub train_days: i64,
    pub test_days: i64,
    pub min_train_games: usize,
    pub bins: usize,
    pub features: ForecastFeatures,
    #[serde(skip)]
    pub snapshot: Snapshot,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            train_days: 365,
            test_days: 30,
            min_train_games: 100,
            bins: 10,
            features: ForecastFeatures::PerRoleDiff,
            snapshot: Snapshot::Before,
        }
    }
}

fn features(r: &PreGameRatings, cfg: &ForecastConfig) -> Vec<f64> {
    let (b, red) = match cfg.snapshot {
        Snapshot::Before => (&r.blue, &r.red),
        Snapshot::After => (&r.blue_after, &r.red_after),
    };
    match cfg.features {
        ForecastFeatures::PerRoleDiff => (0..5).map(|k| b[k] - red[k]).collect(),
        ForecastFeatures::MeanDiff => vec![(b.iter().sum::<f64>() - red.iter().sum::<f64>()) / 5.0],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeMetrics {
    pub n: usize,
    pub accuracy: Option<f64>,
    pub ece: Option<f64>,
}

impl ScopeMetrics {
    fn from(probs: &[f64], labels: &[bool], bins: usize) -> Self {
        if probs.is_empty() {
            return ScopeMetrics { n: 0, accuracy: None, ece: None };
        }
        ScopeMetrics {
            n: probs.len(),
            accuracy: Some(accuracy(probs, labels)),
            ece: expected_calibration_error(probs, labels, bins).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopedMetrics {
    pub all: ScopeMetrics,
    pub intra: ScopeMetrics,
    pub inter: ScopeMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastWindowResult {
    pub train_start: DateTime<Utc>,
    pub train_end: DateTime<Utc>,
    pub test_start: DateTime<Utc>,
    pub test_end: DateTime<Utc>,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: ScopedMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub windows: Vec<ForecastWindowResult>,
    /// Metrics over the test games of all windows together.
    pub pooled: ScopedMetrics,
}

/// Test-game predictions of one window, with the scope flag and label.
type Scored = Vec<(f64, bool, bool)>;

fn scoped(scored: &Scored, bins: usize) -> ScopedMetrics {
    let pick = |keep: &dyn Fn(bool) -> bool| -> (Vec<f64>, Vec<bool>) {
        scored.iter().filter(|(_, intra, _)| keep(*intra)).map(|(p, _, y)| (*p, *y)).unzip()
    };
    let (pa, ya) = pick(&|_| true);
    let (pi, yi) = pick(&|intra| intra);
    let (pe, ye) = pick(&|intra| !intra);
    ScopedMetrics {
        all: ScopeMetrics::from(&pa, &ya, bins),
        intra: ScopeMetrics::from(&pi, &yi, bins),
        inter: ScopeMetrics::from(&pe, &ye, bins),
    }
}

fn window_predictions(train: &[&PreGameRatings], test: &[&PreGameRatings], cfg: &ForecastConfig) -> Result<Scored, EvalError> {
    let x: Vec<Vec<f64>> = train.iter().map(|r| features(r, cfg)).collect();
    let y: Vec<bool> = train.iter().map(|r| r.blue_won).collect();
    let names: Vec<String> = (0..x[0].len()).map(|k| format!("x{k}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let predict: Box<dyn Fn(&[f64]) -> f64 + Sync> = match Standardizer::fit(&x, &name_refs) {
        Ok(st) if !st.retained.is_empty() => {
            let z: Vec<Vec<f64>> = x.iter().map(|r| st.apply(r)).collect();
            let fit = fit_logistic(&z, &y, &vec![Sign::Positive; st.retained.len()], &FitConfig::default());
            Box::new(move |row: &[f64]| {
                let zr = st.apply(row);
                sigmoid(fit.bias + zr.iter().zip(&fit.weights).map(|(a, w)| a * w).sum::<f64>())
            })
        }
        // Constant features carry no signal: predict the base rate.
        _ => {
            let rate = y.iter().filter(|v| **v).count() as f64 / y.len() as f64;
            Box::new(move |_: &[f64]| rate)
        }
    };
    Ok(test.iter().map(|r| (predict(&features(r, cfg)), r.intra, r.blue_won)).collect())
}

/// Trains on `train_days` of games, tests on the next `test_days`, then
/// slides forward by `test_days`. `log` must be chronological.
pub fn rolling_forecast_eval(log: &[PreGameRatings], cfg: &ForecastConfig) -> Result<ForecastReport, EvalError> {
    if cfg.train_days <= 0 || cfg.test_days <= 0 {
        return Err(EvalError::Config("forecast spans must be positive".into()));
    }
    let (Some(first), Some(last)) = (log.first(), log.last()) else {
        return Ok(ForecastReport { windows: Vec::new(), pooled: scoped(&Vec::new(), cfg.bins) });
    };
    let mut bounds = Vec::new();
    let mut train_start = first.timestamp;
    loop {
        let train_end = train_start + Duration::days(cfg.train_days);
        if train_end > last.timestamp {
            break;
        }
        bounds.push((train_start, train_end, train_end + Duration::days(cfg.test_days)));
        train_start += Duration::days(cfg.test_days);
    }

    let jobs: Vec<Option<(ForecastWindowResult, Scored)>> = bounds
        .par_iter()
        .map(|&(ts, te, xe)| {
            let train: Vec<&PreGameRatings> = log.iter().filter(|r| r.timestamp >= ts && r.timestamp < te).collect();
            let test: Vec<&PreGameRatings> = log.iter().filter(|r| r.timestamp >= te && r.timestamp < xe).collect();
            if train.len() < cfg.min_train_games {
                log::warn!("forecast window starting {ts}: {} train games, skipped", train.len());
                return Ok(None);
            }
            if test.is_empty() {
                return Ok(None);
            }
            let scored = window_predictions(&train, &test, cfg)?;
            let result = ForecastWindowResult {
                train_start: ts,
                train_end: te,
                test_start: te,
                test_end: xe,
                n_train: train.len(),
                n_test: test.len(),
                metrics: scoped(&scored, cfg.bins),
            };
            Ok(Some((result, scored)))
        })
        .collect::<Result<_, EvalError>>()?;

    let mut windows = Vec::new();
    let mut pooled = Vec::new();
    for (w, s) in jobs.into_iter().flatten() {
        windows.push(w);
        pooled.extend(s);
    }
    Ok(ForecastReport { windows, pooled: scoped(&pooled, cfg.bins) })
}

/// Pooled accuracy with ratings read before and after each game. A harness
/// without leakage shows `before < after` on informative data.
pub fn leakage_sentinel(log: &[PreGameRatings], cfg: &ForecastConfig) -> Result<(f64, f64), EvalError> {
    let acc = |snapshot| -> Result<f64, EvalError> {
        let c = ForecastConfig { snapshot, ..cfg.clone() };
        rolling_forecast_eval(log, &c)?.pooled.all.accuracy.ok_or(EvalError::EmptySample)
    };
    Ok((acc(Snapshot::Before)?, acc(Snapshot::After)?))
}

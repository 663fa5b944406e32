//! Per-player feature vectors computed from one game.
//!
//! Every feature is a function of the player's own stat line, the event
//! stream, the game duration and the game's total kills. Team aggregates are
//! never used.

pub mod events;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{GameRecord, Role, Side};

pub use events::{
    contest_tally, contest_winner, death_is_worthless, free_kill_ratio, largest_killing_spree,
    largest_multi_kill, objective_contest_rates, worthless_death_flags, ContestTally,
};
pub use table::{read_feature_rows, write_feature_rows, FeatureRow, TableError, FEATURES_HEADER};

pub const N_FEATURES: usize = 15;

/// Column order of every feature matrix and feature file.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "kla",
    "gold_per_min",
    "xp_per_min",
    "cs_per_min",
    "wards_per_min",
    "dmg_dealt_tk_ratio",
    "dmg_dealt_per_gold_tk_ratio",
    "dmg_taken_tk_ratio",
    "dmg_taken_per_gold_tk_ratio",
    "largest_multi_kill",
    "largest_killing_spree_tk_ratio",
    "worthless_death_ratio",
    "free_kill_ratio",
    "objective_contest_winrate",
    "objective_contest_loserate",
];

pub const WORTHLESS_DEATH_RATIO: usize = 11;
pub const OBJECTIVE_CONTEST_LOSERATE: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("duration must be > 0, got {0}")]
    NonPositiveDuration(f64),
    #[error("player `{0}` is not in the game")]
    UnknownPlayer(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Half-width in seconds of the window around a death.
    pub worthless_death_window: f64,
    pub multi_kill_window: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { worthless_death_window: 60.0, multi_kill_window: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub kla: f64,
    pub gold_per_min: f64,
    pub xp_per_min: f64,
    pub cs_per_min: f64,
    pub wards_per_min: f64,
    pub dmg_dealt_tk_ratio: f64,
    pub dmg_dealt_per_gold_tk_ratio: f64,
    pub dmg_taken_tk_ratio: f64,
    pub dmg_taken_per_gold_tk_ratio: f64,
    pub largest_multi_kill: f64,
    pub largest_killing_spree_tk_ratio: f64,
    pub worthless_death_ratio: f64,
    pub free_kill_ratio: f64,
    pub objective_contest_winrate: f64,
    pub objective_contest_loserate: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.kla,
            self.gold_per_min,
            self.xp_per_min,
            self.cs_per_min,
            self.wards_per_min,
            self.dmg_dealt_tk_ratio,
            self.dmg_dealt_per_gold_tk_ratio,
            self.dmg_taken_tk_ratio,
            self.dmg_taken_per_gold_tk_ratio,
            self.largest_multi_kill,
            self.largest_killing_spree_tk_ratio,
            self.worthless_death_ratio,
            self.free_kill_ratio,
            self.objective_contest_winrate,
            self.objective_contest_loserate,
        ]
    }

    pub fn from_array(v: [f64; N_FEATURES]) -> Self {
        FeatureVector {
            kla: v[0],
            gold_per_min: v[1],
            xp_per_min: v[2],
            cs_per_min: v[3],
            wards_per_min: v[4],
            dmg_dealt_tk_ratio: v[5],
            dmg_dealt_per_gold_tk_ratio: v[6],
            dmg_taken_tk_ratio: v[7],
            dmg_taken_per_gold_tk_ratio: v[8],
            largest_multi_kill: v[9],
            largest_killing_spree_tk_ratio: v[10],
            worthless_death_ratio: v[11],
            free_kill_ratio: v[12],
            objective_contest_winrate: v[13],
            objective_contest_loserate: v[14],
        }
    }
}

/// `(kills + assists) / (deaths + 1)`.
pub fn compute_kla(kills: u32, deaths: u32, assists: u32) -> f64 {
    (kills as f64 + assists as f64) / (deaths as f64 + 1.0)
}

pub fn per_minute(value: f64, duration_secs: f64) -> Result<f64, FeatureError> {
    if !(duration_secs > 0.0) {
        return Err(FeatureError::NonPositiveDuration(duration_secs));
    }
    Ok(value / (duration_secs / 60.0))
}

/// `value / total_kills`, or 0 in a game without kills.
pub fn total_kills_ratio(value: f64, total_game_kills: u32) -> f64 {
    if total_game_kills == 0 {
        0.0
    } else {
        value / total_game_kills as f64
    }
}

fn guarded_div(num: f64, den: f64, guarded: &mut bool) -> f64 {
    if den == 0.0 {
        *guarded = true;
        0.0
    } else {
        num / den
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerFeatures {
    pub player_id: String,
    pub side: Side,
    pub role: Role,
    pub context_id: String,
    pub won: bool,
    pub features: FeatureVector,
}

/// Feature vector of one player.
pub fn player_features(game: &GameRecord, player_id: &str, config: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    player_features_inner(game, player_id, config, &mut false)
}

fn player_features_inner(
    game: &GameRecord,
    player_id: &str,
    config: &FeatureConfig,
    guarded: &mut bool,
) -> Result<FeatureVector, FeatureError> {
    let line = game
        .line(player_id)
        .ok_or_else(|| FeatureError::UnknownPlayer(player_id.to_string()))?;
    let d = game.duration;
    let total_kills = game.total_kills();
    if total_kills == 0 {
        *guarded = true;
    }

    let dealt = total_kills_ratio(line.damage_dealt_to_players, total_kills);
    let taken = total_kills_ratio(line.damage_taken_from_players, total_kills);
    let flags = worthless_death_flags(game, player_id, config.worthless_death_window);
    let worthless = flags.iter().filter(|f| **f).count() as f64;
    let (winrate, loserate) = objective_contest_rates(game, player_id);

    Ok(FeatureVector {
        kla: compute_kla(line.kills, line.deaths, line.assists),
        gold_per_min: per_minute(line.gold, d)?,
        xp_per_min: per_minute(line.experience, d)?,
        cs_per_min: per_minute(line.creep_score, d)?,
        wards_per_min: per_minute(line.wards_placed, d)?,
        dmg_dealt_tk_ratio: dealt,
        dmg_dealt_per_gold_tk_ratio: guarded_div(dealt, line.gold, guarded),
        dmg_taken_tk_ratio: taken,
        dmg_taken_per_gold_tk_ratio: guarded_div(taken, line.gold, guarded),
        largest_multi_kill: largest_multi_kill(game, player_id, config.multi_kill_window) as f64,
        largest_killing_spree_tk_ratio: total_kills_ratio(largest_killing_spree(game, player_id) as f64, total_kills),
        worthless_death_ratio: if flags.is_empty() { 0.0 } else { worthless / flags.len() as f64 },
        free_kill_ratio: free_kill_ratio(game, player_id, config.worthless_death_window),
        objective_contest_winrate: winrate,
        objective_contest_loserate: loserate,
    })
}

/// Feature vectors for all ten players, in stat-line order.
pub fn extract_features(game: &GameRecord, config: &FeatureConfig) -> Result<Vec<PlayerFeatures>, FeatureError> {
    let mut guarded = false;
    let out = game
        .lines
        .iter()
        .map(|line| {
            Ok(PlayerFeatures {
                player_id: line.player_id.clone(),
                side: line.side,
                role: line.role,
                context_id: line.context_id.clone(),
                won: line.side == game.winner,
                features: player_features_inner(game, &line.player_id, config, &mut guarded)?,
            })
        })
        .collect::<Result<Vec<_>, FeatureError>>()?;
    if guarded {
        log::debug!("game {}: zero denominator in a ratio feature, set to 0", game.game_id);
    }
    Ok(out)
}

/// Feature rows for a whole corpus, in game order.
pub fn extract_corpus(games: &[GameRecord], config: &FeatureConfig) -> Result<Vec<FeatureRow>, FeatureError> {
    use rayon::prelude::*;
    let per_game: Vec<Vec<FeatureRow>> = games
        .par_iter()
        .map(|g| {
            Ok(extract_features(g, config)?
                .into_iter()
                .map(|p| FeatureRow::from_player(&g.game_id, p))
                .collect())
        })
        .collect::<Result<_, FeatureError>>()?;
    Ok(per_game.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::fixtures::game;
    use crate::ingest::{EventKind, GameEvent, ObjectiveTag};

    #[test]
    fn kla_values() {
        assert_eq!(compute_kla(5, 1, 3), 4.0);
        assert_eq!(compute_kla(2, 0, 0), 2.0);
        assert_eq!(compute_kla(0, 7, 0), 0.0);
    }

    #[test]
    fn per_minute_values() {
        assert_eq!(per_minute(600.0, 600.0).unwrap(), 60.0);
        assert_eq!(per_minute(0.0, 1234.0).unwrap(), 0.0);
        assert_eq!(per_minute(17.5, 60.0).unwrap(), 17.5);
        assert!(per_minute(1.0, 0.0).is_err());
        assert!(per_minute(1.0, -5.0).is_err());
    }

    #[test]
    fn total_kills_ratio_values() {
        assert_eq!(total_kills_ratio(3000.0, 30), 100.0);
        assert_eq!(total_kills_ratio(42.0, 0), 0.0);
        assert_eq!(total_kills_ratio(0.0, 30), 0.0);
    }

    #[test]
    fn all_zero_game_gives_zero_vectors() {
        let mut g = game("g", "2024-01-01T00:00:00Z", "KR");
        for l in &mut g.lines {
            l.gold = 0.0;
            l.experience = 0.0;
            l.creep_score = 0.0;
            l.wards_placed = 0.0;
            l.damage_dealt_to_players = 0.0;
            l.damage_taken_from_players = 0.0;
        }
        for p in extract_features(&g, &FeatureConfig::default()).unwrap() {
            assert_eq!(p.features, FeatureVector::default());
        }
    }

    /// Three events walked through by hand.
    ///
    /// Duration 1200 s (20 min), total kills 2.
    /// t=100  b2 kills r2, b1 assists
    /// t=130  b1 takes a DRAKE with r1 present -> contested, BLUE wins
    /// t=700  r2 kills b2
    #[test]
    fn hand_built_three_event_game() {
        let mut g = game("g", "2024-01-01T00:00:00Z", "KR");
        g.duration = 1200.0;
        g.events = vec![
            GameEvent::champion_kill(100.0, "b2", "r2", &["b1"]),
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Drake, 130.0, "b1", &["r1"]),
            GameEvent::champion_kill(700.0, "r2", "b2", &[]),
        ];
        let set = |g: &mut GameRecord, id: &str, k, d, a, gold| {
            let l = g.lines.iter_mut().find(|l| l.player_id == id).unwrap();
            l.kills = k;
            l.deaths = d;
            l.assists = a;
            l.gold = gold;
        };
        set(&mut g, "b2", 1, 1, 0, 8000.0);
        set(&mut g, "b1", 0, 0, 1, 6000.0);
        set(&mut g, "r2", 1, 1, 0, 9000.0);
        let rows = extract_features(&g, &FeatureConfig::default()).unwrap();
        let get = |id: &str| rows.iter().find(|p| p.player_id == id).unwrap().features;

        let b2 = get("b2");
        assert_eq!(b2.kla, 0.5);
        assert_eq!(b2.gold_per_min, 400.0);
        assert_eq!(b2.xp_per_min, 600.0);
        assert_eq!(b2.cs_per_min, 10.0);
        assert_eq!(b2.wards_per_min, 0.5);
        assert_eq!(b2.dmg_dealt_tk_ratio, 7500.0);
        assert_eq!(b2.dmg_dealt_per_gold_tk_ratio, 7500.0 / 8000.0);
        assert_eq!(b2.dmg_taken_tk_ratio, 7500.0);
        assert_eq!(b2.largest_multi_kill, 1.0);
        assert_eq!(b2.largest_killing_spree_tk_ratio, 0.5);
        // b2 dies at 700 alone: worthless.
        assert_eq!(b2.worthless_death_ratio, 1.0);
        // r2's death at 100: red lost the drake at 130 and r2 scored nothing.
        assert_eq!(b2.free_kill_ratio, 1.0);
        assert_eq!((b2.objective_contest_winrate, b2.objective_contest_loserate), (0.0, 0.0));

        let b1 = get("b1");
        assert_eq!(b1.kla, 1.0);
        assert_eq!((b1.objective_contest_winrate, b1.objective_contest_loserate), (1.0, 0.0));
        assert_eq!(b1.worthless_death_ratio, 0.0);

        let r1 = get("r1");
        assert_eq!((r1.objective_contest_winrate, r1.objective_contest_loserate), (0.0, 1.0));

        let r2 = get("r2");
        assert_eq!(r2.kla, 0.5);
        // r2's death at 100: no red kill or objective within [40, 160].
        assert_eq!(r2.worthless_death_ratio, 1.0);
        // b2's death at 700 is worthless, so r2's kill is free.
        assert_eq!(r2.free_kill_ratio, 1.0);
        assert_eq!(r2.largest_killing_spree_tk_ratio, 0.5);
    }
}

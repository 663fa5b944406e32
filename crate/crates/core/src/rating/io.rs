//! Rating delta logs and state snapshots.
//!
//! The delta log is tab-separated, one row per player per game:
//!
//! ```text
//! #pskill-deltas v1
//! game_id player_id context_id side role target ctx_mu_before ctx_sigma_before ctx_mu_after ctx_sigma_after mu_before sigma_before mu_after sigma_after context_reset
//! ```
//!
//! `ctx_*` columns are the contextual rating, the unprefixed ones the
//! combined rating. `target` names the rating the game changed.
//!
//! A snapshot is a header line followed by one JSON object per line: the
//! settings first, then every player in id order, then every context.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    CombinedRating, ContextRegistry, GameUpdate, PlayerDelta, PlayerRatingState, Rating, RatingConfig, RatingState,
    RatingTarget, UpdateMode, Variant,
};

pub const DELTAS_HEADER: &str = "#pskill-deltas v1";
pub const SNAPSHOT_HEADER: &str = "#pskill-ratings v1";
const DELTA_COLUMNS: [&str; 15] = [
    "game_id",
    "player_id",
    "context_id",
    "side",
    "role",
    "target",
    "ctx_mu_before",
    "ctx_sigma_before",
    "ctx_mu_after",
    "ctx_sigma_after",
    "mu_before",
    "sigma_before",
    "mu_after",
    "sigma_after",
    "context_reset",
];

#[derive(Debug, Error)]
pub enum RatingIoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing or unsupported header, expected `{0}`")]
    Header(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn combined(mu: f64, sigma: f64) -> CombinedRating {
    CombinedRating { mu, sigma, theta: mu - 3.0 * sigma }
}

pub fn write_deltas<W: Write>(mut out: W, updates: &[GameUpdate]) -> std::io::Result<()> {
    writeln!(out, "{DELTAS_HEADER}")?;
    writeln!(out, "{}", DELTA_COLUMNS.join("\t"))?;
    for u in updates {
        for d in &u.deltas {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                u.game_id,
                d.player_id,
                d.context_id,
                d.side,
                d.role,
                u.target.as_str(),
                d.contextual_before.mu,
                d.contextual_before.sigma,
                d.contextual_after.mu,
                d.contextual_after.sigma,
                d.combined_before.mu,
                d.combined_before.sigma,
                d.combined_after.mu,
                d.combined_after.sigma,
                u8::from(d.context_reset),
            )?;
        }
    }
    out.flush()
}

/// Reads a delta log back into per-game updates. Meta entries are not part
/// of the log, so `GameUpdate::meta` comes back empty.
pub fn read_deltas<R: BufRead>(input: R) -> Result<Vec<GameUpdate>, RatingIoError> {
    let mut lines = input.lines();
    if lines.next().transpose()?.as_deref().map(str::trim_end) != Some(DELTAS_HEADER) {
        return Err(RatingIoError::Header(DELTAS_HEADER));
    }
    lines.next().transpose()?;
    let mut out: Vec<GameUpdate> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 3;
        let bad = |what: &str| RatingIoError::Parse { line: lineno, message: format!("bad {what}") };
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != DELTA_COLUMNS.len() {
            return Err(bad("column count"));
        }
        let num = |k: usize| c[k].parse::<f64>().map_err(|_| bad(DELTA_COLUMNS[k]));
        let target = match c[5] {
            "contextual" => RatingTarget::Contextual,
            "meta" => RatingTarget::Meta,
            _ => return Err(bad("target")),
        };
        let delta = PlayerDelta {
            player_id: c[1].to_string(),
            context_id: c[2].to_string(),
            side: c[3].parse().map_err(|_| bad("side"))?,
            role: c[4].parse().map_err(|_| bad("role"))?,
            contextual_before: Rating::new(num(6)?, num(7)?),
            contextual_after: Rating::new(num(8)?, num(9)?),
            combined_before: combined(num(10)?, num(11)?),
            combined_after: combined(num(12)?, num(13)?),
            context_reset: match c[14] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("context_reset")),
            },
        };
        match out.last_mut() {
            Some(u) if u.game_id == c[0] => u.deltas.push(delta),
            _ => out.push(GameUpdate { game_id: c[0].to_string(), target, deltas: vec![delta], meta: Vec::new() }),
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct Settings {
    config: RatingConfig,
    mode: UpdateMode,
    variant: Variant,
    games_processed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ContextLine {
    context_id: String,
    meta: Rating,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SnapshotLine {
    Settings(Settings),
    Player(PlayerRatingState),
    Context(ContextLine),
}

pub fn write_snapshot<W: Write>(mut out: W, state: &RatingState) -> std::io::Result<()> {
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    let mut emit = |line: SnapshotLine| -> std::io::Result<()> {
        writeln!(out, "{}", serde_json::to_string(&line).map_err(std::io::Error::other)?)
    };
    emit(SnapshotLine::Settings(Settings {
        config: state.config,
        mode: state.mode,
        variant: state.variant,
        games_processed: state.games_processed,
    }))?;
    for p in state.players.values() {
        emit(SnapshotLine::Player(p.clone()))?;
    }
    for (context_id, meta) in state.registry.iter() {
        emit(SnapshotLine::Context(ContextLine { context_id: context_id.to_string(), meta: *meta }))?;
    }
    out.flush()
}

pub fn read_snapshot<R: BufRead>(input: R) -> Result<RatingState, RatingIoError> {
    let mut lines = input.lines();
    if lines.next().transpose()?.as_deref().map(str::trim_end) != Some(SNAPSHOT_HEADER) {
        return Err(RatingIoError::Header(SNAPSHOT_HEADER));
    }
    let mut state: Option<RatingState> = None;
    let mut registry = ContextRegistry::default();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let parsed: SnapshotLine =
            serde_json::from_str(&line).map_err(|e| RatingIoError::Parse { line: lineno, message: e.to_string() })?;
        match (parsed, state.as_mut()) {
            (SnapshotLine::Settings(s), None) => {
                let mut st = RatingState::new(s.config, s.mode, s.variant);
                st.games_processed = s.games_processed;
                state = Some(st);
            }
            (SnapshotLine::Player(p), Some(st)) => {
                p.contextual
                    .validate()
                    .map_err(|e| RatingIoError::Parse { line: lineno, message: e.to_string() })?;
                st.players.insert(p.player_id.clone(), p);
            }
            (SnapshotLine::Context(c), Some(_)) => registry.set(&c.context_id, c.meta),
            _ => {
                return Err(RatingIoError::Parse {
                    line: lineno,
                    message: "settings must come first and appear once".into(),
                })
            }
        }
    }
    let mut state = state.ok_or(RatingIoError::Parse { line: 2, message: "missing settings line".into() })?;
    state.registry = registry;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::fixtures::game;
    use crate::ingest::Side;

    fn sample() -> (RatingState, Vec<GameUpdate>) {
        let mut s = RatingState::new(RatingConfig::default(), UpdateMode::Ffa, Variant::Meta);
        let scores: Vec<f64> = (0..10).map(|i| (i * 37 % 100) as f64 + 0.1).collect();
        let mut log = vec![s.process_game(&game("g0", "2024-01-01T00:00:00Z", "KR"), Some(&scores)).unwrap()];
        let mut inter = game("g1", "2024-01-02T00:00:00Z", "KR");
        for l in inter.lines.iter_mut().filter(|l| l.side == Side::Red) {
            l.context_id = "EU".into();
        }
        log.push(s.process_game(&inter, Some(&scores)).unwrap());
        (s, log)
    }

    #[test]
    fn snapshot_round_trip() {
        let (s, _) = sample();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &s).unwrap();
        let back = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back, s);
        let mut again = Vec::new();
        write_snapshot(&mut again, &back).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn delta_round_trip() {
        let (_, log) = sample();
        let mut buf = Vec::new();
        write_deltas(&mut buf, &log).unwrap();
        let back = read_deltas(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in back.iter().zip(&log) {
            assert_eq!(a.game_id, b.game_id);
            assert_eq!(a.target, b.target);
            for (da, db) in a.deltas.iter().zip(&b.deltas) {
                assert_eq!(da.contextual_after, db.contextual_after);
                assert_eq!(da.combined_before.mu, db.combined_before.mu);
                assert_eq!(da.combined_before.sigma, db.combined_before.sigma);
                assert_eq!(da.context_reset, db.context_reset);
            }
        }
    }

    #[test]
    fn snapshot_rejects_bad_header() {
        assert!(matches!(read_snapshot(&b"{}\n"[..]), Err(RatingIoError::Header(_))));
    }
}

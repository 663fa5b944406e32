//! Match ingestion: line-delimited JSON game records, validation and
//! chronological ordering.
//!
//! A games file holds one JSON object per line (see `docs/game_schema.md`).
//! Blank lines and lines starting with `#` are ignored; an optional first
//! comment line `#pskill-games v1` pins the format version.

mod record;
mod validate;

use std::collections::HashMap;
use std::io::{BufRead, Write};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use thiserror::Error;

pub use record::{EventKind, GameEvent, GameRecord, ObjectiveTag, PlayerLine, Role, Side};
pub use validate::{lint_game, validate_game, Violation, Warning};

pub const GAMES_HEADER: &str = "#pskill-games v1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record at `{path}`: {message}")]
    Malformed { line: usize, path: String, message: String },
    #[error("duplicate game_id `{game_id}` (timestamps {first} and {second})")]
    Duplicate { game_id: String, first: DateTime<Utc>, second: DateTime<Utc> },
    #[error("line {line}: game `{game_id}` violates invariant: {violation}")]
    Invalid { line: usize, game_id: String, violation: Violation },
    #[error("line {line}: game `{game_id}`: {warning} (strict mode)")]
    Strict { line: usize, game_id: String, warning: Warning },
    #[error("unsupported games file header `{0}`")]
    Header(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Promote warnings to errors.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestWarning {
    pub line: usize,
    pub game_id: String,
    pub warning: Warning,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedGames {
    pub games: Vec<GameRecord>,
    pub warnings: Vec<IngestWarning>,
}

/// Parses, validates, de-duplicates and sorts games by `(timestamp, game_id)`.
pub fn parse_games<R: BufRead>(input: R, options: ParseOptions) -> Result<ParsedGames, IngestError> {
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.starts_with("#pskill-games") && trimmed != GAMES_HEADER {
            return Err(IngestError::Header(trimmed.to_string()));
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((i + 1, line));
    }

    let parsed: Vec<(usize, GameRecord, Vec<Warning>)> = lines
        .par_iter()
        .map(|(line_no, text)| parse_line(*line_no, text))
        .collect::<Result<_, _>>()?;

    let mut out = ParsedGames::default();
    let mut seen: HashMap<String, DateTime<Utc>> = HashMap::with_capacity(parsed.len());
    for (line, mut game, warnings) in parsed {
        if let Some(first) = seen.insert(game.game_id.clone(), game.timestamp) {
            return Err(IngestError::Duplicate { game_id: game.game_id, first, second: game.timestamp });
        }
        for warning in warnings {
            if options.strict {
                return Err(IngestError::Strict { line, game_id: game.game_id, warning });
            }
            if warning == Warning::EventsUnordered {
                game.events.sort_by(|a, b| a.time.total_cmp(&b.time));
            }
            out.warnings.push(IngestWarning { line, game_id: game.game_id.clone(), warning });
        }
        out.games.push(game);
    }
    sort_games(&mut out.games);
    Ok(out)
}

pub fn parse_games_str(input: &str, options: ParseOptions) -> Result<ParsedGames, IngestError> {
    parse_games(input.as_bytes(), options)
}

fn parse_line(line: usize, text: &str) -> Result<(usize, GameRecord, Vec<Warning>), IngestError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let game: GameRecord = serde_path_to_error::deserialize(de).map_err(|e| IngestError::Malformed {
        line,
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    validate_game(&game).map_err(|violation| IngestError::Invalid {
        line,
        game_id: game.game_id.clone(),
        violation,
    })?;
    let warnings = lint_game(&game);
    Ok((line, game, warnings))
}

/// Total order used for rating replay: timestamp, then game id.
pub fn sort_games(games: &mut [GameRecord]) {
    games.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
}

pub fn write_games<W: Write>(mut out: W, games: &[GameRecord]) -> std::io::Result<()> {
    writeln!(out, "{GAMES_HEADER}")?;
    for game in games {
        serde_json::to_writer(&mut out, game)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_games_file(path: &std::path::Path, options: ParseOptions) -> Result<ParsedGames, IngestError> {
    let file = std::fs::File::open(path)?;
    parse_games(std::io::BufReader::new(file), options)
}

/// True iff the player was seen before in a different context.
pub fn detect_context_change(previous: Option<&str>, new_context_id: &str) -> bool {
    matches!(previous, Some(prev) if prev != new_context_id)
}

/// Last context seen per player.
#[derive(Debug, Clone, Default)]
pub struct ContextHistory {
    last: HashMap<String, String>,
}

impl ContextHistory {
    pub fn last_context(&self, player_id: &str) -> Option<&str> {
        self.last.get(player_id).map(String::as_str)
    }

    pub fn changed(&self, player_id: &str, new_context_id: &str) -> bool {
        detect_context_change(self.last_context(player_id), new_context_id)
    }

    /// Records the context and reports whether it changed.
    pub fn observe(&mut self, player_id: &str, context_id: &str) -> bool {
        let changed = self.changed(player_id, context_id);
        self.last.insert(player_id.to_string(), context_id.to_string());
        changed
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// A valid game with players `b0..b4` (BLUE) and `r0..r4` (RED) in role order.
    pub fn game(id: &str, ts: &str, context: &str) -> GameRecord {
        let mut lines = Vec::new();
        for (side, prefix) in [(Side::Blue, "b"), (Side::Red, "r")] {
            for role in Role::ALL {
                lines.push(PlayerLine {
                    player_id: format!("{prefix}{}", role.index()),
                    side,
                    role,
                    context_id: context.to_string(),
                    kills: 0,
                    deaths: 0,
                    assists: 0,
                    gold: 10_000.0,
                    experience: 12_000.0,
                    creep_score: 200.0,
                    wards_placed: 10.0,
                    damage_dealt_to_players: 15_000.0,
                    damage_taken_from_players: 15_000.0,
                });
            }
        }
        GameRecord {
            game_id: id.to_string(),
            timestamp: ts.parse().unwrap(),
            duration: 1800.0,
            competition_id: "TEST".to_string(),
            is_inter_context_event: false,
            winner: Side::Blue,
            lines,
            events: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::game;
    use super::*;

    fn to_jsonl(games: &[GameRecord]) -> String {
        let mut buf = Vec::new();
        write_games(&mut buf, games).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_input_is_empty() {
        let parsed = parse_games_str("", ParseOptions::default()).unwrap();
        assert!(parsed.games.is_empty());
        let parsed = parse_games_str("#pskill-games v1\n\n", ParseOptions::default()).unwrap();
        assert!(parsed.games.is_empty());
    }

    #[test]
    fn sorts_by_timestamp_then_id() {
        let a = game("b", "2024-02-01T00:00:00Z", "KR");
        let b = game("a", "2024-01-01T00:00:00Z", "KR");
        let c = game("a2", "2024-02-01T00:00:00Z", "KR");
        let parsed = parse_games_str(&to_jsonl(&[a, b, c]), ParseOptions::default()).unwrap();
        let ids: Vec<_> = parsed.games.iter().map(|g| g.game_id.as_str()).collect();
        assert_eq!(ids, ["a", "a2", "b"]);
    }

    #[test]
    fn nine_lines_rejected() {
        let mut g = game("g", "2024-01-01T00:00:00Z", "KR");
        g.lines.pop();
        let err = parse_games_str(&to_jsonl(&[g]), ParseOptions::default()).unwrap_err();
        assert!(err.to_string().contains("exactly 10 lines"), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_and_path() {
        let g = game("g", "2024-01-01T00:00:00Z", "KR");
        let text = to_jsonl(&[g]).replace("\"kills\":0", "\"kills\":-1");
        match parse_games_str(&text, ParseOptions::default()).unwrap_err() {
            IngestError::Malformed { line, path, .. } => {
                assert_eq!(line, 2);
                assert_eq!(path, "lines[0].kills");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_reports_both_timestamps() {
        let a = game("g", "2024-01-01T00:00:00Z", "KR");
        let b = game("g", "2024-03-01T00:00:00Z", "KR");
        let err = parse_games_str(&to_jsonl(&[a, b]), ParseOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2024-01-01") && msg.contains("2024-03-01"), "{msg}");
    }

    #[test]
    fn bad_header_version() {
        let err = parse_games_str("#pskill-games v9\n", ParseOptions::default()).unwrap_err();
        assert!(matches!(err, IngestError::Header(_)));
    }

    #[test]
    fn strict_mode_promotes_warnings() {
        let mut g = game("g", "2024-01-01T00:00:00Z", "KR");
        g.events = vec![
            GameEvent::champion_kill(100.0, "b0", "r0", &[]),
            GameEvent::champion_kill(50.0, "b1", "r1", &[]),
        ];
        g.lines[0].kills = 1;
        g.lines[1].kills = 1;
        g.lines[5].deaths = 1;
        g.lines[6].deaths = 1;
        let text = to_jsonl(&[g]);
        let lenient = parse_games_str(&text, ParseOptions::default()).unwrap();
        assert_eq!(lenient.warnings.len(), 1);
        assert_eq!(lenient.games[0].events[0].time, 50.0);
        assert!(matches!(
            parse_games_str(&text, ParseOptions { strict: true }),
            Err(IngestError::Strict { .. })
        ));
    }

    #[test]
    fn event_invariants() {
        let base = game("g", "2024-01-01T00:00:00Z", "KR");
        let cases = [
            GameEvent::champion_kill(10.0, "b0", "b1", &[]),
            GameEvent::champion_kill(10.0, "b0", "r1", &["b0"]),
            GameEvent::champion_kill(1e9, "b0", "r1", &[]),
            GameEvent::champion_kill(10.0, "zz", "r1", &[]),
            GameEvent::objective(EventKind::BuildingKill, ObjectiveTag::Drake, 10.0, "b0", &[]),
        ];
        for event in cases {
            let mut g = base.clone();
            g.events.push(event);
            assert!(validate_game(&g).is_err());
        }
    }

    #[test]
    fn context_change_detection() {
        assert!(!detect_context_change(None, "KR"));
        assert!(!detect_context_change(Some("KR"), "KR"));
        assert!(detect_context_change(Some("KR"), "EU"));

        let mut history = ContextHistory::default();
        assert!(!history.observe("p", "KR"));
        assert!(!history.observe("p", "KR"));
        assert!(history.observe("p", "EU"));
        assert_eq!(history.last_context("p"), Some("EU"));
    }

    #[test]
    fn intra_classification_is_strict() {
        let mut g = game("g", "2024-01-01T00:00:00Z", "KR");
        assert!(g.is_intra_context());
        g.lines[3].context_id = "EU".into();
        assert!(!g.is_intra_context());
    }
}

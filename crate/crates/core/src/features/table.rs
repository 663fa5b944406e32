//! Tab-separated feature files.
//!
//! ```text
//! #pskill-features v1
//! game_id  player_id  role  side  context_id  win  kla  gold_per_min ...
//! ```
//! Floats are written in shortest round-trip form.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::{FeatureVector, PlayerFeatures, FEATURE_NAMES, N_FEATURES};
use crate::ingest::{Role, Side};

pub const FEATURES_HEADER: &str = "#pskill-features v1";
const KEY_COLUMNS: [&str; 6] = ["game_id", "player_id", "role", "side", "context_id", "win"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing or unsupported header, expected `{0}`")]
    Header(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One player in one game, flattened for model training.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub game_id: String,
    pub player_id: String,
    pub role: Role,
    pub side: Side,
    pub context_id: String,
    pub win: bool,
    pub values: [f64; N_FEATURES],
}

impl FeatureRow {
    pub fn from_player(game_id: &str, p: PlayerFeatures) -> Self {
        FeatureRow {
            game_id: game_id.to_string(),
            player_id: p.player_id,
            role: p.role,
            side: p.side,
            context_id: p.context_id,
            win: p.won,
            values: p.features.to_array(),
        }
    }

    pub fn features(&self) -> FeatureVector {
        FeatureVector::from_array(self.values)
    }
}

pub fn write_feature_rows<W: Write>(mut out: W, rows: &[FeatureRow]) -> std::io::Result<()> {
    writeln!(out, "{FEATURES_HEADER}")?;
    let header: Vec<&str> = KEY_COLUMNS.iter().chain(FEATURE_NAMES.iter()).copied().collect();
    writeln!(out, "{}", header.join("\t"))?;
    for r in rows {
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.game_id,
            r.player_id,
            r.role,
            r.side,
            r.context_id,
            u8::from(r.win)
        )?;
        for v in r.values {
            write!(out, "\t{v}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_feature_rows<R: BufRead>(input: R) -> Result<Vec<FeatureRow>, TableError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(l))) if l.trim_end() == FEATURES_HEADER => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(TableError::Header(FEATURES_HEADER)),
    }
    match lines.next() {
        Some((_, Ok(l))) if l.split('\t').count() == KEY_COLUMNS.len() + N_FEATURES => {}
        _ => return Err(TableError::Header(FEATURES_HEADER)),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| TableError::Parse { line: i + 1, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != KEY_COLUMNS.len() + N_FEATURES {
            return Err(err(format!("expected {} columns, found {}", KEY_COLUMNS.len() + N_FEATURES, cols.len())));
        }
        let mut values = [0.0; N_FEATURES];
        for (j, v) in values.iter_mut().enumerate() {
            *v = cols[KEY_COLUMNS.len() + j]
                .parse()
                .map_err(|e| err(format!("column `{}`: {e}", FEATURE_NAMES[j])))?;
        }
        rows.push(FeatureRow {
            game_id: cols[0].to_string(),
            player_id: cols[1].to_string(),
            role: cols[2].parse().map_err(err)?,
            side: cols[3].parse().map_err(err)?,
            context_id: cols[4].to_string(),
            win: match cols[5] {
                "1" => true,
                "0" => false,
                other => return Err(err(format!("column `win`: expected 0/1, got `{other}`"))),
            },
            values,
        });
    }
    Ok(rows)
}

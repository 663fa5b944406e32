//! Model directories and PScore files.
//!
//! A model directory holds `index.json` (fold count, seed, transform
//! pooling) and one pretty-printed JSON file per (role, fold) named
//! `model_<Role>_fold<k>.json` with the weights, standardizer and sorted
//! percentile vector.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cv::{CvConfig, FoldModel, ModelSet, PScoreRecord};
use super::logistic::WinModel;
use super::ModelError;
use crate::ingest::Role;

pub const PSCORES_HEADER: &str = "#pskill-pscores v1";
const MODELS_FORMAT: &str = "pskill-models";

#[derive(Debug, Serialize, Deserialize)]
struct ModelIndex {
    format: String,
    version: u32,
    folds: usize,
    seed: u64,
    pooled_transform: bool,
}

pub fn model_file_name(role: Role, fold: usize) -> String {
    format!("model_{role}_fold{fold}.json")
}

pub fn write_model_dir(dir: &Path, set: &ModelSet<WinModel>) -> Result<(), ModelError> {
    std::fs::create_dir_all(dir)?;
    let index = ModelIndex {
        format: MODELS_FORMAT.into(),
        version: 1,
        folds: set.config.folds,
        seed: set.config.seed,
        pooled_transform: set.config.pooled_transform,
    };
    std::fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)? + "\n")?;
    for fm in &set.models {
        let text = serde_json::to_string_pretty(fm)? + "\n";
        std::fs::write(dir.join(model_file_name(fm.role, fm.fold)), text)?;
    }
    Ok(())
}

pub fn read_model_dir(dir: &Path) -> Result<ModelSet<WinModel>, ModelError> {
    let index: ModelIndex = serde_json::from_str(&std::fs::read_to_string(dir.join("index.json"))?)?;
    if index.format != MODELS_FORMAT || index.version != 1 {
        return Err(ModelError::Format(format!("{} v{}", index.format, index.version)));
    }
    let mut models = Vec::with_capacity(index.folds * Role::ALL.len());
    for role in Role::ALL {
        for fold in 0..index.folds {
            let text = std::fs::read_to_string(dir.join(model_file_name(role, fold)))?;
            let fm: FoldModel<WinModel> = serde_json::from_str(&text)?;
            if fm.role != role || fm.fold != fold {
                return Err(ModelError::Format(format!("{} holds the wrong model", model_file_name(role, fold))));
            }
            models.push(fm);
        }
    }
    Ok(ModelSet {
        config: CvConfig { folds: index.folds, seed: index.seed, pooled_transform: index.pooled_transform },
        models,
    })
}

pub fn write_pscores<W: Write>(mut out: W, records: &[PScoreRecord]) -> std::io::Result<()> {
    writeln!(out, "{PSCORES_HEADER}")?;
    writeln!(out, "game_id\tplayer_id\trole\twin_prob\tpscore\tfold")?;
    for r in records {
        writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.game_id, r.player_id, r.role, r.win_prob, r.pscore, r.fold)?;
    }
    out.flush()
}

pub fn read_pscores<R: BufRead>(input: R) -> Result<Vec<PScoreRecord>, ModelError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(PSCORES_HEADER) {
        return Err(ModelError::Format(format!("expected `{PSCORES_HEADER}`")));
    }
    lines.next().transpose()?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| ModelError::Format(format!("pscores line {}: bad {what}", i + 3));
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 6 {
            return Err(bad("column count"));
        }
        out.push(PScoreRecord {
            game_id: c[0].to_string(),
            player_id: c[1].to_string(),
            role: c[2].parse().map_err(|_| bad("role"))?,
            win_prob: c[3].parse().map_err(|_| bad("win_prob"))?,
            pscore: c[4].parse().map_err(|_| bad("pscore"))?,
            fold: c[5].parse().map_err(|_| bad("fold"))?,
        });
    }
    Ok(out)
}

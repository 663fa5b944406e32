//! One function per pipeline stage, reading and writing files. The `pskill`
//! subcommands and [`super::run_pipeline`] share these.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::PipelineError;
use crate::eval::{
    ablation_report, default_models, pre_game_ratings, read_latent, render_table, role_fairness, rolling_forecast_eval,
    AblationConfig, FairnessReport, ForecastReport, RatingValue, VariantReport,
};
use crate::features::{extract_corpus, read_feature_rows, write_feature_rows, FeatureConfig, FeatureRow};
use crate::ingest::{read_games_file, write_games, GameRecord, IngestError, ParseOptions, ParsedGames, Role};
use crate::perf::io::{read_model_dir, read_pscores, write_model_dir, write_pscores};
use crate::perf::{cross_val_pscores, CvConfig, LogisticTrainer, ModelSet, PScoreRecord, WinModel};
use crate::rating::io::{read_deltas, read_snapshot, write_deltas, write_snapshot};
use crate::rating::{rank_players, replay, LeaderboardEntry, PScoreTable, RatingConfig, RatingState, UpdateMode, Variant};

pub const LEADERBOARD_HEADER: &str = "#pskill-leaderboard v1";

fn create(path: &Path) -> Result<BufWriter<File>, std::io::Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Missing inputs are the caller's mistake; other read errors are not.
fn read_error(stage: &'static str, path: &Path, e: std::io::Error) -> PipelineError {
    let message = format!("{}: {e}", path.display());
    if e.kind() == std::io::ErrorKind::NotFound {
        PipelineError::validation(stage, message)
    } else {
        PipelineError::failure(stage, message)
    }
}

fn open(stage: &'static str, path: &Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path).map(BufReader::new).map_err(|e| read_error(stage, path, e))
}

pub fn load_games(path: &Path, strict: bool) -> Result<ParsedGames, PipelineError> {
    read_games_file(path, ParseOptions { strict }).map_err(|e| match e {
        IngestError::Io(io) => read_error("ingest", path, io),
        other => PipelineError::validation("ingest", other),
    })
}

/// Validates, sorts and rewrites a games file.
pub fn ingest(input: &Path, out: &Path, strict: bool) -> Result<ParsedGames, PipelineError> {
    let parsed = load_games(input, strict)?;
    for w in &parsed.warnings {
        log::warn!("line {}: game {}: {}", w.line, w.game_id, w.warning);
    }
    let mut f = create(out).map_err(|e| PipelineError::failure("ingest", e))?;
    write_games(&mut f, &parsed.games).map_err(|e| PipelineError::failure("ingest", e))?;
    Ok(parsed)
}

pub fn features(games: &Path, out: &Path, cfg: &FeatureConfig) -> Result<Vec<FeatureRow>, PipelineError> {
    let parsed = load_games(games, false)?;
    let rows = extract_corpus(&parsed.games, cfg).map_err(|e| PipelineError::validation("features", e))?;
    let mut f = create(out).map_err(|e| PipelineError::failure("features", e))?;
    write_feature_rows(&mut f, &rows).map_err(|e| PipelineError::failure("features", e))?;
    Ok(rows)
}

pub fn load_features(path: &Path) -> Result<Vec<FeatureRow>, PipelineError> {
    let f = open("features", path)?;
    read_feature_rows(f).map_err(|e| PipelineError::validation("features", e))
}

/// Cross-validated fit of the per-role win models. Returns the model set
/// and the out-of-fold PScores.
pub fn train(
    features: &Path,
    out_dir: &Path,
    cv: &CvConfig,
    trainer: &LogisticTrainer,
) -> Result<(ModelSet<WinModel>, Vec<PScoreRecord>), PipelineError> {
    let rows = load_features(features)?;
    let result = cross_val_pscores(&rows, cv, trainer).map_err(|e| PipelineError::failure("train", e))?;
    write_model_dir(out_dir, &result.models).map_err(|e| PipelineError::failure("train", e))?;
    Ok((result.models, result.records))
}

pub fn pscore(features: &Path, models: &Path, out: &Path) -> Result<Vec<PScoreRecord>, PipelineError> {
    let rows = load_features(features)?;
    let set = read_model_dir(models).map_err(|e| PipelineError::validation("pscore", e))?;
    let records = set.score(&rows).map_err(|e| PipelineError::failure("pscore", e))?;
    let mut f = create(out).map_err(|e| PipelineError::failure("pscore", e))?;
    write_pscores(&mut f, &records).map_err(|e| PipelineError::failure("pscore", e))?;
    Ok(records)
}

pub fn load_pscores(path: &Path) -> Result<PScoreTable, PipelineError> {
    let f = open("pscore", path)?;
    let records = read_pscores(f).map_err(|e| PipelineError::validation("pscore", e))?;
    Ok(PScoreTable::from_records(&records))
}

pub const DELTAS_FILE: &str = "deltas.tsv";
pub const SNAPSHOT_FILE: &str = "snapshot.jsonl";

/// Replays all games and writes the delta log and the final snapshot into
/// `out_dir`.
pub fn rate(
    games: &Path,
    pscores: Option<&Path>,
    config: RatingConfig,
    mode: UpdateMode,
    variant: Variant,
    out_dir: &Path,
) -> Result<RatingState, PipelineError> {
    let parsed = load_games(games, false)?;
    let table = pscores.map(load_pscores).transpose()?;
    if mode == UpdateMode::Ffa && table.is_none() {
        return Err(PipelineError::validation("rate", "ffa mode needs PScores (--pscores)"));
    }
    let (state, log) = replay(&parsed.games, table.as_ref(), config, mode, variant).map_err(|e| PipelineError::failure("rate", e))?;
    let io = |e: std::io::Error| PipelineError::failure("rate", e);
    write_deltas(create(&out_dir.join(DELTAS_FILE)).map_err(io)?, &log).map_err(io)?;
    write_snapshot(create(&out_dir.join(SNAPSHOT_FILE)).map_err(io)?, &state).map_err(io)?;
    Ok(state)
}

pub fn load_snapshot(path: &Path) -> Result<RatingState, PipelineError> {
    let f = open("rank", path)?;
    read_snapshot(f).map_err(|e| PipelineError::validation("rank", e))
}

pub fn write_leaderboard<W: Write>(mut out: W, board: &[LeaderboardEntry]) -> std::io::Result<()> {
    writeln!(out, "{LEADERBOARD_HEADER}")?;
    writeln!(out, "rank\tplayer_id\tcontext_id\trole\ttheta\tmu\tsigma\tgames")?;
    for e in board {
        let role = e.role.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.rank, e.player_id, e.context_id, role, e.theta, e.mu, e.sigma, e.games_played
        )?;
    }
    out.flush()
}

/// Human-readable leaderboard.
pub fn render_leaderboard(board: &[LeaderboardEntry]) -> String {
    let mut out = format!("{:>5}  {:<16} {:<10} {:<8} {:>8} {:>8} {:>7}\n", "rank", "player", "context", "role", "theta", "mu", "sigma");
    for e in board {
        let role = e.role.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:>5}  {:<16} {:<10} {:<8} {:>8.2} {:>8.2} {:>7.3}\n",
            e.rank, e.player_id, e.context_id, role, e.theta, e.mu, e.sigma
        ));
    }
    out
}

pub fn rank(snapshot: &Path, out: Option<&Path>, top: Option<usize>) -> Result<Vec<LeaderboardEntry>, PipelineError> {
    let state = load_snapshot(snapshot)?;
    let mut board = rank_players(&state);
    if let Some(n) = top {
        board.truncate(n);
    }
    if let Some(path) = out {
        let f = create(path).map_err(|e| PipelineError::failure("rank", e))?;
        write_leaderboard(f, &board).map_err(|e| PipelineError::failure("rank", e))?;
    }
    Ok(board)
}

fn write_jsonl<W: Write, T: Serialize>(mut out: W, kind: &str, items: &[T]) -> std::io::Result<()> {
    for item in items {
        let mut obj = serde_json::Map::new();
        obj.insert("record".into(), kind.into());
        obj.insert(kind.into(), serde_json::to_value(item).map_err(std::io::Error::other)?);
        writeln!(out, "{}", serde_json::Value::Object(obj))?;
    }
    Ok(())
}

fn percent(v: Option<f64>) -> String {
    v.map(|x| format!("{:.2}", 100.0 * x)).unwrap_or_else(|| "-".into())
}

pub fn render_forecast(report: &ForecastReport) -> String {
    let mut out = format!(
        "{:<12} {:<12} {:>7} {:>8} {:>8} {:>8} {:>8}\n",
        "train_from", "test_from", "n_test", "acc", "acc_in", "acc_x", "ece"
    );
    let row = |label_a: String, label_b: String, n: usize, m: &crate::eval::ScopedMetrics| {
        format!(
            "{:<12} {:<12} {:>7} {:>8} {:>8} {:>8} {:>8}\n",
            label_a,
            label_b,
            n,
            percent(m.all.accuracy),
            percent(m.intra.accuracy),
            percent(m.inter.accuracy),
            percent(m.all.ece)
        )
    };
    for w in &report.windows {
        out.push_str(&row(w.train_start.date_naive().to_string(), w.test_start.date_naive().to_string(), w.n_test, &w.metrics));
    }
    out.push_str(&row("pooled".into(), String::new(), report.pooled.all.n, &report.pooled));
    out
}

/// Rolling forecast from a rating directory's delta log, written to `out`
/// as one JSON line per window plus a pooled line.
pub fn eval_forecast(
    games: &Path,
    ratings_dir: &Path,
    cfg: &crate::eval::ForecastConfig,
    value: RatingValue,
    out: &Path,
) -> Result<ForecastReport, PipelineError> {
    let parsed = load_games(games, false)?;
    let f = open("eval", &ratings_dir.join(DELTAS_FILE))?;
    let updates = read_deltas(f).map_err(|e| PipelineError::validation("eval", e))?;
    let log = pre_game_ratings(&parsed.games, &updates, value).map_err(|e| PipelineError::validation("eval", e))?;
    let report = rolling_forecast_eval(&log, cfg).map_err(|e| PipelineError::failure("eval", e))?;
    let io = |e: std::io::Error| PipelineError::failure("eval", e);
    let mut f = create(out).map_err(io)?;
    write_jsonl(&mut f, "window", &report.windows).map_err(io)?;
    write_jsonl(&mut f, "pooled", std::slice::from_ref(&report.pooled)).map_err(io)?;
    f.flush().map_err(io)?;
    Ok(report)
}

pub fn final_values_by_role(state: &RatingState, value: RatingValue) -> BTreeMap<Role, Vec<f64>> {
    let mut by_role: BTreeMap<Role, Vec<f64>> = BTreeMap::new();
    for p in state.players.values() {
        if let (Some(role), Ok(c)) = (p.main_role(), state.combined(&p.player_id)) {
            by_role.entry(role).or_default().push(value.of(&c));
        }
    }
    by_role
}

pub fn render_fairness(report: &FairnessReport) -> String {
    let mut out = String::new();
    for p in &report.pairs {
        out.push_str(&format!("{:<8} {:<8} {:>8.3}\n", p.a, p.b, p.distance));
    }
    out.push_str(&format!("{:<17} {:>8.3}\n", "mean", report.mean_distance));
    out
}

/// Role fairness of the final ratings in a snapshot.
pub fn eval_fairness(ratings_dir: &Path, value: RatingValue, out: &Path) -> Result<FairnessReport, PipelineError> {
    let state = load_snapshot(&ratings_dir.join(SNAPSHOT_FILE))?;
    let report = role_fairness(&final_values_by_role(&state, value)).map_err(|e| PipelineError::failure("eval", e))?;
    let io = |e: std::io::Error| PipelineError::failure("eval", e);
    let mut f = create(out).map_err(io)?;
    write_jsonl(&mut f, "pair", &report.pairs).map_err(io)?;
    write_jsonl(&mut f, "mean", &[report.mean_distance]).map_err(io)?;
    f.flush().map_err(io)?;
    Ok(report)
}

/// Every rating variant over the same games; requires PScores.
pub fn eval_ablation(
    games: &Path,
    pscores: &Path,
    latent: Option<&Path>,
    cfg: &AblationConfig,
    out: &Path,
) -> Result<Vec<VariantReport>, PipelineError> {
    let parsed = load_games(games, false)?;
    let table = load_pscores(pscores)?;
    let latent = latent
        .map(|p| {
            let f = open("eval", p)?;
            read_latent(f).map_err(|e| PipelineError::validation("eval", e))
        })
        .transpose()?;
    let reports = ablation_report(&parsed.games, &table, latent.as_deref(), &default_models(), cfg)
        .map_err(|e| PipelineError::failure("eval", e))?;
    let io = |e: std::io::Error| PipelineError::failure("eval", e);
    let mut f = create(out).map_err(io)?;
    write_jsonl(&mut f, "variant", &reports).map_err(io)?;
    f.flush().map_err(io)?;
    Ok(reports)
}

pub fn ablation_summary(reports: &[VariantReport]) -> String {
    render_table(reports)
}

/// Writes a corpus as a games file.
pub fn write_games_file(path: &Path, games: &[GameRecord]) -> Result<(), PipelineError> {
    let f = create(path).map_err(|e| PipelineError::failure("simulate", e))?;
    write_games(f, games).map_err(|e| PipelineError::failure("simulate", e))
}

pub fn write_text(path: &Path, text: &str, stage: &'static str) -> Result<(), PipelineError> {
    let mut f = create(path).map_err(|e| PipelineError::failure(stage, e))?;
    f.write_all(text.as_bytes()).and_then(|_| f.flush()).map_err(|e| PipelineError::failure(stage, e))
}

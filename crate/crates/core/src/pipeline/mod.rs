//! End-to-end orchestration: ingest, features, train, pscore, rate, rank,
//! eval. Every stage writes plain-text artifacts under one output directory
//! and records their SHA-256 in a manifest; a stage whose inputs hash the
//! same as last time, and whose outputs are intact, is skipped.

mod config;
pub mod manifest;
pub mod stages;

use std::fmt::Display;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{EvalSection, InputConfig, ModelConfig, PipelineConfig, RatingSection};
pub use manifest::{Manifest, OutputRecord, StageRecord, MANIFEST_FILE, MANIFEST_HEADER};

use crate::eval::AblationConfig;
use crate::perf::{CvConfig, LogisticTrainer};
use manifest::{collect_outputs, outputs_intact, InputHasher};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad config, flags or input data.
    Validation,
    /// A stage could not complete.
    Stage,
}

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: ErrorKind,
    pub message: String,
}

impl PipelineError {
    pub fn config(message: impl Into<String>) -> Self {
        PipelineError { stage: "config", kind: ErrorKind::Validation, message: message.into() }
    }

    pub fn validation(stage: &'static str, err: impl Display) -> Self {
        PipelineError { stage, kind: ErrorKind::Validation, message: err.to_string() }
    }

    pub fn failure(stage: &'static str, err: impl Display) -> Self {
        PipelineError { stage, kind: ErrorKind::Stage, message: err.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Stage => 3,
        }
    }
}

pub const STAGES: [&str; 7] = ["ingest", "features", "train", "pscore", "rate", "rank", "eval"];

/// Artifact locations inside the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }
    pub fn games(&self) -> PathBuf {
        self.root.join("games.jsonl")
    }
    pub fn features(&self) -> PathBuf {
        self.root.join("features.tsv")
    }
    pub fn models(&self) -> PathBuf {
        self.root.join("models")
    }
    pub fn pscores(&self) -> PathBuf {
        self.root.join("pscores.tsv")
    }
    pub fn ratings(&self) -> PathBuf {
        self.root.join("ratings")
    }
    pub fn leaderboard(&self) -> PathBuf {
        self.root.join("leaderboard.tsv")
    }
    pub fn eval(&self) -> PathBuf {
        self.root.join("eval")
    }

    pub fn stage_output(&self, stage: &str) -> PathBuf {
        match stage {
            "ingest" => self.games(),
            "features" => self.features(),
            "train" => self.models(),
            "pscore" => self.pscores(),
            "rate" => self.ratings(),
            "rank" => self.leaderboard(),
            "eval" => self.eval(),
            other => panic!("unknown stage {other}"),
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub manifest: Manifest,
    pub ran: Vec<&'static str>,
    pub skipped: Vec<&'static str>,
    pub error: Option<PipelineError>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, PipelineError::exit_code)
    }
}

struct Runner<'a> {
    cfg: &'a PipelineConfig,
    layout: Layout,
    previous: Option<Manifest>,
    force: bool,
    manifest: Manifest,
    ran: Vec<&'static str>,
    skipped: Vec<&'static str>,
    empty_corpus: bool,
}

impl Runner<'_> {
    fn hash_files(&self, stage: &'static str, h: &mut InputHasher, paths: &[PathBuf]) -> Result<(), PipelineError> {
        for p in paths {
            h.files("file", &self.layout.root, p).map_err(|e| PipelineError::failure(stage, e))?;
        }
        Ok(())
    }

    fn step(
        &mut self,
        stage: &'static str,
        input_hash: String,
        run: impl FnOnce(&Layout) -> Result<(), PipelineError>,
    ) -> Result<(), PipelineError> {
        let previous = self.previous.as_ref().and_then(|m| m.stage(stage)).filter(|r| {
            !r.stale && r.input_hash == input_hash && outputs_intact(&self.layout.root, &r.outputs)
        });
        if let (false, Some(rec)) = (self.force, previous) {
            log::info!("{stage}: inputs unchanged, skipped");
            self.manifest.stages.push(rec.clone());
            self.skipped.push(stage);
            return Ok(());
        }
        log::info!("{stage}: running");
        let out = self.layout.stage_output(stage);
        if out.is_dir() {
            std::fs::remove_dir_all(&out).map_err(|e| PipelineError::failure(stage, e))?;
        }
        run(&self.layout)?;
        let outputs = collect_outputs(&self.layout.root, &out).map_err(|e| PipelineError::failure(stage, e))?;
        self.manifest.stages.push(StageRecord { name: stage.into(), input_hash, outputs, stale: false });
        self.ran.push(stage);
        Ok(())
    }

    fn stages(&mut self) -> Result<(), PipelineError> {
        let cfg = self.cfg;
        let l = self.layout.clone();

        let games_bytes = std::fs::read(&cfg.input.games)
            .map_err(|e| PipelineError::validation("ingest", format!("{}: {e}", cfg.input.games.display())))?;
        let h = InputHasher::new("ingest").part("games", &games_bytes).json("strict", &cfg.input.strict).finish();
        let empty = std::cell::Cell::new(false);
        let ingested = self.step("ingest", h, |l| {
            let parsed = stages::ingest(&cfg.input.games, &l.games(), cfg.input.strict)?;
            if parsed.games.is_empty() {
                empty.set(true);
                return Err(PipelineError::validation(
                    "ingest",
                    format!("{} holds no games", cfg.input.games.display()),
                ));
            }
            Ok(())
        });
        self.empty_corpus = empty.get();
        ingested?;

        let mut h = InputHasher::new("features");
        self.hash_files("features", h.json("features", &cfg.features), &[l.games()])?;
        self.step("features", h.finish(), |l| stages::features(&l.games(), &l.features(), &cfg.features).map(drop))?;

        let cv = CvConfig { folds: cfg.model.folds, seed: cfg.seed, pooled_transform: cfg.model.pooled_transform };
        let mut h = InputHasher::new("train");
        self.hash_files("train", h.json("model", &cfg.model).json("seed", &cfg.seed), &[l.features()])?;
        self.step("train", h.finish(), |l| {
            let trainer = LogisticTrainer { config: cfg.model.fit(), ..LogisticTrainer::default() };
            stages::train(&l.features(), &l.models(), &cv, &trainer).map(drop)
        })?;

        let mut h = InputHasher::new("pscore");
        self.hash_files("pscore", &mut h, &[l.features(), l.models()])?;
        self.step("pscore", h.finish(), |l| stages::pscore(&l.features(), &l.models(), &l.pscores()).map(drop))?;

        let r = cfg.rating;
        let mut h = InputHasher::new("rate");
        self.hash_files("rate", h.json("rating", &r), &[l.games(), l.pscores()])?;
        self.step("rate", h.finish(), |l| {
            stages::rate(&l.games(), Some(&l.pscores()), r.params, r.mode, r.variant, &l.ratings()).map(drop)
        })?;

        let snapshot = l.ratings().join(stages::SNAPSHOT_FILE);
        let mut h = InputHasher::new("rank");
        self.hash_files("rank", &mut h, std::slice::from_ref(&snapshot))?;
        self.step("rank", h.finish(), |l| stages::rank(&snapshot, Some(&l.leaderboard()), None).map(drop))?;

        let mut h = InputHasher::new("eval");
        h.json("eval", &cfg.eval);
        if let Some(latent) = &cfg.input.latent {
            let bytes = std::fs::read(latent)
                .map_err(|e| PipelineError::validation("eval", format!("{}: {e}", latent.display())))?;
            h.part("latent", &bytes);
        }
        self.hash_files("eval", &mut h, &[l.games(), l.pscores(), l.ratings()])?;
        self.step("eval", h.finish(), |l| run_eval(cfg, l))
    }

    /// Records the failed stage and every later one as stale, keeping
    /// whatever artifacts they left behind.
    fn mark_stale(&mut self, failed: &str) {
        let start = STAGES.iter().position(|s| *s == failed).unwrap_or(0);
        for &stage in &STAGES[start..] {
            if self.manifest.stage(stage).is_some() {
                continue;
            }
            let outputs = collect_outputs(&self.layout.root, &self.layout.stage_output(stage)).unwrap_or_default();
            if outputs.is_empty() && stage != failed {
                continue;
            }
            self.manifest.stages.push(StageRecord { name: stage.into(), input_hash: String::new(), outputs, stale: true });
        }
    }
}

fn run_eval(cfg: &PipelineConfig, l: &Layout) -> Result<(), PipelineError> {
    let dir = l.eval();
    let e = &cfg.eval;
    let forecast = stages::eval_forecast(&l.games(), &l.ratings(), &e.forecast, e.value, &dir.join("forecast.jsonl"))?;
    let fairness = stages::eval_fairness(&l.ratings(), e.value, &dir.join("fairness.jsonl"))?;
    let mut summary = format!(
        "forecast ({} windows, {:?} features)\n{}\nrole fairness (W1 between roles)\n{}",
        forecast.windows.len(),
        e.forecast.features,
        stages::render_forecast(&forecast),
        stages::render_fairness(&fairness)
    );
    if e.ablation {
        let acfg = AblationConfig {
            rating: cfg.rating.params,
            forecast: e.forecast.clone(),
            value: e.value,
            ewma_alpha: e.ewma_alpha,
        };
        let reports = stages::eval_ablation(
            &l.games(),
            &l.pscores(),
            cfg.input.latent.as_deref(),
            &acfg,
            &dir.join("ablation.jsonl"),
        )?;
        summary.push_str("\nablation\n");
        summary.push_str(&stages::ablation_summary(&reports));
    }
    stages::write_text(&dir.join("summary.txt"), &summary, "eval")
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), PipelineError> {
    let f = std::fs::File::create(dir.join(MANIFEST_FILE)).map_err(|e| PipelineError::failure("manifest", e))?;
    manifest.write(std::io::BufWriter::new(f)).map_err(|e| PipelineError::failure("manifest", e))
}

/// Runs every stage in order and writes the manifest. With `force`, no
/// stage is skipped.
pub fn run_pipeline(config: &PipelineConfig, force: bool) -> RunReport {
    let empty = |error| RunReport {
        manifest: Manifest { config: Some(config.clone()), stages: Vec::new() },
        ran: Vec::new(),
        skipped: Vec::new(),
        error: Some(error),
    };
    if let Err(e) = config.validate() {
        return empty(e);
    }
    if !config.input.games.is_file() {
        return empty(PipelineError::validation(
            "ingest",
            format!("input {} does not exist", config.input.games.display()),
        ));
    }
    let root = &config.input.out_dir;
    if let Err(e) = std::fs::create_dir_all(root) {
        return empty(PipelineError::failure("ingest", e));
    }
    let mut runner = Runner {
        cfg: config,
        layout: Layout::new(root),
        previous: Manifest::load(root),
        force,
        manifest: Manifest { config: Some(config.clone()), stages: Vec::new() },
        ran: Vec::new(),
        skipped: Vec::new(),
        empty_corpus: false,
    };
    let mut error = runner.stages().err();
    if let Some(e) = &error {
        log::error!("{e}");
        if !runner.empty_corpus {
            runner.mark_stale(e.stage);
        }
    }
    if let Err(e) = write_manifest(root, &runner.manifest) {
        error.get_or_insert(e);
    }
    RunReport { manifest: runner.manifest, ran: runner.ran, skipped: runner.skipped, error }
}

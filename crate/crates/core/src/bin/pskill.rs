use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pscore_skill::eval::{generate_synthetic, write_latent, AblationConfig, RatingValue, SyntheticConfig};
use pscore_skill::perf::{CvConfig, LogisticTrainer};
use pscore_skill::pipeline::{run_pipeline, stages, PipelineConfig, PipelineError};
use pscore_skill::rating::{UpdateMode, Variant};

#[derive(Parser)]
#[command(name = "pskill", version, about = "Performance scores and skill ratings for five-a-side team games")]
struct Cli {
    /// Pipeline config (TOML). For `simulate`, the synthetic corpus config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rerun stages even when their inputs are unchanged.
    #[arg(long, global = true)]
    force: bool,
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and sort a games file.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Compute per-player features.
    Features {
        #[arg(long)]
        games: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seconds after a death within which an enemy objective makes it worthless.
        #[arg(long)]
        worthless_death_window: Option<f64>,
        #[arg(long)]
        multi_kill_window: Option<f64>,
    },
    /// Cross-validated fit of the per-role win models.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// One percentile transform per role instead of per (role, fold).
        #[arg(long)]
        pooled_transform: bool,
    },
    /// Score feature rows with a trained model directory.
    Pscore {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay games through the rating system.
    Rate {
        #[arg(long)]
        games: PathBuf,
        /// Required in ffa mode.
        #[arg(long)]
        pscores: Option<PathBuf>,
        #[arg(long)]
        mode: Option<UpdateMode>,
        #[arg(long)]
        variant: Option<VariantArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the leaderboard of a rating snapshot.
    Rank {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        top: Option<usize>,
        /// Also write it as a table file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluation reports.
    Eval {
        #[arg(value_enum)]
        report: Report,
        #[command(flatten)]
        args: EvalArgs,
    },
    /// Generate a synthetic corpus with known latent skills.
    Simulate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage, skipping those whose inputs are unchanged.
    Run {
        /// Overrides `input.games`.
        #[arg(long)]
        games: Option<PathBuf>,
        /// Overrides `input.out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Meta,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Forecast,
    Fairness,
    Ablation,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueArg {
    Theta,
    Mu,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    games: Option<PathBuf>,
    /// Directory written by `rate`.
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// PScores, needed by `ablation`.
    #[arg(long)]
    pscores: Option<PathBuf>,
    /// Latent skill table, enabling skill-recovery columns in `ablation`.
    #[arg(long)]
    latent: Option<PathBuf>,
    /// Rating value fed to the forecaster and fairness.
    #[arg(long)]
    value: Option<ValueArg>,
    #[arg(long)]
    out: PathBuf,
}

/// Config file if given, else defaults with placeholder paths.
fn load_config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::new("games.jsonl", "pskill-out"),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

fn require<'a>(v: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, PipelineError> {
    v.as_deref().ok_or_else(|| PipelineError::config(format!("--{flag} is required")))
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    match &cli.command {
        Command::Ingest { input, out, strict } => {
            let cfg = load_config(cli)?;
            let parsed = stages::ingest(input, out, *strict || cfg.input.strict)?;
            log::info!("{} games, {} warnings", parsed.games.len(), parsed.warnings.len());
        }
        Command::Features { games, out, worthless_death_window, multi_kill_window } => {
            let mut cfg = load_config(cli)?;
            if let Some(w) = worthless_death_window {
                cfg.features.worthless_death_window = *w;
            }
            if let Some(w) = multi_kill_window {
                cfg.features.multi_kill_window = *w;
            }
            cfg.validate()?;
            let rows = stages::features(games, out, &cfg.features)?;
            log::info!("{} feature rows", rows.len());
        }
        Command::Train { features, folds, out, pooled_transform } => {
            let mut cfg = load_config(cli)?;
            if let Some(k) = folds {
                cfg.model.folds = *k;
            }
            cfg.model.pooled_transform |= *pooled_transform;
            cfg.validate()?;
            let cv = CvConfig { folds: cfg.model.folds, seed: cfg.seed, pooled_transform: cfg.model.pooled_transform };
            let trainer = LogisticTrainer { config: cfg.model.fit(), ..LogisticTrainer::default() };
            let (set, _) = stages::train(features, out, &cv, &trainer)?;
            log::info!("{} models written to {}", set.models.len(), out.display());
        }
        Command::Pscore { features, models, out } => {
            let records = stages::pscore(features, models, out)?;
            log::info!("{} PScores", records.len());
        }
        Command::Rate { games, pscores, mode, variant, out } => {
            let cfg = load_config(cli)?;
            let mode = mode.unwrap_or(cfg.rating.mode);
            let variant = match variant {
                Some(VariantArg::Plain) => Variant::Plain,
                Some(VariantArg::Meta) => Variant::Meta,
                None => cfg.rating.variant,
            };
            let state = stages::rate(games, pscores.as_deref(), cfg.rating.params, mode, variant, out)?;
            log::info!("{} games, {} players rated", state.games_processed, state.players.len());
        }
        Command::Rank { snapshot, top, out } => {
            let board = stages::rank(snapshot, out.as_deref(), *top)?;
            if !cli.quiet {
                print!("{}", stages::render_leaderboard(&board));
            }
        }
        Command::Eval { report, args } => {
            let mut cfg = load_config(cli)?;
            if let Some(v) = args.value {
                cfg.eval.value = match v {
                    ValueArg::Theta => RatingValue::Theta,
                    ValueArg::Mu => RatingValue::Mu,
                };
            }
            let e = &cfg.eval;
            let summary = match report {
                Report::Forecast => {
                    let r = stages::eval_forecast(
                        require(&args.games, "games")?,
                        require(&args.ratings, "ratings")?,
                        &e.forecast,
                        e.value,
                        &args.out,
                    )?;
                    stages::render_forecast(&r)
                }
                Report::Fairness => {
                    let r = stages::eval_fairness(require(&args.ratings, "ratings")?, e.value, &args.out)?;
                    stages::render_fairness(&r)
                }
                Report::Ablation => {
                    let acfg = AblationConfig {
                        rating: cfg.rating.params,
                        forecast: e.forecast.clone(),
                        value: e.value,
                        ewma_alpha: e.ewma_alpha,
                    };
                    let latent = args.latent.as_deref().or(cfg.input.latent.as_deref());
                    let r = stages::eval_ablation(
                        require(&args.games, "games")?,
                        require(&args.pscores, "pscores")?,
                        latent,
                        &acfg,
                        &args.out,
                    )?;
                    stages::ablation_summary(&r)
                }
            };
            stages::write_text(&summary_path(&args.out), &summary, "eval")?;
            if !cli.quiet {
                print!("{summary}");
            }
        }
        Command::Simulate { out } => {
            let mut cfg = match &cli.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| PipelineError::config(format!("cannot read {}: {e}", p.display())))?;
                    toml::from_str::<SyntheticConfig>(&text).map_err(|e| PipelineError::config(e.to_string()))?
                }
                None => SyntheticConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let corpus = generate_synthetic(&cfg).map_err(|e| PipelineError::validation("simulate", e))?;
            stages::write_games_file(&out.join("games.jsonl"), &corpus.games)?;
            let mut latent = Vec::new();
            write_latent(&mut latent, &corpus.players).map_err(|e| PipelineError::failure("simulate", e))?;
            stages::write_text(&out.join("latent.tsv"), &String::from_utf8_lossy(&latent), "simulate")?;
            log::info!("{} games, {} players written to {}", corpus.games.len(), corpus.players.len(), out.display());
        }
        Command::Run { games, out } => {
            if cli.config.is_none() && games.is_none() {
                return Err(PipelineError::config("run needs --config or --games"));
            }
            let mut cfg = load_config(cli)?;
            if let Some(g) = games {
                cfg.input.games = g.clone();
            }
            if let Some(o) = out {
                cfg.input.out_dir = o.clone();
            }
            let report = run_pipeline(&cfg, cli.force);
            log::info!("ran: [{}], skipped: [{}]", report.ran.join(", "), report.skipped.join(", "));
            if let Some(e) = report.error {
                return Err(e);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

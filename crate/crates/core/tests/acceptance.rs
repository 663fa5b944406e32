//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always print; exits non-zero if any criterion fails.
//!
//! ```text
//! cargo test --release --test acceptance
//! ```

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use pscore_skill::eval::{
    ablation_report, generate_synthetic, ks_uniform, logistic_dataset, role_fairness, spearman, AblationConfig,
    RatingModel, SyntheticConfig, SyntheticCorpus, VariantReport,
};
use pscore_skill::features::{extract_corpus, FeatureConfig, FEATURE_NAMES, N_FEATURES};
use pscore_skill::ingest::{Role, Side};
use pscore_skill::perf::{
    cross_val_pscores, default_signs, expected_calibration_error, fit_win_model, CrossValidation, CvConfig, FitConfig,
    LogisticTrainer, Sign, WinModel,
};
use pscore_skill::pipeline::{run_pipeline, PipelineConfig};
use pscore_skill::rating::{
    pl_update, replay, PScoreTable, Rating, RatingConfig, RatingState, RatingTarget, UpdateMode, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Thresholds, as contracted.
const ORACLE_CASES: usize = 1000;
const ORACLE_TOL: f64 = 1e-6;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const INVARIANT_GAMES: usize = 1000;
const KS_MAX: f64 = 0.05;
const KS_MIN_PER_ROLE: usize = 2000;
const ECE_MAX: f64 = 0.02;
const ECE_MIN_ROWS: usize = 5000;
const SPEARMAN_MIN: f64 = 0.8;
const RECOVERY_BUDGET: Duration = Duration::from_secs(120);
const CONCORDANCE_GAIN_MIN: f64 = 0.10;
const INTRA_DROP_MAX: f64 = 0.02;
const FAIRNESS_W1_MAX: f64 = 1.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn pscored(cfg: &SyntheticConfig) -> (SyntheticCorpus, CrossValidation<WinModel>) {
    let corpus = generate_synthetic(cfg).expect("valid synthetic config");
    let rows = extract_corpus(&corpus.games, &FeatureConfig::default()).expect("features");
    let cv = cross_val_pscores(&rows, &CvConfig::default(), &LogisticTrainer::default()).expect("cross-validation");
    (corpus, cv)
}

fn c1_oracle() -> Verdict {
    let cfg = RatingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_CASES {
        let n = rng.random_range(2..=10);
        let mus: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..50.0)).collect();
        let sigmas: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..25.0 / 3.0)).collect();
        let ranks: Vec<u32> = (0..n).map(|_| rng.random_range(1..=n as u32)).collect();
        let entries: Vec<(Rating, u32)> = (0..n).map(|i| (Rating::new(mus[i], sigmas[i]), ranks[i])).collect();
        let got = pl_update(&entries, &cfg).expect("valid case");
        for (g, (m, s)) in got.iter().zip(common::oracle_pl(&mus, &sigmas, &ranks, cfg.beta, cfg.kappa)) {
            worst = worst.max((g.mu - m).abs()).max((g.sigma - s).abs());
        }
    }
    let took = start.elapsed();
    verdict(
        worst <= ORACLE_TOL && took < ORACLE_BUDGET,
        format!("max |err| {worst:.1e} over {ORACLE_CASES} cases in {:.2} s", took.as_secs_f64()),
    )
}

fn c2_invariants() -> Verdict {
    let (corpus, cv) = pscored(&common::churn(INVARIANT_GAMES));
    let table = PScoreTable::from_records(&cv.records);
    let cfg = RatingConfig::default();
    let mut violations = Vec::new();
    let mut resets = 0;
    let mut checked = 0;
    for mode in [UpdateMode::Ffa, UpdateMode::TeamOutcome] {
        let (_, log) = replay(&corpus.games, Some(&table), cfg, mode, Variant::Meta).expect("replay");
        let mut metas: BTreeMap<String, Rating> = BTreeMap::new();
        let mut last_ctx: BTreeMap<String, String> = BTreeMap::new();
        for (game, up) in corpus.games.iter().zip(&log) {
            checked += 1;
            let mut bad = |what: &str| violations.push(format!("{} {what}", game.game_id));
            // Pre-game meta of each context, from our own bookkeeping.
            let meta_of = |metas: &BTreeMap<String, Rating>, c: &str| metas.get(c).copied().unwrap_or(cfg.prior());
            for d in &up.deltas {
                let expected_reset = last_ctx.get(&d.player_id).is_some_and(|c| *c != d.context_id);
                if d.context_reset != expected_reset {
                    bad("reset flag disagrees with context history");
                }
                if d.context_reset {
                    resets += 1;
                    if d.contextual_before.sigma != cfg.sigma0 {
                        bad("reset did not restore sigma0");
                    }
                }
                let m = meta_of(&metas, &d.context_id);
                let c = d.contextual_before;
                if d.combined_before.mu != c.mu + m.mu || d.combined_before.sigma != (c.sigma * c.sigma + m.sigma * m.sigma).sqrt() {
                    bad("combined rating identity (before)");
                }
                if d.contextual_after.sigma > d.contextual_before.sigma {
                    bad("contextual sigma increased");
                }
            }
            match up.target {
                RatingTarget::Contextual => {
                    if !up.meta.is_empty() || !game.is_intra_context() {
                        bad("contextual update on an inter-context game");
                    }
                }
                RatingTarget::Meta => {
                    if game.is_intra_context() || up.deltas.iter().any(|d| d.contextual_after != d.contextual_before) {
                        bad("meta update touched contextual ratings");
                    }
                    for e in &up.meta {
                        if e.before != meta_of(&metas, &e.context_id) {
                            bad("meta before differs from the registry");
                        }
                        if e.after.sigma > e.before.sigma {
                            bad("meta sigma increased");
                        }
                        metas.insert(e.context_id.clone(), e.after);
                    }
                }
            }
            for d in &up.deltas {
                let m = meta_of(&metas, &d.context_id);
                let c = d.contextual_after;
                if d.combined_after.mu != c.mu + m.mu || d.combined_after.sigma != (c.sigma * c.sigma + m.sigma * m.sigma).sqrt() {
                    bad("combined rating identity (after)");
                }
                last_ctx.insert(d.player_id.clone(), d.context_id.clone());
            }
        }
    }
    let n_inter = corpus.games.iter().filter(|g| !g.is_intra_context()).count();
    verdict(
        violations.is_empty() && resets > 0 && n_inter > 0,
        format!(
            "{} violations over {checked} updates ({} games x 2 modes, {n_inter} inter-context, {resets} resets){}",
            violations.len(),
            corpus.games.len(),
            violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

fn c3_uniformity(cv: &CrossValidation<WinModel>) -> Verdict {
    let mut worst = 0.0f64;
    let mut smallest = usize::MAX;
    for role in Role::ALL {
        let s: Vec<f64> = cv.records.iter().filter(|r| r.role == role).map(|r| r.pscore).collect();
        smallest = smallest.min(s.len());
        worst = worst.max(ks_uniform(&s, 0.0, 100.0));
    }
    verdict(
        worst < KS_MAX && smallest >= KS_MIN_PER_ROLE,
        format!("max per-role KS {worst:.4} (n >= {smallest} per role)"),
    )
}

fn c4_calibration(cv: &CrossValidation<WinModel>) -> Verdict {
    // Well-specified: labels drawn from a logistic model whose weights obey
    // the same sign constraints as the fitted one.
    let signs = default_signs();
    let weights: Vec<f64> = (0..N_FEATURES)
        .map(|j| {
            let w = 0.15 + 0.05 * (j % 4) as f64;
            if signs[j] == Sign::Negative { -w } else { w }
        })
        .collect();
    let (x_train, y_train) = logistic_dataset(20_000, &weights, 0.1, 41);
    let (x_test, y_test) = logistic_dataset(ECE_MIN_ROWS * 4, &weights, 0.1, 42);
    let model = fit_win_model(Role::Mid, &x_train, &y_train, &FEATURE_NAMES, &signs, &FitConfig::default()).expect("fit");
    let probs: Vec<f64> = x_test.iter().map(|r| model.predict(r).expect("predict")).collect();
    let ece = expected_calibration_error(&probs, &y_test, 10).expect("ece");
    let all_signed = model.respects_signs() && cv.models.models.iter().all(|m| m.model.respects_signs());
    verdict(
        ece <= ECE_MAX && all_signed && x_test.len() >= ECE_MIN_ROWS,
        format!(
            "ECE {:.4} on {} held-out rows; {} fitted models respect their signs: {all_signed}",
            ece,
            x_test.len(),
            cv.models.models.len() + 1
        ),
    )
}

fn c5_recovery(corpus: &SyntheticCorpus, cv: &CrossValidation<WinModel>, started: Instant) -> Verdict {
    let table = PScoreTable::from_records(&cv.records);
    let (state, _) =
        replay(&corpus.games, Some(&table), RatingConfig::default(), UpdateMode::Ffa, Variant::Plain).expect("replay");
    let (est, truth): (Vec<f64>, Vec<f64>) = corpus
        .players
        .iter()
        .filter_map(|p| state.combined(&p.player_id).ok().map(|c| (c.theta, p.skill)))
        .unzip();
    let rho = spearman(&est, &truth).unwrap_or(f64::NAN);
    let took = started.elapsed();
    verdict(
        rho >= SPEARMAN_MIN && took < RECOVERY_BUDGET,
        format!(
            "Spearman {rho:.3} over {} players, {} games, end to end in {:.1} s",
            est.len(),
            corpus.games.len(),
            took.as_secs_f64()
        ),
    )
}

fn report(reports: &[VariantReport], mode: UpdateMode, variant: Variant) -> &VariantReport {
    let model = RatingModel::Bayesian { mode, variant };
    reports.iter().find(|r| r.model == model).expect("model evaluated")
}

fn c6_isolated_pools(reports: &[VariantReport]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for mode in [UpdateMode::Ffa, UpdateMode::TeamOutcome] {
        let plain = report(reports, mode, Variant::Plain);
        let meta = report(reports, mode, Variant::Meta);
        let gain = meta.cross_context_concordance.unwrap_or(f64::NAN) - plain.cross_context_concordance.unwrap_or(f64::NAN);
        let inter = meta.forecast.inter.accuracy.unwrap_or(f64::NAN) - plain.forecast.inter.accuracy.unwrap_or(f64::NAN);
        let intra = meta.forecast.intra.accuracy.unwrap_or(f64::NAN) - plain.forecast.intra.accuracy.unwrap_or(f64::NAN);
        pass &= gain >= CONCORDANCE_GAIN_MIN && inter > 0.0 && intra > -INTRA_DROP_MAX;
        parts.push(format!(
            "{} vs {}: cross-context concordance {:+.1} pts, inter acc {:+.1}, intra acc {:+.2}",
            meta.name,
            plain.name,
            100.0 * gain,
            100.0 * inter,
            100.0 * intra
        ));
    }
    verdict(pass, parts.join("; "))
}

fn c7_baseline(reports: &[VariantReport]) -> Verdict {
    let acc = |r: &VariantReport| r.forecast.all.accuracy.unwrap_or(f64::NAN);
    let ewma = reports.iter().find(|r| r.model == RatingModel::Ewma).expect("EWMA evaluated");
    let bayes: Vec<&VariantReport> = reports.iter().filter(|r| r.model.is_bayesian()).collect();
    let worst = bayes.iter().map(|r| acc(r)).fold(f64::INFINITY, f64::min);
    verdict(
        worst >= acc(ewma),
        format!(
            "EWMA {:.2}%; {}",
            100.0 * acc(ewma),
            bayes.iter().map(|r| format!("{} {:.2}%", r.name, 100.0 * acc(r))).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c8_fairness() -> Verdict {
    let (corpus, cv) = pscored(&common::role_symmetric());
    let table = PScoreTable::from_records(&cv.records);
    let (state, _) =
        replay(&corpus.games, Some(&table), RatingConfig::default(), UpdateMode::Ffa, Variant::Meta).expect("replay");
    let mut by_role: BTreeMap<Role, Vec<f64>> = BTreeMap::new();
    for p in state.players.values() {
        if let (Some(role), Ok(c)) = (p.main_role(), state.combined(&p.player_id)) {
            by_role.entry(role).or_default().push(c.theta);
        }
    }
    let r = role_fairness(&by_role).expect("five roles");
    verdict(
        r.mean_distance < FAIRNESS_W1_MAX,
        format!(
            "mean pairwise W1 {:.3} (max pair {:.3}) over {} players",
            r.mean_distance,
            r.pairs.iter().map(|p| p.distance).fold(0.0, f64::max),
            state.players.len()
        ),
    )
}

fn c9_ffa_semantics() -> Verdict {
    let roster = [
        ("b0", "A"),
        ("b1", "A"),
        ("b2", "A"),
        ("b3", "A"),
        ("b4", "A"),
        ("r0", "A"),
        ("r1", "A"),
        ("r2", "A"),
        ("r3", "A"),
        ("r4", "A"),
    ];
    let game = common::game("g1", "2024-01-01T00:00:00Z", &roster, Side::Blue);
    // r2 is on the losing side with the best score.
    let scores = [60.0, 50.0, 40.0, 30.0, 20.0, 55.0, 45.0, 99.0, 35.0, 25.0];
    let mut parts = Vec::new();
    let mut pass = true;
    for variant in [Variant::Plain, Variant::Meta] {
        let cfg = RatingConfig::default();
        let mut state = RatingState::new(cfg, UpdateMode::Ffa, variant);
        let up = state.process_game(&game, Some(&scores)).expect("update");
        let d = up.delta("r2").expect("r2 played");
        pass &= d.contextual_after.mu > d.contextual_before.mu;
        parts.push(format!("{variant:?}: mu {:.3} -> {:.3}", d.contextual_before.mu, d.contextual_after.mu));
    }
    verdict(pass, format!("losing top scorer {}", parts.join(", ")))
}

fn c10_determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = SyntheticConfig {
        n_players: 80,
        n_contexts: 2,
        context_offsets: vec![1.0, -1.0],
        inter_context_rate: 0.05,
        games_per_step: 3,
        steps: 420,
        seed: 17,
        ..Default::default()
    };
    let corpus = generate_synthetic(&cfg).expect("corpus");
    let games = dir.path().join("games.jsonl");
    pscore_skill::ingest::write_games(std::fs::File::create(&games).expect("create"), &corpus.games).expect("write");
    let run = |out: &str| {
        let mut pc = PipelineConfig::new(&games, dir.path().join(out));
        pc.seed = 5;
        let r = run_pipeline(&pc, false);
        (r.error.map(|e| e.to_string()), r.manifest.stages)
    };
    let (e1, a) = run("run1");
    let (e2, b) = run("run2");
    let files: usize = a.iter().map(|s| s.outputs.len()).sum();
    verdict(
        e1.is_none() && e2.is_none() && a == b && files > 0,
        format!("{} stages, {files} artifacts; identical hashes: {}", a.len(), a == b),
    )
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut record = |name, v: Verdict| {
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((name, v));
    };

    record("1 rating core vs oracle", c1_oracle());
    record("2 update invariants", c2_invariants());

    let single_start = Instant::now();
    let (single, single_cv) = pscored(&common::single_context());
    record("3 PScore uniformity", c3_uniformity(&single_cv));
    record("4 calibration and monotonicity", c4_calibration(&single_cv));
    record("5 skill recovery", c5_recovery(&single, &single_cv, single_start));

    let (multi, multi_cv) = pscored(&common::multi_context());
    let table = PScoreTable::from_records(&multi_cv.records);
    let reports = ablation_report(
        &multi.games,
        &table,
        Some(&multi.players),
        &pscore_skill::eval::default_models(),
        &AblationConfig::default(),
    )
    .expect("ablation");
    record("6 isolated-pool fix", c6_isolated_pools(&reports));
    record("7 Bayesian >= EWMA", c7_baseline(&reports));

    record("8 role fairness", c8_fairness());
    record("9 FFA semantics", c9_ffa_semantics());
    record("10 pipeline determinism", c10_determinism());

    let failed = results.iter().filter(|(_, v)| !v.pass).count();
    println!(
        "{} of {} criteria pass ({:.1} s)",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

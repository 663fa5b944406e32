//! Out-of-fold PScores: fit one sign-constrained win model per (role, fold),
//! map predictions to percentiles, and check they come out uniform.

use pscore_skill::eval::{generate_synthetic, ks_uniform, SyntheticConfig};
use pscore_skill::features::{extract_corpus, FeatureConfig};
use pscore_skill::ingest::Role;
use pscore_skill::perf::{accuracy, cross_val_pscores, expected_calibration_error, CvConfig, LogisticTrainer};

fn main() {
    let corpus = generate_synthetic(&SyntheticConfig { n_players: 150, steps: 300, seed: 8, ..Default::default() })
        .expect("valid config");
    let rows = extract_corpus(&corpus.games, &FeatureConfig::default()).unwrap();
    let cv = cross_val_pscores(&rows, &CvConfig::default(), &LogisticTrainer::default()).unwrap();

    println!("{:<8} {:>6} {:>8} {:>8} {:>8}", "role", "n", "acc", "ece", "ks");
    for role in Role::ALL {
        let recs: Vec<_> = cv.records.iter().filter(|r| r.role == role).collect();
        let probs: Vec<f64> = recs.iter().map(|r| r.win_prob).collect();
        let labels: Vec<bool> = rows.iter().filter(|r| r.role == role).map(|r| r.win).collect();
        let scores: Vec<f64> = recs.iter().map(|r| r.pscore).collect();
        println!(
            "{:<8} {:>6} {:>8.3} {:>8.4} {:>8.4}",
            role,
            recs.len(),
            accuracy(&probs, &labels),
            expected_calibration_error(&probs, &labels, 10).unwrap(),
            ks_uniform(&scores, 0.0, 100.0)
        );
    }

    let mid = &cv.models.get(Role::Mid, 0).unwrap().model;
    println!("\nMid, fold 0 weights (standardized features):");
    // Zero weights are features the sign constraint switched off (or that
    // had no variance in this role).
    for name in pscore_skill::features::FEATURE_NAMES {
        println!("  {name:<32} {:+.3}", mid.weight(name).unwrap());
    }

    // Why did the best Mid game of the corpus score so high?
    let best = cv.records.iter().filter(|r| r.role == Role::Mid).max_by(|a, b| a.pscore.total_cmp(&b.pscore)).unwrap();
    let row = rows.iter().find(|r| r.game_id == best.game_id && r.player_id == best.player_id).unwrap();
    let model = &cv.models.get(Role::Mid, best.fold).unwrap().model;
    let mut parts = model.attribute(&row.values).unwrap();
    parts.sort_by(|a, b| b.contribution.abs().total_cmp(&a.contribution.abs()));
    println!("\n{} in {}: PScore {:.1}, top contributions to the logit:", best.player_id, best.game_id, best.pscore);
    for c in parts.iter().take(4) {
        println!("  {:<32} {:+.3}", c.feature, c.contribution);
    }
}

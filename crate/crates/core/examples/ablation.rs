//! Every rating model on the same corpus: team-outcome vs free-for-all
//! updates, with and without meta ratings, and an EWMA of PScores.
//!
//! Columns are percentages: forecast accuracy overall / intra-region /
//! inter-region, calibration error, mean role W1 (rating points), Spearman
//! against latent skill, and how often cross-region player pairs are
//! ordered like their latent skill.

use pscore_skill::eval::{ablation_report, default_models, generate_synthetic, render_table, AblationConfig, SyntheticConfig};
use pscore_skill::features::{extract_corpus, FeatureConfig};
use pscore_skill::perf::{cross_val_pscores, CvConfig, LogisticTrainer};
use pscore_skill::rating::PScoreTable;

fn main() {
    let syn = SyntheticConfig {
        n_players: 200,
        n_contexts: 3,
        context_offsets: vec![2.0, 0.0, -2.0],
        games_per_step: 10,
        steps: 600,
        inter_context_rate: 0.02,
        seed: 21,
        ..Default::default()
    };
    let corpus = generate_synthetic(&syn).unwrap();
    let rows = extract_corpus(&corpus.games, &FeatureConfig::default()).unwrap();
    let cv = cross_val_pscores(&rows, &CvConfig::default(), &LogisticTrainer::default()).unwrap();
    let table = PScoreTable::from_records(&cv.records);

    let reports =
        ablation_report(&corpus.games, &table, Some(&corpus.players), &default_models(), &AblationConfig::default()).unwrap();
    print!("{}", render_table(&reports));
}

//! Are the roles rated on one scale? Mean pairwise 1-D Wasserstein distance
//! between the per-role distributions of final ratings, for team-outcome and
//! free-for-all updates, on data where every role has the same skill
//! distribution.

use pscore_skill::eval::{generate_synthetic, SyntheticConfig};
use pscore_skill::features::{extract_corpus, FeatureConfig};
use pscore_skill::perf::{cross_val_pscores, CvConfig, LogisticTrainer};
use pscore_skill::pipeline::stages::{final_values_by_role, render_fairness};
use pscore_skill::rating::{replay, PScoreTable, RatingConfig, UpdateMode, Variant};
use pscore_skill::eval::{role_fairness, wasserstein_1d, RatingValue};

fn main() {
    println!("W1([0, 1], [1, 2]) = {}", wasserstein_1d(&[0.0, 1.0], &[1.0, 2.0]).unwrap());
    println!("W1([0, 1, 2], [0, 0]) = {}\n", wasserstein_1d(&[0.0, 1.0, 2.0], &[0.0, 0.0]).unwrap());

    let syn = SyntheticConfig { n_players: 1000, role_symmetric: true, games_per_step: 20, steps: 400, seed: 3, ..Default::default() };
    let corpus = generate_synthetic(&syn).unwrap();
    let rows = extract_corpus(&corpus.games, &FeatureConfig::default()).unwrap();
    let cv = cross_val_pscores(&rows, &CvConfig::default(), &LogisticTrainer::default()).unwrap();
    let table = PScoreTable::from_records(&cv.records);

    for mode in [UpdateMode::TeamOutcome, UpdateMode::Ffa] {
        let (state, _) = replay(&corpus.games, Some(&table), RatingConfig::default(), mode, Variant::Plain).unwrap();
        let report = role_fairness(&final_values_by_role(&state, RatingValue::Theta)).unwrap();
        println!("{mode} updates, {} players:\n{}", state.players.len(), render_fairness(&report));
    }
}

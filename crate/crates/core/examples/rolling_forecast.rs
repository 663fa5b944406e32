//! Rolling-window outcome forecasts from pre-game ratings: fit on a year,
//! test on the next month, slide by a month.
//!
//! The leakage sentinel repeats the evaluation with ratings read *after*
//! each game. Those ratings have seen the result, so accuracy should jump;
//! if it does not, the pre-game ratings were leaking.

use pscore_skill::eval::{
    ewma_pre_game, generate_synthetic, leakage_sentinel, pre_game_ratings, rolling_forecast_eval, ForecastConfig,
    ForecastFeatures, RatingValue, SyntheticConfig,
};
use pscore_skill::features::{extract_corpus, FeatureConfig};
use pscore_skill::perf::{cross_val_pscores, CvConfig, LogisticTrainer};
use pscore_skill::pipeline::stages::render_forecast;
use pscore_skill::rating::{replay, PScoreTable, RatingConfig, UpdateMode, Variant};

fn main() {
    let syn = SyntheticConfig { n_players: 120, games_per_step: 4, steps: 600, seed: 12, ..Default::default() };
    let corpus = generate_synthetic(&syn).unwrap();
    let rows = extract_corpus(&corpus.games, &FeatureConfig::default()).unwrap();
    let cv = cross_val_pscores(&rows, &CvConfig::default(), &LogisticTrainer::default()).unwrap();
    let table = PScoreTable::from_records(&cv.records);

    let (_, log) = replay(&corpus.games, Some(&table), RatingConfig::default(), UpdateMode::Ffa, Variant::Meta).unwrap();
    let pre = pre_game_ratings(&corpus.games, &log, RatingValue::Theta).unwrap();

    let cfg = ForecastConfig::default();
    let report = rolling_forecast_eval(&pre, &cfg).unwrap();
    println!("per-role theta differences:\n{}", render_forecast(&report));

    let mean_only = ForecastConfig { features: ForecastFeatures::MeanDiff, ..cfg.clone() };
    let pooled = rolling_forecast_eval(&pre, &mean_only).unwrap().pooled;
    println!("mean theta difference only: {:.2}% pooled", 100.0 * pooled.all.accuracy.unwrap());

    let ewma = ewma_pre_game(&corpus.games, &table, 0.05).unwrap();
    let pooled = rolling_forecast_eval(&ewma, &cfg).unwrap().pooled;
    println!("EWMA of PScores:            {:.2}% pooled", 100.0 * pooled.all.accuracy.unwrap());

    let (before, after) = leakage_sentinel(&pre, &cfg).unwrap();
    println!("\nleakage sentinel: {:.2}% with pre-game ratings, {:.2}% with post-game ratings", 100.0 * before, 100.0 * after);
}

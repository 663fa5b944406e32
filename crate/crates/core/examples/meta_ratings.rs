//! Isolated rating pools. Three regions of different average strength that
//! rarely meet: plain ratings put every region on the same scale, while
//! contextual + meta ratings learn the gap from the few cross-region games.

use std::collections::BTreeMap;

use pscore_skill::eval::{cross_group_concordance, generate_synthetic, SyntheticConfig};
use pscore_skill::features::{extract_corpus, FeatureConfig};
use pscore_skill::perf::{cross_val_pscores, CvConfig, LogisticTrainer};
use pscore_skill::rating::{replay, PScoreTable, RatingConfig, UpdateMode, Variant};

fn main() {
    let syn = SyntheticConfig {
        n_players: 150,
        n_contexts: 3,
        context_offsets: vec![2.0, 0.0, -2.0],
        games_per_step: 10,
        steps: 400,
        inter_context_rate: 0.02,
        seed: 5,
        ..Default::default()
    };
    let corpus = generate_synthetic(&syn).unwrap();
    let rows = extract_corpus(&corpus.games, &FeatureConfig::default()).unwrap();
    let cv = cross_val_pscores(&rows, &CvConfig::default(), &LogisticTrainer::default()).unwrap();
    let table = PScoreTable::from_records(&cv.records);
    let inter = corpus.games.iter().filter(|g| !g.is_intra_context()).count();
    println!("{} games, {inter} between regions\n", corpus.games.len());

    for variant in [Variant::Plain, Variant::Meta] {
        let (state, _) = replay(&corpus.games, Some(&table), RatingConfig::default(), UpdateMode::Ffa, variant).unwrap();
        let mut per_region: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        let (mut est, mut truth, mut group) = (Vec::new(), Vec::new(), Vec::new());
        for p in &corpus.players {
            let theta = state.combined(&p.player_id).unwrap().theta;
            per_region.entry(&p.context_id).or_default().push(theta);
            est.push(theta);
            truth.push(p.skill);
            group.push(p.context_id.as_str());
        }
        println!("{variant:?}");
        for (region, v) in &per_region {
            let meta = state.registry.get(region).map(|m| format!("meta mu {:.2}", m.mu)).unwrap_or_default();
            println!("  {region}: mean theta {:>7.2}  {meta}", v.iter().sum::<f64>() / v.len() as f64);
        }
        let c = cross_group_concordance(&est, &truth, &group).unwrap();
        println!("  cross-region pairs ordered like true skill: {:.1}%\n", 100.0 * c);
    }
}

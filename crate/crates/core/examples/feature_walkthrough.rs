//! The fifteen performance features of every player in one game.

use pscore_skill::eval::{generate_synthetic, SyntheticConfig};
use pscore_skill::features::{extract_features, FeatureConfig, FEATURE_NAMES};

fn main() {
    let corpus = generate_synthetic(&SyntheticConfig { n_players: 10, steps: 1, games_per_step: 1, seed: 3, ..Default::default() })
        .expect("valid config");
    let game = &corpus.games[0];
    println!("game {} ({:.0} s, {} events)", game.game_id, game.duration, game.events.len());

    let players = extract_features(game, &FeatureConfig::default()).expect("valid game");
    print!("{:<32}", "feature");
    for p in &players {
        print!("{:>11}", format!("{}/{}", p.side.as_str().chars().next().unwrap(), p.role));
    }
    println!();
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        print!("{name:<32}");
        for p in &players {
            print!("{:>11.3}", p.features.to_array()[j]);
        }
        println!();
    }
    let winners: Vec<&str> = players.iter().filter(|p| p.won).map(|p| p.player_id.as_str()).collect();
    println!("winners: {}", winners.join(", "));
}

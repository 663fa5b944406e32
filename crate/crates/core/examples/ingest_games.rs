//! Parse a games file, show what validation reports, and write the sorted
//! result back out.
//!
//! ```text
//! cargo run --example ingest_games
//! ```

use pscore_skill::eval::{generate_synthetic, SyntheticConfig};
use pscore_skill::ingest::{parse_games_str, write_games, ParseOptions, Side};

fn main() {
    let corpus = generate_synthetic(&SyntheticConfig { n_players: 20, steps: 3, games_per_step: 2, ..Default::default() })
        .expect("valid config");
    let mut games = corpus.games;

    // Break one game's bookkeeping: the kill count no longer matches its events.
    games[1].lines[0].kills += 1;
    // Feed them in reverse order; ingest sorts by (timestamp, game_id).
    games.reverse();

    let mut text = Vec::new();
    write_games(&mut text, &games).unwrap();
    let text = String::from_utf8(text).unwrap();

    let parsed = parse_games_str(&text, ParseOptions::default()).expect("lenient parse succeeds");
    println!("{} games parsed", parsed.games.len());
    for g in &parsed.games {
        let blue_won = g.winner == Side::Blue;
        println!("  {}  {}  blue won: {blue_won}  kills: {}", g.game_id, g.timestamp, g.total_kills());
    }
    for w in &parsed.warnings {
        println!("warning, line {} ({}): {}", w.line, w.game_id, w.warning);
    }

    match parse_games_str(&text, ParseOptions { strict: true }) {
        Ok(_) => println!("strict parse succeeded"),
        Err(e) => println!("strict parse rejects the file: {e}"),
    }

    let broken = text.replacen("\"winner\":\"BLUE\"", "\"winner\":\"PURPLE\"", 1);
    if let Err(e) = parse_games_str(&broken, ParseOptions::default()) {
        println!("malformed record: {e}");
    }
}

//! One game rated two ways: by team outcome, and as a free-for-all ranked by
//! PScore. In the free-for-all a strong player on the losing side still
//! gains.

use pscore_skill::ingest::Side;
use pscore_skill::rating::{ffa_update, ranks_from_scores, team_update, Rating, RatingConfig};

fn main() {
    let cfg = RatingConfig::default();
    let ratings = vec![cfg.prior(); 10];
    let sides: Vec<Side> = (0..10).map(|i| if i < 5 { Side::Blue } else { Side::Red }).collect();
    let pscores = [62.0, 48.0, 71.0, 30.0, 55.0, 93.0, 12.0, 40.0, 25.0, 66.0];

    let by_team = team_update(&ratings, &sides, Side::Blue, &cfg).unwrap();
    let by_score = ffa_update(&ratings, &pscores, &cfg).unwrap();
    let ranks = ranks_from_scores(&pscores, cfg.tie_epsilon).unwrap();

    println!("Blue wins. Everyone starts at mu {:.2}, sigma {:.3}.\n", cfg.mu0, cfg.sigma0);
    println!("{:<4} {:>6} {:>5} {:>11} {:>11}", "side", "pscore", "rank", "team mu", "ffa mu");
    for i in 0..10 {
        println!(
            "{:<4} {:>6.1} {:>5} {:>+11.3} {:>+11.3}",
            sides[i].as_str(),
            pscores[i],
            ranks[i],
            by_team[i].mu - cfg.mu0,
            by_score[i].mu - cfg.mu0
        );
    }
    let theta = |r: &Rating| r.theta();
    println!("\nred's top scorer: theta {:.2} -> {:.2}", theta(&ratings[5]), theta(&by_score[5]));
}

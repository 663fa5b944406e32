//! Shared helpers: an independent Plackett-Luce oracle, game fixtures and
//! the synthetic corpora the acceptance checks run on.

#![allow(dead_code)]

use pscore_skill::eval::SyntheticConfig;
use pscore_skill::ingest::{GameRecord, PlayerLine, Role, Side};

/// Weng-Lin Plackett-Luce for one-player teams, written straight from the
/// published update rules with no shared code. Returns `(mu, sigma)`.
pub fn oracle_pl(mus: &[f64], sigmas: &[f64], ranks: &[u32], beta: f64, kappa: f64) -> Vec<(f64, f64)> {
    let n = mus.len();
    let c = sigmas.iter().map(|s| s * s + beta * beta).sum::<f64>().sqrt();
    let e: Vec<f64> = mus.iter().map(|m| (m / c).exp()).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = sigmas[i] * sigmas[i];
        let (mut omega, mut delta) = (0.0, 0.0);
        for q in 0..n {
            if ranks[q] > ranks[i] {
                continue;
            }
            let denom: f64 = (0..n).filter(|&t| ranks[t] >= ranks[q]).map(|t| e[t]).sum();
            let tied = ranks.iter().filter(|&&r| r == ranks[q]).count() as f64;
            let p = e[i] / denom;
            let indicator = if q == i { 1.0 } else { 0.0 };
            omega += (indicator - p) / tied;
            delta += p * (1.0 - p) / tied;
        }
        let omega = v / c * omega;
        let gamma = v.sqrt() / c;
        let delta = gamma * v / (c * c) * delta;
        let mu = mus[i] + omega;
        let sigma = sigmas[i] * (1.0 - delta).max(kappa).sqrt();
        out.push((mu, sigma));
    }
    out
}

/// A valid game with flat stats. `players` lists `(player_id, context_id)`,
/// BLUE first, in role order.
pub fn game(id: &str, ts: &str, players: &[(&str, &str); 10], winner: Side) -> GameRecord {
    let lines = players
        .iter()
        .enumerate()
        .map(|(i, (pid, ctx))| PlayerLine {
            player_id: pid.to_string(),
            side: if i < 5 { Side::Blue } else { Side::Red },
            role: Role::ALL[i % 5],
            context_id: ctx.to_string(),
            kills: 0,
            deaths: 0,
            assists: 0,
            gold: 10_000.0,
            experience: 12_000.0,
            creep_score: 200.0,
            wards_placed: 10.0,
            damage_dealt_to_players: 15_000.0,
            damage_taken_from_players: 15_000.0,
        })
        .collect();
    GameRecord {
        game_id: id.to_string(),
        timestamp: ts.parse().expect("timestamp"),
        duration: 1800.0,
        competition_id: "TEST".to_string(),
        is_inter_context_event: players.iter().any(|p| p.1 != players[0].1),
        winner,
        lines,
        events: Vec::new(),
    }
}

/// Single context, 200 players, 2,000 games.
pub fn single_context() -> SyntheticConfig {
    SyntheticConfig { n_players: 200, games_per_step: 5, steps: 400, seed: 1, ..Default::default() }
}

/// Three contexts with offset mean skill and 2% inter-context games.
pub fn multi_context() -> SyntheticConfig {
    SyntheticConfig {
        n_players: 300,
        n_contexts: 3,
        context_offsets: vec![2.0, 0.0, -2.0],
        games_per_step: 20,
        steps: 600,
        inter_context_rate: 0.02,
        seed: 2,
        ..Default::default()
    }
}

/// Identical skill distribution in every role.
pub fn role_symmetric() -> SyntheticConfig {
    SyntheticConfig { n_players: 2000, role_symmetric: true, games_per_step: 40, steps: 400, seed: 3, ..Default::default() }
}

/// Small multi-context corpus with transfers, for invariant checks.
pub fn churn(games: usize) -> SyntheticConfig {
    SyntheticConfig {
        n_players: 120,
        n_contexts: 3,
        context_offsets: vec![1.0, 0.0, -1.0],
        games_per_step: 5,
        steps: games / 5,
        inter_context_rate: 0.1,
        transfer_rate: 0.2,
        seed: 11,
        ..Default::default()
    }
}

use serde::{Deserialize, Serialize};

use super::RatingState;
use crate::ingest::Role;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub player_id: String,
    pub context_id: String,
    pub role: Option<Role>,
    pub mu: f64,
    pub sigma: f64,
    pub theta: f64,
    pub games_played: u64,
}

/// All players by combined lower bound, best first; equal bounds fall back
/// to player id.
pub fn rank_players(state: &RatingState) -> Vec<LeaderboardEntry> {
    let mut entries: Vec<LeaderboardEntry> = state
        .players
        .values()
        .map(|p| {
            let c = state.combined(&p.player_id).expect("player is in state");
            LeaderboardEntry {
                rank: 0,
                player_id: p.player_id.clone(),
                context_id: p.context_id.clone(),
                role: p.main_role(),
                mu: c.mu,
                sigma: c.sigma,
                theta: c.theta,
                games_played: p.games_played,
            }
        })
        .collect();
    entries.sort_by(|a, b| b.theta.total_cmp(&a.theta).then_with(|| a.player_id.cmp(&b.player_id)));
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    entries
}

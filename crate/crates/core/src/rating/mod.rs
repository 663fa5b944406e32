//! Skill ratings: the Plackett-Luce core, the free-for-all adapter, the
//! contextual/meta rating system, leaderboards and the EWMA baseline.

mod ewma;
pub mod io;
mod leaderboard;
mod pl;
mod system;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ewma::{ewma_update, EwmaTracker, EWMA_ALPHA};
pub use leaderboard::{rank_players, LeaderboardEntry};
pub use pl::{ffa_update, pl_update, ranks_from_scores, rate_teams, team_update};
pub use system::{
    meta_update, replay, ContextRegistry, GameOutcome, GameUpdate, MetaEntry, PScoreTable, PlayerDelta,
    PlayerRatingState, RatingState, RatingTarget, UpdateMode, Variant,
};

#[derive(Debug, Error, PartialEq)]
pub enum RatingError {
    #[error("a rating update needs at least 2 entries, got {0}")]
    TooFewEntries(usize),
    #[error("{teams} teams but {ranks} ranks")]
    RankCount { teams: usize, ranks: usize },
    #[error("ranks start at 1")]
    ZeroRank,
    #[error("empty team")]
    EmptyTeam,
    #[error("non-finite rating or score")]
    NonFinite,
    #[error("sigma must be > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("{ratings} ratings but {pscores} scores")]
    PScoreCount { ratings: usize, pscores: usize },
    #[error("game `{game_id}`: no PScore for player `{player_id}`")]
    MissingPScore { game_id: String, player_id: String },
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("meta update needs players from at least 2 contexts")]
    SingleContext,
}

/// Gaussian skill belief.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub mu: f64,
    pub sigma: f64,
}

impl Rating {
    pub const fn new(mu: f64, sigma: f64) -> Self {
        Rating { mu, sigma }
    }

    /// Conservative estimate `mu - 3 sigma`.
    pub fn theta(&self) -> f64 {
        self.mu - 3.0 * self.sigma
    }

    pub fn validate(&self) -> Result<(), RatingError> {
        if !(self.mu.is_finite() && self.sigma.is_finite()) {
            return Err(RatingError::NonFinite);
        }
        if self.sigma <= 0.0 {
            return Err(RatingError::NonPositiveSigma(self.sigma));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RatingConfig {
    pub mu0: f64,
    pub sigma0: f64,
    /// Performance noise of one player.
    pub beta: f64,
    /// Floor on the multiplicative variance shrink factor.
    pub kappa: f64,
    /// Scores closer than this tie.
    pub tie_epsilon: f64,
}

impl Default for RatingConfig {
    fn default() -> Self {
        RatingConfig { mu0: 25.0, sigma0: 25.0 / 3.0, beta: 25.0 / 6.0, kappa: 1e-4, tie_epsilon: 1e-9 }
    }
}

impl RatingConfig {
    pub fn prior(&self) -> Rating {
        Rating::new(self.mu0, self.sigma0)
    }
}

/// Sum of a contextual and a meta rating (or a lone rating in the plain
/// variant), with its lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedRating {
    pub mu: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl CombinedRating {
    pub fn from_parts(contextual: Rating, meta: Rating) -> Self {
        let mu = contextual.mu + meta.mu;
        let sigma = (contextual.sigma * contextual.sigma + meta.sigma * meta.sigma).sqrt();
        CombinedRating { mu, sigma, theta: mu - 3.0 * sigma }
    }

    pub fn single(rating: Rating) -> Self {
        CombinedRating { mu: rating.mu, sigma: rating.sigma, theta: rating.theta() }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Probability that `a`'s skill exceeds `b`'s.
pub fn win_prob_pair(a: &CombinedRating, b: &CombinedRating) -> f64 {
    let spread = (a.sigma * a.sigma + b.sigma * b.sigma).sqrt();
    let diff = a.mu - b.mu;
    if spread == 0.0 {
        return if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            0.0
        } else {
            0.5
        };
    }
    normal_cdf(diff / spread)
}

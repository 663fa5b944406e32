//! Player performance scores and skill ratings for five-a-side team games.
//!
//! The pipeline has two halves:
//!
//! 1. **Performance.** [`features`] turns each player's end-game statistics
//!    into fifteen features. [`perf`] fits one monotone win-probability model
//!    per role and maps every predicted probability to a percentile, the
//!    *PScore* in `[0, 100]`.
//! 2. **Skill.** [`rating`] ranks the ten players of a game by PScore and
//!    applies a Plackett-Luce Bayesian update as if the game were a
//!    free-for-all. Each player carries a contextual rating (relative to
//!    their region) and shares a meta rating with their region; inter-region
//!    games update only the meta ratings.
//!
//! [`eval`] holds the evaluation harness (rolling outcome forecasts,
//! calibration, cross-role fairness) and a synthetic corpus generator with
//! known latent skills. [`pipeline`] wires all stages together with a
//! content-hashed manifest.
//!
//! See the crate's `examples/` directory for one runnable program per
//! capability.

pub mod eval;
pub mod features;
pub mod ingest;
pub mod perf;
pub mod pipeline;
pub mod rating;

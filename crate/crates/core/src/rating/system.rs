//! Stateful rating system: per-player contextual ratings, per-context meta
//! ratings, and the dispatch between them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::pl::{ffa_update, team_update};
use super::{CombinedRating, Rating, RatingConfig, RatingError};
use crate::ingest::{GameRecord, Role, Side};
use crate::perf::PScoreRecord;

/// How the ten players of a game are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    /// Ten singleton teams ranked by PScore.
    Ffa,
    /// Two teams by side, winners ahead of losers.
    #[serde(rename = "team")]
    TeamOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// One rating per player, no contexts.
    Plain,
    /// Contextual rating per player plus a shared meta rating per context.
    Meta,
}

impl std::str::FromStr for UpdateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ffa" => Ok(UpdateMode::Ffa),
            "team" => Ok(UpdateMode::TeamOutcome),
            other => Err(format!("unknown mode `{other}` (expected ffa or team)")),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Variant::Plain),
            "meta" => Ok(Variant::Meta),
            other => Err(format!("unknown variant `{other}` (expected plain or meta)")),
        }
    }
}

impl std::fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UpdateMode::Ffa => "ffa",
            UpdateMode::TeamOutcome => "team",
        })
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Plain => "plain",
            Variant::Meta => "meta",
        })
    }
}

/// Which ratings a game changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatingTarget {
    Contextual,
    Meta,
}

impl RatingTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            RatingTarget::Contextual => "contextual",
            RatingTarget::Meta => "meta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerRatingState {
    pub player_id: String,
    pub contextual: Rating,
    pub context_id: String,
    pub games_played: u64,
    /// Games per role, in `Role::ALL` order.
    pub role_counts: [u64; 5],
}

impl PlayerRatingState {
    pub fn new(player_id: &str, context_id: &str, config: &RatingConfig) -> Self {
        PlayerRatingState {
            player_id: player_id.to_string(),
            contextual: config.prior(),
            context_id: context_id.to_string(),
            games_played: 0,
            role_counts: [0; 5],
        }
    }

    /// Most played role; ties go to the earlier role.
    pub fn main_role(&self) -> Option<Role> {
        let best = *self.role_counts.iter().max()?;
        (best > 0).then(|| Role::ALL[self.role_counts.iter().position(|&c| c == best).expect("max exists")])
    }
}

/// Meta rating per context.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextRegistry {
    metas: BTreeMap<String, Rating>,
}

impl ContextRegistry {
    pub fn get(&self, context_id: &str) -> Option<Rating> {
        self.metas.get(context_id).copied()
    }

    /// Meta rating of a context, registering it at the prior if unseen.
    pub fn get_or_init(&mut self, context_id: &str, config: &RatingConfig) -> Rating {
        *self.metas.entry(context_id.to_string()).or_insert_with(|| config.prior())
    }

    pub fn set(&mut self, context_id: &str, rating: Rating) {
        self.metas.insert(context_id.to_string(), rating);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rating)> {
        self.metas.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.metas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metas.is_empty()
    }
}

/// What one game did to one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerDelta {
    pub player_id: String,
    pub context_id: String,
    pub side: Side,
    pub role: Role,
    pub contextual_before: Rating,
    pub contextual_after: Rating,
    pub combined_before: CombinedRating,
    pub combined_after: CombinedRating,
    /// The contextual sigma was reset because the player changed context.
    pub context_reset: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaEntry {
    pub context_id: String,
    pub before: Rating,
    pub after: Rating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameUpdate {
    pub game_id: String,
    pub target: RatingTarget,
    /// In the order of the game's stat lines.
    pub deltas: Vec<PlayerDelta>,
    /// Empty unless `target` is `Meta`.
    pub meta: Vec<MetaEntry>,
}

impl GameUpdate {
    pub fn delta(&self, player_id: &str) -> Option<&PlayerDelta> {
        self.deltas.iter().find(|d| d.player_id == player_id)
    }

    /// Pre-game combined rating of the player in `side`/`role`.
    pub fn before_for(&self, side: Side, role: Role) -> Option<&CombinedRating> {
        self.deltas.iter().find(|d| d.side == side && d.role == role).map(|d| &d.combined_before)
    }
}

/// PScores keyed by game and player.
#[derive(Debug, Clone, Default)]
pub struct PScoreTable {
    by_game: HashMap<String, HashMap<String, f64>>,
}

impl PScoreTable {
    pub fn from_records(records: &[PScoreRecord]) -> Self {
        let mut by_game: HashMap<String, HashMap<String, f64>> = HashMap::new();
        for r in records {
            by_game.entry(r.game_id.clone()).or_default().insert(r.player_id.clone(), r.pscore);
        }
        PScoreTable { by_game }
    }

    pub fn insert(&mut self, game_id: &str, player_id: &str, pscore: f64) {
        self.by_game.entry(game_id.to_string()).or_default().insert(player_id.to_string(), pscore);
    }

    pub fn get(&self, game_id: &str, player_id: &str) -> Option<f64> {
        self.by_game.get(game_id)?.get(player_id).copied()
    }

    /// Scores of a game's players in stat-line order.
    pub fn for_game(&self, game: &GameRecord) -> Result<Vec<f64>, RatingError> {
        game.lines
            .iter()
            .map(|l| {
                self.get(&game.game_id, &l.player_id).ok_or_else(|| RatingError::MissingPScore {
                    game_id: game.game_id.clone(),
                    player_id: l.player_id.clone(),
                })
            })
            .collect()
    }
}

/// Shape of the per-game outcome fed to the Plackett-Luce core.
#[derive(Debug, Clone, Copy)]
pub enum GameOutcome<'a> {
    Scores(&'a [f64]),
    Teams { sides: &'a [Side], winner: Side },
}

impl GameOutcome<'_> {
    fn rate(&self, ratings: &[Rating], config: &RatingConfig) -> Result<Vec<Rating>, RatingError> {
        match *self {
            GameOutcome::Scores(s) => ffa_update(ratings, s, config),
            GameOutcome::Teams { sides, winner } => team_update(ratings, sides, winner, config),
        }
    }
}

/// Inter-context update. Each player enters the ranking at
/// `(meta_mu + contextual_theta, meta_sigma)`; afterwards each context's new
/// meta mean is the mean of its players' `mu' - contextual_theta` and its new
/// sigma the root mean square of their `sigma'`. Returns one entry per context
/// in first-appearance order.
pub fn meta_update(
    players: &[(Rating, &str)],
    metas: &ContextRegistry,
    outcome: GameOutcome<'_>,
    config: &RatingConfig,
) -> Result<Vec<(String, Rating)>, RatingError> {
    let mut contexts: Vec<&str> = Vec::new();
    for (_, c) in players {
        if !contexts.contains(c) {
            contexts.push(c);
        }
    }
    if contexts.len() < 2 {
        return Err(RatingError::SingleContext);
    }
    let inputs: Vec<Rating> = players
        .iter()
        .map(|(ctx, c)| {
            let meta = metas.get(c).unwrap_or_else(|| config.prior());
            Rating::new(meta.mu + ctx.theta(), meta.sigma)
        })
        .collect();
    let outputs = outcome.rate(&inputs, config)?;

    Ok(contexts
        .into_iter()
        .map(|c| {
            let (mut mu, mut var, mut n) = (0.0, 0.0, 0.0);
            for ((ctx, pc), out) in players.iter().zip(&outputs) {
                if *pc == c {
                    mu += out.mu - ctx.theta();
                    var += out.sigma * out.sigma;
                    n += 1.0;
                }
            }
            (c.to_string(), Rating::new(mu / n, (var / n).sqrt()))
        })
        .collect())
}

/// Single-writer rating state. Games must be fed in chronological order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingState {
    pub config: RatingConfig,
    pub mode: UpdateMode,
    pub variant: Variant,
    pub players: BTreeMap<String, PlayerRatingState>,
    pub registry: ContextRegistry,
    pub games_processed: u64,
}

impl RatingState {
    pub fn new(config: RatingConfig, mode: UpdateMode, variant: Variant) -> Self {
        RatingState { config, mode, variant, players: BTreeMap::new(), registry: ContextRegistry::default(), games_processed: 0 }
    }

    pub fn player(&self, player_id: &str) -> Option<&PlayerRatingState> {
        self.players.get(player_id)
    }

    fn combine(&self, contextual: Rating, context_id: &str) -> CombinedRating {
        match self.variant {
            Variant::Plain => CombinedRating::single(contextual),
            Variant::Meta => {
                let meta = self.registry.get(context_id).unwrap_or_else(|| self.config.prior());
                CombinedRating::from_parts(contextual, meta)
            }
        }
    }

    pub fn combined(&self, player_id: &str) -> Result<CombinedRating, RatingError> {
        let p = self.players.get(player_id).ok_or_else(|| RatingError::UnknownPlayer(player_id.to_string()))?;
        Ok(self.combine(p.contextual, &p.context_id))
    }

    /// Rating the player would enter a game in `context_id` with, without
    /// changing any state. Unknown players get the prior.
    pub fn prospective(&self, player_id: &str, context_id: &str) -> CombinedRating {
        let contextual = match self.players.get(player_id) {
            Some(p) if self.variant == Variant::Meta && p.context_id != context_id => {
                Rating::new(p.contextual.mu, self.config.sigma0)
            }
            Some(p) => p.contextual,
            None => self.config.prior(),
        };
        self.combine(contextual, context_id)
    }

    /// Applies one game. `pscores` follow the order of `game.lines` and are
    /// required in FFA mode.
    pub fn process_game(&mut self, game: &GameRecord, pscores: Option<&[f64]>) -> Result<GameUpdate, RatingError> {
        let outcome = match self.mode {
            UpdateMode::Ffa => {
                let scores = pscores.ok_or_else(|| RatingError::MissingPScore {
                    game_id: game.game_id.clone(),
                    player_id: game.lines.first().map(|l| l.player_id.clone()).unwrap_or_default(),
                })?;
                if scores.len() != game.lines.len() {
                    return Err(RatingError::PScoreCount { ratings: game.lines.len(), pscores: scores.len() });
                }
                if scores.iter().any(|s| !s.is_finite()) {
                    return Err(RatingError::NonFinite);
                }
                None
            }
            UpdateMode::TeamOutcome => Some(game.lines.iter().map(|l| l.side).collect::<Vec<_>>()),
        };
        let outcome = match (&outcome, pscores) {
            (None, Some(s)) => GameOutcome::Scores(s),
            (Some(sides), _) => GameOutcome::Teams { sides, winner: game.winner },
            (None, None) => unreachable!("checked above"),
        };

        // Register newcomers and apply context-change resets first, so the
        // recorded pre-game ratings are the ones the update consumes.
        let mut resets = Vec::with_capacity(game.lines.len());
        for line in &game.lines {
            if self.variant == Variant::Meta {
                self.registry.get_or_init(&line.context_id, &self.config);
            }
            let state = match self.players.get_mut(&line.player_id) {
                Some(s) => s,
                None => {
                    log::debug!("game {}: new player {}", game.game_id, line.player_id);
                    self.players
                        .entry(line.player_id.clone())
                        .or_insert_with(|| PlayerRatingState::new(&line.player_id, &line.context_id, &self.config))
                }
            };
            let reset = self.variant == Variant::Meta && state.context_id != line.context_id;
            if reset {
                state.contextual.sigma = self.config.sigma0;
            }
            state.context_id = line.context_id.clone();
            resets.push(reset);
        }

        let contextual_before: Vec<Rating> = game.lines.iter().map(|l| self.players[&l.player_id].contextual).collect();
        let combined_before: Vec<CombinedRating> = game
            .lines
            .iter()
            .zip(&contextual_before)
            .map(|(l, r)| self.combine(*r, &l.context_id))
            .collect();

        let inter = self.variant == Variant::Meta && !game.is_intra_context();
        let mut meta = Vec::new();
        let target = if inter {
            let players: Vec<(Rating, &str)> =
                contextual_before.iter().zip(&game.lines).map(|(r, l)| (*r, l.context_id.as_str())).collect();
            for (context_id, after) in meta_update(&players, &self.registry, outcome, &self.config)? {
                let before = self.registry.get_or_init(&context_id, &self.config);
                self.registry.set(&context_id, after);
                meta.push(MetaEntry { context_id, before, after });
            }
            RatingTarget::Meta
        } else {
            let after = outcome.rate(&contextual_before, &self.config)?;
            for (line, r) in game.lines.iter().zip(after) {
                self.players.get_mut(&line.player_id).expect("registered").contextual = r;
            }
            RatingTarget::Contextual
        };

        let mut deltas = Vec::with_capacity(game.lines.len());
        for (i, line) in game.lines.iter().enumerate() {
            let state = self.players.get_mut(&line.player_id).expect("registered");
            state.games_played += 1;
            state.role_counts[line.role.index()] += 1;
            let contextual_after = state.contextual;
            deltas.push(PlayerDelta {
                player_id: line.player_id.clone(),
                context_id: line.context_id.clone(),
                side: line.side,
                role: line.role,
                contextual_before: contextual_before[i],
                contextual_after,
                combined_before: combined_before[i],
                combined_after: self.combine(contextual_after, &line.context_id),
                context_reset: resets[i],
            });
        }
        self.games_processed += 1;
        Ok(GameUpdate { game_id: game.game_id.clone(), target, deltas, meta })
    }

    /// Applies games in order, looking their PScores up in `pscores` (FFA
    /// mode only).
    pub fn replay(&mut self, games: &[GameRecord], pscores: Option<&PScoreTable>) -> Result<Vec<GameUpdate>, RatingError> {
        games
            .iter()
            .map(|g| {
                let scores = match (self.mode, pscores) {
                    (UpdateMode::Ffa, Some(t)) => Some(t.for_game(g)?),
                    _ => None,
                };
                self.process_game(g, scores.as_deref())
            })
            .collect()
    }
}

/// Fresh state replayed over `games`.
pub fn replay(
    games: &[GameRecord],
    pscores: Option<&PScoreTable>,
    config: RatingConfig,
    mode: UpdateMode,
    variant: Variant,
) -> Result<(RatingState, Vec<GameUpdate>), RatingError> {
    let mut state = RatingState::new(config, mode, variant);
    let log = state.replay(games, pscores)?;
    Ok((state, log))
}

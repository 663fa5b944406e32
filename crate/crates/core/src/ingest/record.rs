use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    Blue,
    Red,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Blue, Side::Red];

    pub fn opponent(self) -> Side {
        match self {
            Side::Blue => Side::Red,
            Side::Red => Side::Blue,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Blue => "BLUE",
            Side::Red => "RED",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "BLUE" => Ok(Side::Blue),
            "RED" => Ok(Side::Red),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

/// In-game position. Win models and percentile transforms are fitted per role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Top,
    Jungle,
    Mid,
    Bot,
    Support,
}

impl Role {
    pub const ALL: [Role; 5] = [Role::Top, Role::Jungle, Role::Mid, Role::Bot, Role::Support];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Top => "Top",
            Role::Jungle => "Jungle",
            Role::Mid => "Mid",
            Role::Bot => "Bot",
            Role::Support => "Support",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role `{s}`"))
    }
}

/// End-game statistics of one player in one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerLine {
    pub player_id: String,
    pub side: Side,
    pub role: Role,
    /// Region (or other rating pool) the player belongs to for this game.
    pub context_id: String,
    pub kills: u32,
    pub deaths: u32,
    pub assists: u32,
    pub gold: f64,
    pub experience: f64,
    pub creep_score: f64,
    pub wards_placed: f64,
    pub damage_dealt_to_players: f64,
    pub damage_taken_from_players: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    ChampionKill,
    BuildingKill,
    NeutralMonsterKill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ObjectiveTag {
    Drake,
    Herald,
    Baron,
    Other,
    Tower,
    Inhibitor,
    Nexus,
}

impl ObjectiveTag {
    /// Objectives whose capture makes a nearby death worthwhile.
    pub fn is_team_objective(self) -> bool {
        !matches!(self, ObjectiveTag::Other)
    }

    /// Neutral objectives counted by the contest rates.
    pub fn is_contestable(self) -> bool {
        matches!(self, ObjectiveTag::Drake | ObjectiveTag::Herald | ObjectiveTag::Baron)
    }

    fn valid_for(self, kind: EventKind) -> bool {
        match kind {
            EventKind::ChampionKill => false,
            EventKind::NeutralMonsterKill => matches!(
                self,
                ObjectiveTag::Drake | ObjectiveTag::Herald | ObjectiveTag::Baron | ObjectiveTag::Other
            ),
            EventKind::BuildingKill => matches!(
                self,
                ObjectiveTag::Tower | ObjectiveTag::Inhibitor | ObjectiveTag::Nexus
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameEvent {
    pub kind: EventKind,
    /// Seconds since game start.
    pub time: f64,
    pub actor_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_id: Option<String>,
    #[serde(default)]
    pub assist_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_tag: Option<ObjectiveTag>,
}

impl GameEvent {
    pub fn champion_kill(time: f64, actor: &str, victim: &str, assists: &[&str]) -> Self {
        GameEvent {
            kind: EventKind::ChampionKill,
            time,
            actor_id: actor.to_string(),
            victim_id: Some(victim.to_string()),
            assist_ids: assists.iter().map(|s| s.to_string()).collect(),
            objective_tag: None,
        }
    }

    pub fn objective(kind: EventKind, tag: ObjectiveTag, time: f64, actor: &str, assists: &[&str]) -> Self {
        GameEvent {
            kind,
            time,
            actor_id: actor.to_string(),
            victim_id: None,
            assist_ids: assists.iter().map(|s| s.to_string()).collect(),
            objective_tag: Some(tag),
        }
    }

    /// Actor plus assists.
    pub fn participants(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.actor_id.as_str()).chain(self.assist_ids.iter().map(String::as_str))
    }

    pub fn involves(&self, player_id: &str) -> bool {
        self.participants().any(|p| p == player_id)
    }

    pub fn tag_is_valid(&self) -> bool {
        match (self.kind, self.objective_tag) {
            (EventKind::ChampionKill, None) => true,
            (EventKind::ChampionKill, Some(_)) => false,
            (_, None) => false,
            (kind, Some(tag)) => tag.valid_for(kind),
        }
    }
}

/// One professional match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game_id: String,
    pub timestamp: DateTime<Utc>,
    /// Seconds.
    pub duration: f64,
    pub competition_id: String,
    pub is_inter_context_event: bool,
    pub winner: Side,
    pub lines: Vec<PlayerLine>,
    pub events: Vec<GameEvent>,
}

impl GameRecord {
    pub fn line(&self, player_id: &str) -> Option<&PlayerLine> {
        self.lines.iter().find(|l| l.player_id == player_id)
    }

    pub fn side_of(&self, player_id: &str) -> Option<Side> {
        self.line(player_id).map(|l| l.side)
    }

    pub fn line_for(&self, side: Side, role: Role) -> Option<&PlayerLine> {
        self.lines.iter().find(|l| l.side == side && l.role == role)
    }

    /// True iff all players share a single context.
    pub fn is_intra_context(&self) -> bool {
        match self.lines.first() {
            Some(first) => self.lines.iter().all(|l| l.context_id == first.context_id),
            None => true,
        }
    }

    /// Sum of kills over the stat lines.
    pub fn total_kills(&self) -> u32 {
        self.lines.iter().map(|l| l.kills).sum()
    }

    pub fn won(&self, player_id: &str) -> Option<bool> {
        self.side_of(player_id).map(|s| s == self.winner)
    }

    /// Chronological sort key used everywhere games are ordered.
    pub fn order_key(&self) -> (DateTime<Utc>, &str) {
        (self.timestamp, self.game_id.as_str())
    }
}

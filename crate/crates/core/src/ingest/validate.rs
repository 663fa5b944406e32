use std::collections::{HashMap, HashSet};
use std::fmt;

use super::record::{EventKind, GameRecord, Role, Side};

/// A broken `GameRecord` invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LineCount(usize),
    SideCount { side: Side, count: usize },
    DuplicateRole { side: Side, role: Role },
    DuplicatePlayer(String),
    EmptyId(&'static str),
    NonPositiveDuration(f64),
    NegativeStat { player_id: String, field: &'static str },
    EventTime { index: usize, time: f64 },
    UnknownPlayer { index: usize, player_id: String },
    ActorInAssists { index: usize },
    MissingVictim { index: usize },
    VictimSameSide { index: usize },
    BadObjectiveTag { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LineCount(n) => write!(f, "exactly 10 lines required, found {n}"),
            Violation::SideCount { side, count } => {
                write!(f, "exactly 5 lines per side required, {side} has {count}")
            }
            Violation::DuplicateRole { side, role } => {
                write!(f, "role unique within side: {side} has {role} twice")
            }
            Violation::DuplicatePlayer(id) => write!(f, "player `{id}` appears twice"),
            Violation::EmptyId(field) => write!(f, "{field} must not be empty"),
            Violation::NonPositiveDuration(d) => write!(f, "duration > 0 required, got {d}"),
            Violation::NegativeStat { player_id, field } => {
                write!(f, "counter `{field}` of player `{player_id}` must be finite and >= 0")
            }
            Violation::EventTime { index, time } => {
                write!(f, "event {index}: time {time} outside [0, duration]")
            }
            Violation::UnknownPlayer { index, player_id } => {
                write!(f, "event {index}: player `{player_id}` is not in the game")
            }
            Violation::ActorInAssists { index } => {
                write!(f, "event {index}: actor listed among its own assists")
            }
            Violation::MissingVictim { index } => {
                write!(f, "event {index}: champion kill without victim")
            }
            Violation::VictimSameSide { index } => {
                write!(f, "event {index}: victim on the same side as the killer")
            }
            Violation::BadObjectiveTag { index } => {
                write!(f, "event {index}: objective tag does not match event kind")
            }
        }
    }
}

/// Non-fatal oddities; `--strict` promotes them to errors.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    EventsUnordered,
    VictimOnNonKill { index: usize },
    StatMismatch { player_id: String, field: &'static str, line: u32, events: u32 },
    InterFlagMismatch { flag: bool, computed: bool },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::EventsUnordered => f.write_str("events not in chronological order (re-sorted)"),
            Warning::VictimOnNonKill { index } => {
                write!(f, "event {index}: victim_id on a non-champion-kill event (ignored)")
            }
            Warning::StatMismatch { player_id, field, line, events } => write!(
                f,
                "player `{player_id}`: stat line {field}={line} but event stream has {events}"
            ),
            Warning::InterFlagMismatch { flag, computed } => write!(
                f,
                "is_inter_context_event={flag} but player contexts say inter={computed}"
            ),
        }
    }
}

/// Checks every structural invariant of a game. Returns the first violation.
pub fn validate_game(game: &GameRecord) -> Result<(), Violation> {
    if game.game_id.is_empty() {
        return Err(Violation::EmptyId("game_id"));
    }
    if !(game.duration.is_finite() && game.duration > 0.0) {
        return Err(Violation::NonPositiveDuration(game.duration));
    }
    if game.lines.len() != 10 {
        return Err(Violation::LineCount(game.lines.len()));
    }
    for side in Side::BOTH {
        let count = game.lines.iter().filter(|l| l.side == side).count();
        if count != 5 {
            return Err(Violation::SideCount { side, count });
        }
        let mut seen = HashSet::new();
        for line in game.lines.iter().filter(|l| l.side == side) {
            if !seen.insert(line.role) {
                return Err(Violation::DuplicateRole { side, role: line.role });
            }
        }
    }

    let mut sides: HashMap<&str, Side> = HashMap::with_capacity(10);
    for line in &game.lines {
        if line.player_id.is_empty() {
            return Err(Violation::EmptyId("player_id"));
        }
        if line.context_id.is_empty() {
            return Err(Violation::EmptyId("context_id"));
        }
        if sides.insert(line.player_id.as_str(), line.side).is_some() {
            return Err(Violation::DuplicatePlayer(line.player_id.clone()));
        }
        let reals = [
            ("gold", line.gold),
            ("experience", line.experience),
            ("creep_score", line.creep_score),
            ("wards_placed", line.wards_placed),
            ("damage_dealt_to_players", line.damage_dealt_to_players),
            ("damage_taken_from_players", line.damage_taken_from_players),
        ];
        for (field, value) in reals {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Violation::NegativeStat { player_id: line.player_id.clone(), field });
            }
        }
    }

    for (index, event) in game.events.iter().enumerate() {
        if !(event.time.is_finite() && event.time >= 0.0 && event.time <= game.duration) {
            return Err(Violation::EventTime { index, time: event.time });
        }
        let side_of = |id: &str| {
            sides.get(id).copied().ok_or_else(|| Violation::UnknownPlayer {
                index,
                player_id: id.to_string(),
            })
        };
        let actor_side = side_of(&event.actor_id)?;
        for assist in &event.assist_ids {
            side_of(assist)?;
            if *assist == event.actor_id {
                return Err(Violation::ActorInAssists { index });
            }
        }
        if !event.tag_is_valid() {
            return Err(Violation::BadObjectiveTag { index });
        }
        if event.kind == EventKind::ChampionKill {
            let victim = event.victim_id.as_deref().ok_or(Violation::MissingVictim { index })?;
            if side_of(victim)? == actor_side {
                return Err(Violation::VictimSameSide { index });
            }
        }
    }
    Ok(())
}

/// Soft consistency checks on an already valid game.
pub fn lint_game(game: &GameRecord) -> Vec<Warning> {
    let mut warnings = Vec::new();
    if game.events.windows(2).any(|w| w[1].time < w[0].time) {
        warnings.push(Warning::EventsUnordered);
    }
    for (index, event) in game.events.iter().enumerate() {
        if event.kind != EventKind::ChampionKill && event.victim_id.is_some() {
            warnings.push(Warning::VictimOnNonKill { index });
        }
    }
    for line in &game.lines {
        let id = line.player_id.as_str();
        let kills = game.events.iter().filter(|e| e.kind == EventKind::ChampionKill);
        let (mut k, mut d, mut a) = (0u32, 0u32, 0u32);
        for e in kills {
            if e.actor_id == id {
                k += 1;
            }
            if e.victim_id.as_deref() == Some(id) {
                d += 1;
            }
            if e.assist_ids.iter().any(|x| x == id) {
                a += 1;
            }
        }
        for (field, stat, counted) in [("kills", line.kills, k), ("deaths", line.deaths, d), ("assists", line.assists, a)] {
            if stat != counted {
                warnings.push(Warning::StatMismatch { player_id: id.to_string(), field, line: stat, events: counted });
            }
        }
    }
    let computed_inter = !game.is_intra_context();
    if game.is_inter_context_event != computed_inter {
        warnings.push(Warning::InterFlagMismatch { flag: game.is_inter_context_event, computed: computed_inter });
    }
    warnings
}

//! Event-stream derived features.

use crate::ingest::{EventKind, GameEvent, GameRecord, Side};

fn in_window(event: &GameEvent, center: f64, window: f64) -> bool {
    event.time >= center - window && event.time <= center + window
}

/// Whether `player_id`'s death at time `t` gave nothing back: within
/// `[t - window, t + window]` the player took part in no enemy kill and
/// their team secured no objective.
pub fn death_is_worthless(game: &GameRecord, player_id: &str, t: f64, window: f64) -> bool {
    let Some(side) = game.side_of(player_id) else {
        return false;
    };
    !game.events.iter().filter(|e| in_window(e, t, window)).any(|e| match e.kind {
        EventKind::ChampionKill => {
            e.involves(player_id)
                && e.victim_id.as_deref().and_then(|v| game.side_of(v)) == Some(side.opponent())
        }
        EventKind::BuildingKill | EventKind::NeutralMonsterKill => {
            e.objective_tag.is_some_and(|t| t.is_team_objective())
                && game.side_of(&e.actor_id) == Some(side)
        }
    })
}

/// One flag per death of the player, in event order.
pub fn worthless_death_flags(game: &GameRecord, player_id: &str, window: f64) -> Vec<bool> {
    deaths(game, player_id)
        .map(|e| death_is_worthless(game, player_id, e.time, window))
        .collect()
}

/// Share of the player's kills whose victim died a worthless death.
pub fn free_kill_ratio(game: &GameRecord, player_id: &str, window: f64) -> f64 {
    let mut kills = 0usize;
    let mut free = 0usize;
    for e in kills_by(game, player_id) {
        kills += 1;
        if let Some(victim) = e.victim_id.as_deref() {
            if death_is_worthless(game, victim, e.time, window) {
                free += 1;
            }
        }
    }
    if kills == 0 {
        0.0
    } else {
        free as f64 / kills as f64
    }
}

/// Contest tallies of one game from one player's perspective.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContestTally {
    pub wins: usize,
    pub losses: usize,
    pub contestable: usize,
}

impl ContestTally {
    pub fn rates(&self) -> (f64, f64) {
        if self.contestable == 0 {
            (0.0, 0.0)
        } else {
            let n = self.contestable as f64;
            (self.wins as f64 / n, self.losses as f64 / n)
        }
    }
}

/// Side that won a contested neutral objective, `None` when the event is
/// not contestable or only one team took part.
pub fn contest_winner(game: &GameRecord, event: &GameEvent) -> Option<Side> {
    if event.kind != EventKind::NeutralMonsterKill || !event.objective_tag.is_some_and(|t| t.is_contestable()) {
        return None;
    }
    let actor_side = game.side_of(&event.actor_id)?;
    let enemy_present = event
        .assist_ids
        .iter()
        .any(|a| game.side_of(a) == Some(actor_side.opponent()));
    enemy_present.then_some(actor_side)
}

pub fn contest_tally(game: &GameRecord, player_id: &str) -> ContestTally {
    let mut tally = ContestTally::default();
    let Some(side) = game.side_of(player_id) else {
        return tally;
    };
    for e in &game.events {
        if e.kind == EventKind::NeutralMonsterKill && e.objective_tag.is_some_and(|t| t.is_contestable()) {
            tally.contestable += 1;
            if let Some(winner) = contest_winner(game, e) {
                if e.involves(player_id) {
                    if winner == side {
                        tally.wins += 1;
                    } else {
                        tally.losses += 1;
                    }
                }
            }
        }
    }
    tally
}

/// `(winrate, loserate)` over all contestable objectives of the game.
pub fn objective_contest_rates(game: &GameRecord, player_id: &str) -> (f64, f64) {
    contest_tally(game, player_id).rates()
}

/// Most kills the player scored within any window of `window` seconds.
pub fn largest_multi_kill(game: &GameRecord, player_id: &str, window: f64) -> u32 {
    let mut times: Vec<f64> = kills_by(game, player_id).map(|e| e.time).collect();
    times.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut start = 0;
    for end in 0..times.len() {
        while times[end] - times[start] > window {
            start += 1;
        }
        best = best.max(end - start + 1);
    }
    best as u32
}

/// Longest run of the player's kills not interrupted by their own death.
pub fn largest_killing_spree(game: &GameRecord, player_id: &str) -> u32 {
    let mut best = 0u32;
    let mut run = 0u32;
    for e in game.events.iter().filter(|e| e.kind == EventKind::ChampionKill) {
        if e.actor_id == player_id {
            run += 1;
            best = best.max(run);
        } else if e.victim_id.as_deref() == Some(player_id) {
            run = 0;
        }
    }
    best
}

fn kills_by<'a>(game: &'a GameRecord, player_id: &'a str) -> impl Iterator<Item = &'a GameEvent> {
    game.events
        .iter()
        .filter(move |e| e.kind == EventKind::ChampionKill && e.actor_id == player_id)
}

fn deaths<'a>(game: &'a GameRecord, player_id: &'a str) -> impl Iterator<Item = &'a GameEvent> {
    game.events
        .iter()
        .filter(move |e| e.kind == EventKind::ChampionKill && e.victim_id.as_deref() == Some(player_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::fixtures::game;
    use crate::ingest::ObjectiveTag;

    fn with_events(events: Vec<GameEvent>) -> GameRecord {
        let mut g = game("g", "2024-01-01T00:00:00Z", "KR");
        g.events = events;
        g
    }

    #[test]
    fn lonely_death_is_worthless() {
        let g = with_events(vec![GameEvent::champion_kill(300.0, "r0", "b0", &[])]);
        assert_eq!(worthless_death_flags(&g, "b0", 60.0), vec![true]);
    }

    #[test]
    fn tower_taken_redeems_death() {
        let g = with_events(vec![
            GameEvent::champion_kill(300.0, "r0", "b0", &[]),
            GameEvent::objective(EventKind::BuildingKill, ObjectiveTag::Tower, 330.0, "b2", &[]),
        ]);
        assert_eq!(worthless_death_flags(&g, "b0", 60.0), vec![false]);
    }

    #[test]
    fn objective_outside_window_does_not_count() {
        let g = with_events(vec![
            GameEvent::champion_kill(300.0, "r0", "b0", &[]),
            GameEvent::objective(EventKind::BuildingKill, ObjectiveTag::Tower, 361.0, "b2", &[]),
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Other, 320.0, "b2", &[]),
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Drake, 310.0, "r2", &[]),
        ]);
        assert_eq!(worthless_death_flags(&g, "b0", 60.0), vec![true]);
    }

    #[test]
    fn assisting_a_kill_redeems_death() {
        let g = with_events(vec![
            GameEvent::champion_kill(250.0, "b1", "r3", &["b0"]),
            GameEvent::champion_kill(300.0, "r0", "b0", &[]),
        ]);
        assert_eq!(worthless_death_flags(&g, "b0", 60.0), vec![false]);
    }

    #[test]
    fn no_deaths_no_flags() {
        let g = with_events(vec![GameEvent::champion_kill(250.0, "b1", "r3", &[])]);
        assert!(worthless_death_flags(&g, "b0", 60.0).is_empty());
    }

    #[test]
    fn free_kill_ratios() {
        let g = with_events(vec![
            GameEvent::champion_kill(100.0, "b0", "r0", &[]),
            GameEvent::champion_kill(1000.0, "b0", "r1", &[]),
        ]);
        assert_eq!(free_kill_ratio(&g, "b0", 60.0), 1.0);
        assert_eq!(free_kill_ratio(&g, "b1", 60.0), 0.0);

        // r1 and r2 trade back immediately, so only one of four is free.
        let g = with_events(vec![
            GameEvent::champion_kill(100.0, "b0", "r0", &[]),
            GameEvent::champion_kill(400.0, "b0", "r1", &[]),
            GameEvent::champion_kill(405.0, "r1", "b3", &[]),
            GameEvent::champion_kill(700.0, "b0", "r2", &[]),
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Baron, 720.0, "r4", &[]),
            GameEvent::champion_kill(1000.0, "b0", "r3", &[]),
            GameEvent::objective(EventKind::BuildingKill, ObjectiveTag::Inhibitor, 1010.0, "r0", &[]),
        ]);
        // r0's death at 100 is worthless; r1 took part in a kill; r2's team got baron; r3's team got an inhibitor.
        assert_eq!(free_kill_ratio(&g, "b0", 60.0), 0.25);
    }

    #[test]
    fn contest_rates() {
        let drake = |t, actor: &str, assists: &[&str]| {
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Drake, t, actor, assists)
        };
        let g = with_events(vec![
            drake(100.0, "b1", &["r1"]),
            drake(200.0, "r1", &["b1", "b2"]),
            drake(300.0, "b1", &[]),
            drake(400.0, "r1", &[]),
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Other, 500.0, "r1", &["b1"]),
        ]);
        assert_eq!(objective_contest_rates(&g, "b1"), (0.25, 0.25));
        assert_eq!(objective_contest_rates(&g, "b2"), (0.0, 0.25));
        assert_eq!(objective_contest_rates(&g, "r1"), (0.25, 0.25));
        assert_eq!(objective_contest_rates(&g, "r4"), (0.0, 0.0));
        assert_eq!(objective_contest_rates(&with_events(vec![]), "b1"), (0.0, 0.0));
    }

    #[test]
    fn uncontested_drake_leaves_rates() {
        let g = with_events(vec![
            GameEvent::objective(EventKind::NeutralMonsterKill, ObjectiveTag::Drake, 100.0, "b1", &["b2"]),
        ]);
        assert_eq!(contest_tally(&g, "b1"), ContestTally { wins: 0, losses: 0, contestable: 1 });
    }

    #[test]
    fn multi_kill_and_spree() {
        let g = with_events(vec![
            GameEvent::champion_kill(100.0, "b0", "r0", &[]),
            GameEvent::champion_kill(105.0, "b0", "r1", &[]),
            GameEvent::champion_kill(110.0, "b0", "r2", &[]),
            GameEvent::champion_kill(111.0, "b0", "r3", &[]),
            GameEvent::champion_kill(500.0, "r0", "b0", &[]),
            GameEvent::champion_kill(900.0, "b0", "r0", &[]),
        ]);
        assert_eq!(largest_multi_kill(&g, "b0", 10.0), 3);
        assert_eq!(largest_multi_kill(&g, "b0", 11.0), 4);
        assert_eq!(largest_multi_kill(&g, "b1", 10.0), 0);
        assert_eq!(largest_killing_spree(&g, "b0"), 4);
        assert_eq!(largest_killing_spree(&g, "r0"), 1);
    }
}

//! Synthetic corpora with known latent skills.
//!
//! Every player has a latent skill `s = context_offset + spread * z`. In each
//! game, a player's performance is `s + perf_noise * e` measured against the
//! mean of the ten players; performance feeds every stat channel (kills,
//! gold, damage, objectives) monotonically, and the team with the larger
//! skill sum wins with probability `sigmoid(gap / noise_scale)`.

use std::io::Write;

use chrono::{DateTime, Duration, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{EventKind, GameEvent, GameRecord, ObjectiveTag, PlayerLine, Role, Side};
use crate::perf::sigmoid;

#[derive(Debug, Error, PartialEq)]
pub enum SyntheticError {
    #[error("invalid synthetic config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_players: usize,
    pub n_contexts: usize,
    /// Mean skill of each context; empty means all zero.
    pub context_offsets: Vec<f64>,
    /// Standard deviation of skill within a context.
    pub skill_spread: f64,
    /// Give every role of a context the same multiset of skills and the
    /// same kill, assist and objective behaviour.
    pub role_symmetric: bool,
    pub games_per_step: usize,
    pub steps: usize,
    /// Days between steps.
    pub step_days: i64,
    /// Share of games whose two sides come from different contexts.
    pub inter_context_rate: f64,
    /// Per-game probability that one random player moves to another context.
    pub transfer_rate: f64,
    /// Logistic scale of the outcome in team-skill units; 0 makes the
    /// stronger team always win.
    pub noise_scale: f64,
    /// Per-game performance noise in skill units.
    pub perf_noise: f64,
    pub seed: u64,
    pub start: DateTime<Utc>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_players: 200,
            n_contexts: 1,
            context_offsets: Vec::new(),
            skill_spread: 1.0,
            role_symmetric: false,
            games_per_step: 5,
            steps: 400,
            step_days: 1,
            inter_context_rate: 0.0,
            transfer_rate: 0.0,
            noise_scale: 1.0,
            perf_noise: 1.0,
            seed: 0,
            start: DateTime::from_timestamp(1_577_836_800, 0).expect("valid"),
        }
    }
}

impl SyntheticConfig {
    pub fn n_games(&self) -> usize {
        self.games_per_step * self.steps
    }

    pub fn validate(&self) -> Result<(), SyntheticError> {
        let bad = |m: String| Err(SyntheticError::Config(m));
        if self.n_contexts == 0 {
            return bad("n_contexts must be positive".into());
        }
        if self.n_players < 10 * self.n_contexts {
            return bad(format!(
                "{} players cannot fill two players per role in each of {} contexts",
                self.n_players, self.n_contexts
            ));
        }
        if !self.context_offsets.is_empty() && self.context_offsets.len() != self.n_contexts {
            return bad(format!("{} context offsets for {} contexts", self.context_offsets.len(), self.n_contexts));
        }
        for (name, rate) in [("inter_context_rate", self.inter_context_rate), ("transfer_rate", self.transfer_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} must be in [0, 1]"));
            }
            if rate > 0.0 && self.n_contexts < 2 {
                return bad(format!("{name} > 0 needs at least 2 contexts"));
            }
        }
        for (name, v) in [("skill_spread", self.skill_spread), ("noise_scale", self.noise_scale), ("perf_noise", self.perf_noise)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        if self.context_offsets.iter().any(|o| !o.is_finite()) {
            return bad("context offsets must be finite".into());
        }
        if self.step_days <= 0 {
            return bad("step_days must be positive".into());
        }
        Ok(())
    }

    fn kill_weight(&self, role: Role) -> f64 {
        if self.role_symmetric {
            1.0
        } else {
            KILL_WEIGHT[role.index()]
        }
    }

    fn assist_prob(&self, role: Role) -> f64 {
        if self.role_symmetric {
            0.45
        } else {
            ASSIST_PROB[role.index()]
        }
    }

    fn offset(&self, context: usize) -> f64 {
        self.context_offsets.get(context).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentPlayer {
    pub player_id: String,
    pub role: Role,
    /// Context at the start of the simulation.
    pub context_id: String,
    pub skill: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub games: Vec<GameRecord>,
    pub players: Vec<LatentPlayer>,
}

impl SyntheticCorpus {
    pub fn skill_of(&self, player_id: &str) -> Option<f64> {
        self.players.iter().find(|p| p.player_id == player_id).map(|p| p.skill)
    }
}

pub const LATENT_HEADER: &str = "#pskill-latent v1";

pub fn context_name(index: usize) -> String {
    format!("C{index}")
}

/// Latent skill table as TSV.
pub fn write_latent<W: Write>(mut out: W, players: &[LatentPlayer]) -> std::io::Result<()> {
    writeln!(out, "{LATENT_HEADER}")?;
    writeln!(out, "player_id\trole\tcontext_id\tskill")?;
    for p in players {
        writeln!(out, "{}\t{}\t{}\t{}", p.player_id, p.role, p.context_id, p.skill)?;
    }
    out.flush()
}

pub fn read_latent<R: std::io::BufRead>(input: R) -> Result<Vec<LatentPlayer>, String> {
    let mut lines = input.lines();
    let header = lines.next().transpose().map_err(|e| e.to_string())?;
    if header.as_deref().map(str::trim_end) != Some(LATENT_HEADER) {
        return Err(format!("expected `{LATENT_HEADER}`"));
    }
    lines.next();
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let c: Vec<&str> = line.split('\t').collect();
        let bad = || format!("latent line {}: malformed", i + 3);
        if c.len() != 4 {
            return Err(bad());
        }
        out.push(LatentPlayer {
            player_id: c[0].to_string(),
            role: c[1].parse().map_err(|_| bad())?,
            context_id: c[2].to_string(),
            skill: c[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

// Per-role baselines for a 30 minute game, in `Role::ALL` order.
const GOLD: [f64; 5] = [11_500.0, 10_500.0, 12_000.0, 13_000.0, 8_000.0];
const XP: [f64; 5] = [14_000.0, 12_000.0, 14_500.0, 12_500.0, 9_000.0];
const CS_PER_MIN: [f64; 5] = [8.0, 5.5, 8.5, 9.0, 1.2];
const WARDS_PER_MIN: [f64; 5] = [0.4, 0.45, 0.4, 0.45, 1.3];
const DEALT: [f64; 5] = [18_000.0, 12_000.0, 22_000.0, 24_000.0, 8_000.0];
const TAKEN: [f64; 5] = [22_000.0, 25_000.0, 16_000.0, 15_000.0, 12_000.0];
const KILL_WEIGHT: [f64; 5] = [1.0, 0.9, 1.3, 1.4, 0.3];
const ASSIST_PROB: [f64; 5] = [0.35, 0.5, 0.45, 0.4, 0.6];

struct Sim<'a> {
    cfg: &'a SyntheticConfig,
    rng: ChaCha8Rng,
    skill: Vec<f64>,
    role: Vec<Role>,
    context: Vec<usize>,
    /// Player indices by `context * 5 + role`.
    pools: Vec<Vec<usize>>,
}

struct Slot {
    player: usize,
    side: Side,
    role: Role,
    perf: f64,
}

impl Sim<'_> {
    fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    fn pick_weighted(&mut self, candidates: &[usize], weight: impl Fn(usize) -> f64) -> usize {
        let total: f64 = candidates.iter().map(|&i| weight(i)).sum();
        let mut u = self.rng.random::<f64>() * total;
        for &i in candidates {
            u -= weight(i);
            if u <= 0.0 {
                return i;
            }
        }
        *candidates.last().expect("non-empty")
    }

    fn transfer(&mut self) {
        let p = self.rng.random_range(0..self.skill.len());
        let role = self.role[p].index();
        let from = self.context[p];
        if self.pools[from * 5 + role].len() <= 2 {
            return;
        }
        let mut to = self.rng.random_range(0..self.cfg.n_contexts - 1);
        if to >= from {
            to += 1;
        }
        self.pools[from * 5 + role].retain(|&x| x != p);
        self.pools[to * 5 + role].push(p);
        self.context[p] = to;
    }

    fn game(&mut self, game_id: String, timestamp: DateTime<Utc>) -> GameRecord {
        let cfg = self.cfg;
        let (cb, cr) = if cfg.n_contexts > 1 && self.rng.random::<f64>() < cfg.inter_context_rate {
            let a = self.rng.random_range(0..cfg.n_contexts);
            let mut b = self.rng.random_range(0..cfg.n_contexts - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        } else {
            let c = self.rng.random_range(0..cfg.n_contexts);
            (c, c)
        };

        let mut slots = Vec::with_capacity(10);
        for (side, ctx) in [(Side::Blue, cb), (Side::Red, cr)] {
            for role in Role::ALL {
                let pool = &self.pools[ctx * 5 + role.index()];
                let taken: Vec<usize> = slots.iter().map(|s: &Slot| s.player).collect();
                let choices: Vec<usize> = pool.iter().copied().filter(|p| !taken.contains(p)).collect();
                let player = *choices.choose(&mut self.rng).expect("pools hold at least two players");
                slots.push(Slot { player, side, role, perf: 0.0 });
            }
        }

        let team_skill = |side: Side, slots: &[Slot], skill: &[f64]| -> f64 {
            slots.iter().filter(|s| s.side == side).map(|s| skill[s.player]).sum()
        };
        let gap = team_skill(Side::Blue, &slots, &self.skill) - team_skill(Side::Red, &slots, &self.skill);
        let p_blue = if cfg.noise_scale == 0.0 {
            if gap >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            sigmoid(gap / cfg.noise_scale)
        };
        let winner = if self.rng.random::<f64>() < p_blue { Side::Blue } else { Side::Red };

        for i in 0..slots.len() {
            let e = self.normal();
            slots[i].perf = self.skill[slots[i].player] + cfg.perf_noise * e;
        }
        let mean = slots.iter().map(|s| s.perf).sum::<f64>() / slots.len() as f64;
        for s in &mut slots {
            s.perf -= mean;
        }

        let duration = (1900.0 + 250.0 * self.normal()).clamp(1200.0, 2700.0).round();
        let ids: Vec<String> = slots.iter().map(|s| player_id(s.player)).collect();
        let events = self.events(&slots, &ids, winner, duration);

        let scale = duration / 1800.0;
        let mut lines = Vec::with_capacity(10);
        for (slot, id) in slots.iter().zip(&ids) {
            let r = slot.role.index();
            let (mut k, mut d, mut a) = (0, 0, 0);
            for e in events.iter().filter(|e| e.kind == EventKind::ChampionKill) {
                k += u32::from(e.actor_id == *id);
                d += u32::from(e.victim_id.as_deref() == Some(id.as_str()));
                a += u32::from(e.assist_ids.contains(id));
            }
            let won = if slot.side == winner { 1.0 } else { 0.0 };
            let mut channel = |base: f64, perf_gain: f64, win_gain: f64| -> f64 {
                let jitter = (0.08 * self.normal()).exp();
                (base * (1.0 + perf_gain * slot.perf + win_gain * won) * jitter).max(0.0).round()
            };
            let gold = channel(GOLD[r] * scale, 0.08, 0.1) + 300.0 * k as f64 + 120.0 * a as f64;
            let experience = channel(XP[r] * scale, 0.06, 0.08);
            let creep_score = channel(CS_PER_MIN[r] * duration / 60.0, 0.06, 0.04);
            let wards_placed = channel(WARDS_PER_MIN[r] * duration / 60.0, 0.06, 0.02);
            let damage_dealt_to_players = channel(DEALT[r] * scale, 0.12, 0.1);
            let damage_taken_from_players = channel(TAKEN[r] * scale, 0.04, 0.04);
            lines.push(PlayerLine {
                player_id: id.clone(),
                side: slot.side,
                role: slot.role,
                context_id: context_name(self.context[slot.player]),
                kills: k,
                deaths: d,
                assists: a,
                gold,
                experience,
                creep_score,
                wards_placed,
                damage_dealt_to_players,
                damage_taken_from_players,
            });
        }

        GameRecord {
            game_id,
            timestamp,
            duration,
            competition_id: if cb == cr { context_name(cb) } else { "INTL".into() },
            is_inter_context_event: cb != cr,
            winner,
            lines,
            events,
        }
    }

    fn events(&mut self, slots: &[Slot], ids: &[String], winner: Side, duration: f64) -> Vec<GameEvent> {
        let cfg = self.cfg;
        let side_idx = |side: Side| -> Vec<usize> { (0..slots.len()).filter(|&i| slots[i].side == side).collect() };
        let team_perf = |side: Side| -> f64 { slots.iter().filter(|s| s.side == side).map(|s| s.perf).sum() };
        let mut events = Vec::new();

        // Kills lean towards the winner and the better-performing side.
        let winner_share = (0.62 + 0.03 * (team_perf(winner) - team_perf(winner.opponent()))).clamp(0.5, 0.85);
        let n_kills = self.rng.random_range(8..=28);
        for _ in 0..n_kills {
            let t = self.rng.random_range(90.0..duration - 30.0);
            let side = if self.rng.random::<f64>() < winner_share { winner } else { winner.opponent() };
            let mine = side_idx(side);
            let theirs = side_idx(side.opponent());
            let killer = self.pick_weighted(&mine, |i| cfg.kill_weight(slots[i].role) * (0.6 * slots[i].perf).exp());
            let victim = self.pick_weighted(&theirs, |i| (-0.6 * slots[i].perf).exp());
            let mut assists = Vec::new();
            for &m in mine.iter().filter(|&&m| m != killer) {
                let p = (cfg.assist_prob(slots[m].role) + 0.05 * slots[m].perf).clamp(0.05, 0.9);
                if self.rng.random::<f64>() < p {
                    assists.push(ids[m].as_str());
                }
            }
            events.push(GameEvent::champion_kill(t, &ids[killer], &ids[victim], &assists));
        }

        // Neutral objectives, some of them contested by the enemy jungler.
        let jungler = |side: Side| -> usize {
            (0..slots.len()).find(|&i| slots[i].side == side && slots[i].role == Role::Jungle).expect("jungler")
        };
        let objectives = [
            (ObjectiveTag::Drake, self.rng.random_range(2..=5)),
            (ObjectiveTag::Herald, self.rng.random_range(0..=2)),
            (ObjectiveTag::Baron, self.rng.random_range(0..=2)),
            (ObjectiveTag::Other, self.rng.random_range(0..=3)),
        ];
        for (tag, count) in objectives {
            for _ in 0..count {
                let earliest: f64 = if tag == ObjectiveTag::Baron { 1200.0 } else { 300.0 };
                let t = self.rng.random_range(earliest.min(duration - 60.0)..duration - 30.0);
                let side = if self.rng.random::<f64>() < 0.68 { winner } else { winner.opponent() };
                let actor = if cfg.role_symmetric {
                    self.pick_weighted(&side_idx(side), |i| (0.4 * slots[i].perf).exp())
                } else {
                    jungler(side)
                };
                let mut assists: Vec<&str> = side_idx(side)
                    .into_iter()
                    .filter(|&i| i != actor && self.rng.random::<f64>() < 0.4)
                    .map(|i| ids[i].as_str())
                    .collect();
                if tag != ObjectiveTag::Other && self.rng.random::<f64>() < 0.35 {
                    let contester = if cfg.role_symmetric {
                        *side_idx(side.opponent()).choose(&mut self.rng).expect("five players")
                    } else {
                        jungler(side.opponent())
                    };
                    assists.push(ids[contester].as_str());
                }
                events.push(GameEvent::objective(EventKind::NeutralMonsterKill, tag, t, &ids[actor], &assists));
            }
        }

        // Structures, then the nexus at the end.
        for (side, towers, inhibs) in [
            (winner, self.rng.random_range(6..=11), self.rng.random_range(1..=3)),
            (winner.opponent(), self.rng.random_range(0..=5), 0),
        ] {
            let members = side_idx(side);
            for (tag, count) in [(ObjectiveTag::Tower, towers), (ObjectiveTag::Inhibitor, inhibs)] {
                for _ in 0..count {
                    let t = self.rng.random_range(600.0..duration - 20.0);
                    let actor = self.pick_weighted(&members, |i| (0.4 * slots[i].perf).exp());
                    events.push(GameEvent::objective(EventKind::BuildingKill, tag, t, &ids[actor], &[]));
                }
            }
        }
        let members = side_idx(winner);
        let actor = self.pick_weighted(&members, |i| (0.4 * slots[i].perf).exp());
        events.push(GameEvent::objective(EventKind::BuildingKill, ObjectiveTag::Nexus, duration - 5.0, &ids[actor], &[]));

        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        events
    }
}

fn player_id(index: usize) -> String {
    format!("p{index:04}")
}

/// Generates a corpus. Identical configs give identical corpora.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticCorpus, SyntheticError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_players;
    let role: Vec<Role> = (0..n).map(|i| Role::ALL[(i / cfg.n_contexts) % 5]).collect();
    let context: Vec<usize> = (0..n).map(|i| i % cfg.n_contexts).collect();
    let mut pools = vec![Vec::new(); cfg.n_contexts * 5];
    for i in 0..n {
        pools[context[i] * 5 + role[i].index()].push(i);
    }

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut skill = vec![0.0; n];
    if cfg.role_symmetric {
        let deepest = pools.iter().map(Vec::len).max().unwrap_or(0);
        for c in 0..cfg.n_contexts {
            let z: Vec<f64> = (0..deepest).map(|_| normal.sample(&mut rng)).collect();
            for r in 0..5 {
                for (k, &p) in pools[c * 5 + r].iter().enumerate() {
                    skill[p] = cfg.offset(c) + cfg.skill_spread * z[k];
                }
            }
        }
    } else {
        for i in 0..n {
            skill[i] = cfg.offset(context[i]) + cfg.skill_spread * normal.sample(&mut rng);
        }
    }

    let players = (0..n)
        .map(|i| LatentPlayer { player_id: player_id(i), role: role[i], context_id: context_name(context[i]), skill: skill[i] })
        .collect();

    let mut sim = Sim { cfg, rng, skill, role, context, pools };
    let mut games = Vec::with_capacity(cfg.n_games());
    for step in 0..cfg.steps {
        let day = cfg.start + Duration::days(step as i64 * cfg.step_days);
        for j in 0..cfg.games_per_step {
            if cfg.transfer_rate > 0.0 && sim.rng.random::<f64>() < cfg.transfer_rate {
                sim.transfer();
            }
            let ts = day + Duration::minutes(j as i64);
            games.push(sim.game(format!("g{step:05}-{j:03}"), ts));
        }
    }
    Ok(SyntheticCorpus { games, players })
}

/// Rows drawn from a logistic model with standard normal inputs:
/// `P(y) = sigmoid(bias + weights . x)`.
pub fn logistic_dataset(n: usize, weights: &[f64], bias: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = weights.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
        let z = bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
        y.push(rng.random::<f64>() < sigmoid(z));
        x.push(row);
    }
    (x, y)
}

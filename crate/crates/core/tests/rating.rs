mod common;

use common::{game, oracle_pl};
use pscore_skill::ingest::Side;
use pscore_skill::rating::{
    pl_update, PlayerRatingState, Rating, RatingConfig, RatingState, RatingTarget, UpdateMode, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROSTER: [(&str, &str); 10] = [
    ("a0", "A"),
    ("a1", "A"),
    ("a2", "A"),
    ("a3", "A"),
    ("a4", "A"),
    ("b0", "B"),
    ("b1", "B"),
    ("b2", "B"),
    ("b3", "B"),
    ("b4", "B"),
];

#[test]
fn matches_oracle_with_ties() {
    let cfg = RatingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.random_range(2..=10);
        let mus: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..60.0)).collect();
        let sigmas: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..9.0)).collect();
        // Few distinct ranks so ties are common.
        let ranks: Vec<u32> = (0..n).map(|_| rng.random_range(1..=3)).collect();
        let entries: Vec<(Rating, u32)> = (0..n).map(|i| (Rating::new(mus[i], sigmas[i]), ranks[i])).collect();
        let got = pl_update(&entries, &cfg).unwrap();
        let want = oracle_pl(&mus, &sigmas, &ranks, cfg.beta, cfg.kappa);
        for (g, (m, s)) in got.iter().zip(want) {
            assert!((g.mu - m).abs() < 1e-9 && (g.sigma - s).abs() < 1e-9, "{g:?} vs ({m}, {s})");
        }
    }
}

#[test]
fn meta_update_golden() {
    // Contextual ratings (11, 3) and (7, 3), so theta = 2 and -2; both
    // contexts start at the prior. Reference values from an independent
    // script of the same update rules.
    let cfg = RatingConfig::default();
    let mut state = RatingState::new(cfg, UpdateMode::Ffa, Variant::Meta);
    for (pid, ctx) in ROSTER {
        let mut p = PlayerRatingState::new(pid, ctx, &cfg);
        p.contextual = if ctx == "A" { Rating::new(11.0, 3.0) } else { Rating::new(7.0, 3.0) };
        state.players.insert(pid.to_string(), p);
    }
    let g = game("g1", "2024-01-01T00:00:00Z", &ROSTER, Side::Blue);
    let scores = [90.0, 70.0, 50.0, 35.0, 15.0, 80.0, 60.0, 45.0, 25.0, 5.0];
    let update = state.process_game(&g, Some(&scores)).unwrap();

    assert_eq!(update.target, RatingTarget::Meta);
    let a = state.registry.get("A").unwrap();
    let b = state.registry.get("B").unwrap();
    assert!((a.mu - 25.279_617_401_037_815).abs() < 1e-9, "{a:?}");
    assert!((a.sigma - 8.268_948_625_111_943).abs() < 1e-9, "{a:?}");
    assert!((b.mu - 24.720_382_598_962_185).abs() < 1e-9, "{b:?}");
    assert!((b.sigma - 8.264_013_212_106_045).abs() < 1e-9, "{b:?}");
    // Contextual ratings are untouched by an inter-context game.
    for d in &update.deltas {
        assert_eq!(d.contextual_before, d.contextual_after);
    }
    assert_eq!(update.meta.len(), 2);
}

#[test]
fn intra_context_game_leaves_meta_alone() {
    let cfg = RatingConfig::default();
    let mut state = RatingState::new(cfg, UpdateMode::Ffa, Variant::Meta);
    let roster = ROSTER.map(|(p, _)| (p, "A"));
    let g = game("g1", "2024-01-01T00:00:00Z", &roster, Side::Red);
    let scores = [90.0, 70.0, 50.0, 35.0, 15.0, 80.0, 60.0, 45.0, 25.0, 5.0];
    let update = state.process_game(&g, Some(&scores)).unwrap();
    assert_eq!(update.target, RatingTarget::Contextual);
    assert!(update.meta.is_empty());
    assert_eq!(state.registry.get("A").unwrap_or(cfg.prior()), cfg.prior());
    // Fresh priors, best score first: the reference script gives 27.1213...
    let top = state.player("a0").unwrap().contextual;
    assert!((top.mu - 27.121_320_343_559_642).abs() < 1e-9);
    assert!((top.sigma - 8.324_843_727_554_72).abs() < 1e-9);
}

#[test]
fn losing_top_scorer_gains() {
    let cfg = RatingConfig::default();
    for variant in [Variant::Plain, Variant::Meta] {
        let mut state = RatingState::new(cfg, UpdateMode::Ffa, variant);
        let roster = ROSTER.map(|(p, _)| (p, "A"));
        let g = game("g1", "2024-01-01T00:00:00Z", &roster, Side::Blue);
        // r-side player b2 lost but scored highest.
        let scores = [60.0, 50.0, 40.0, 30.0, 20.0, 55.0, 45.0, 99.0, 35.0, 25.0];
        state.process_game(&g, Some(&scores)).unwrap();
        assert!(state.player("b2").unwrap().contextual.mu > cfg.mu0);
    }
}

#[test]
fn context_change_resets_sigma_before_the_game() {
    let cfg = RatingConfig::default();
    let mut state = RatingState::new(cfg, UpdateMode::Ffa, Variant::Meta);
    let scores = [90.0, 70.0, 50.0, 35.0, 15.0, 80.0, 60.0, 45.0, 25.0, 5.0];
    let home = ROSTER.map(|(p, _)| (p, "A"));
    for i in 0..3 {
        let g = game(&format!("g{i}"), &format!("2024-01-0{}T00:00:00Z", i + 1), &home, Side::Blue);
        state.process_game(&g, Some(&scores)).unwrap();
    }
    assert!(state.player("a0").unwrap().contextual.sigma < cfg.sigma0);
    let mut moved = home;
    moved[0] = ("a0", "B");
    let g = game("g9", "2024-02-01T00:00:00Z", &moved, Side::Blue);
    let update = state.process_game(&g, Some(&scores)).unwrap();
    let d = update.delta("a0").unwrap();
    assert!(d.context_reset);
    assert_eq!(d.contextual_before.sigma, cfg.sigma0);
    assert!(update.deltas.iter().filter(|d| d.player_id != "a0").all(|d| !d.context_reset));

    // The plain variant has no contexts to reset.
    let mut plain = RatingState::new(cfg, UpdateMode::Ffa, Variant::Plain);
    plain.process_game(&game("g0", "2024-01-01T00:00:00Z", &home, Side::Blue), Some(&scores)).unwrap();
    let update = plain.process_game(&g, Some(&scores)).unwrap();
    assert!(!update.delta("a0").unwrap().context_reset);
}

#[test]
fn team_mode_ignores_scores() {
    let cfg = RatingConfig::default();
    let mut state = RatingState::new(cfg, UpdateMode::TeamOutcome, Variant::Plain);
    let roster = ROSTER.map(|(p, _)| (p, "A"));
    state.process_game(&game("g1", "2024-01-01T00:00:00Z", &roster, Side::Red), None).unwrap();
    let winner = state.player("b0").unwrap().contextual;
    let loser = state.player("a0").unwrap().contextual;
    assert!(winner.mu > cfg.mu0 && loser.mu < cfg.mu0);
    assert!((winner.mu - cfg.mu0 + (loser.mu - cfg.mu0)).abs() < 1e-9);
}

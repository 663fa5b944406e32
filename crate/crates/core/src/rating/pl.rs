//! Weng-Lin Bayesian approximation of the Plackett-Luce ranking model.

use super::{Rating, RatingConfig, RatingError};
use crate::ingest::Side;

/// Updates teams of ratings after a ranked game. `ranks[i]` is the place of
/// team `i` (lower is better, equal ranks tie). Output mirrors input order.
///
/// For team `i` with summed mean `m_i` and variance `v_i`:
///
/// ```text
/// c      = sqrt(sum_t (v_t + beta^2))
/// C_q    = sum_{t : rank_t >= rank_q} exp(m_t / c)
/// A_q    = #{t : rank_t == rank_q}
/// p_iq   = exp(m_i / c) / C_q
/// Omega  = v_i / c       * sum_{q : rank_q <= rank_i} ([q == i] - p_iq) / A_q
/// Delta  = gamma * v_i / c^2 * sum_{q : rank_q <= rank_i} p_iq (1 - p_iq) / A_q
/// gamma  = sqrt(v_i) / c
/// ```
///
/// and each player `j` of team `i` moves by
/// `mu_j += s_j^2 / v_i * Omega`, `s_j *= sqrt(max(1 - s_j^2 / v_i * Delta, kappa))`.
pub fn rate_teams(teams: &[&[Rating]], ranks: &[u32], config: &RatingConfig) -> Result<Vec<Vec<Rating>>, RatingError> {
    if teams.len() < 2 {
        return Err(RatingError::TooFewEntries(teams.len()));
    }
    if ranks.len() != teams.len() {
        return Err(RatingError::RankCount { teams: teams.len(), ranks: ranks.len() });
    }
    for team in teams {
        if team.is_empty() {
            return Err(RatingError::EmptyTeam);
        }
        for r in *team {
            r.validate()?;
        }
    }

    let team_mu: Vec<f64> = teams.iter().map(|t| t.iter().map(|r| r.mu).sum()).collect();
    let team_var: Vec<f64> = teams.iter().map(|t| t.iter().map(|r| r.sigma * r.sigma).sum()).collect();
    let beta_sq = config.beta * config.beta;
    let c = team_var.iter().map(|v| v + beta_sq).sum::<f64>().sqrt();

    // exp(m / c) up to a common factor, which cancels in every p_iq.
    let shift = team_mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let strength: Vec<f64> = team_mu.iter().map(|m| ((m - shift) / c).exp()).collect();
    let n = teams.len();
    let sum_q: Vec<f64> = (0..n)
        .map(|q| (0..n).filter(|&t| ranks[t] >= ranks[q]).map(|t| strength[t]).sum())
        .collect();
    let a: Vec<f64> = (0..n)
        .map(|q| ranks.iter().filter(|&&r| r == ranks[q]).count() as f64)
        .collect();

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut omega = 0.0;
        let mut delta = 0.0;
        for q in (0..n).filter(|&q| ranks[q] <= ranks[i]) {
            let p = strength[i] / sum_q[q];
            delta += p * (1.0 - p) / a[q];
            omega += if q == i { (1.0 - p) / a[q] } else { -p / a[q] };
        }
        let v = team_var[i];
        omega *= v / c;
        let gamma = v.sqrt() / c;
        delta *= gamma * v / (c * c);

        out.push(
            teams[i]
                .iter()
                .map(|r| {
                    let share = r.sigma * r.sigma / v;
                    Rating {
                        mu: r.mu + share * omega,
                        sigma: r.sigma * (1.0 - share * delta).max(config.kappa).sqrt(),
                    }
                })
                .collect(),
        );
    }
    Ok(out)
}

/// Plackett-Luce update where every entry is a one-player team.
pub fn pl_update(entries: &[(Rating, u32)], config: &RatingConfig) -> Result<Vec<Rating>, RatingError> {
    let teams: Vec<[Rating; 1]> = entries.iter().map(|(r, _)| [*r]).collect();
    let refs: Vec<&[Rating]> = teams.iter().map(|t| &t[..]).collect();
    let ranks: Vec<u32> = entries.iter().map(|(_, k)| *k).collect();
    if ranks.contains(&0) {
        return Err(RatingError::ZeroRank);
    }
    Ok(rate_teams(&refs, &ranks, config)?.into_iter().map(|t| t[0]).collect())
}

/// Competition ranks (1 = best) by descending score. Neighbouring scores
/// within `tie_epsilon` share a rank.
pub fn ranks_from_scores(scores: &[f64], tie_epsilon: f64) -> Result<Vec<u32>, RatingError> {
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(RatingError::NonFinite);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut ranks = vec![0u32; scores.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = if pos > 0 && (scores[order[pos - 1]] - scores[idx]).abs() <= tie_epsilon {
            ranks[order[pos - 1]]
        } else {
            pos as u32 + 1
        };
    }
    Ok(ranks)
}

/// Free-for-all update: players ranked individually by performance score.
pub fn ffa_update(ratings: &[Rating], pscores: &[f64], config: &RatingConfig) -> Result<Vec<Rating>, RatingError> {
    if ratings.len() != pscores.len() {
        return Err(RatingError::PScoreCount { ratings: ratings.len(), pscores: pscores.len() });
    }
    let ranks = ranks_from_scores(pscores, config.tie_epsilon)?;
    let entries: Vec<(Rating, u32)> = ratings.iter().copied().zip(ranks).collect();
    pl_update(&entries, config)
}

/// Plain team-outcome update: two teams grouped by side, winners ranked first.
pub fn team_update(ratings: &[Rating], sides: &[Side], winner: Side, config: &RatingConfig) -> Result<Vec<Rating>, RatingError> {
    if ratings.len() != sides.len() {
        return Err(RatingError::PScoreCount { ratings: ratings.len(), pscores: sides.len() });
    }
    let members = |side: Side| -> (Vec<usize>, Vec<Rating>) {
        sides
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == side)
            .map(|(i, _)| (i, ratings[i]))
            .unzip()
    };
    let (win_idx, win_team) = members(winner);
    let (lose_idx, lose_team) = members(winner.opponent());
    let updated = rate_teams(&[&win_team, &lose_team], &[1, 2], config)?;
    let mut out = ratings.to_vec();
    for (idx, team) in [(win_idx, &updated[0]), (lose_idx, &updated[1])] {
        for (i, r) in idx.into_iter().zip(team) {
            out[i] = *r;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> RatingConfig {
        RatingConfig::default()
    }

    fn prior() -> Rating {
        Rating::new(25.0, 25.0 / 3.0)
    }

    #[test]
    fn tied_identical_priors_keep_mu() {
        let out = pl_update(&[(prior(), 1), (prior(), 1)], &cfg()).unwrap();
        for r in &out {
            assert!((r.mu - 25.0).abs() < 1e-9);
            assert!(r.sigma <= 25.0 / 3.0);
        }
    }

    #[test]
    fn winner_loser_antisymmetric() {
        let out = pl_update(&[(prior(), 1), (prior(), 2)], &cfg()).unwrap();
        let dw = out[0].mu - 25.0;
        let dl = out[1].mu - 25.0;
        assert!(dw > 0.0);
        assert!((dw + dl).abs() < 1e-9);
        assert!(out.iter().all(|r| r.sigma < 25.0 / 3.0));
    }

    #[test]
    fn ten_way_ordering() {
        let entries: Vec<(Rating, u32)> = (1..=10).map(|k| (prior(), k)).collect();
        let out = pl_update(&entries, &cfg()).unwrap();
        assert!(out.windows(2).all(|w| w[0].mu > w[1].mu));
    }

    #[test]
    fn too_few_entries() {
        assert!(matches!(pl_update(&[(prior(), 1)], &cfg()), Err(RatingError::TooFewEntries(1))));
    }

    #[test]
    fn non_finite_rejected() {
        let bad = Rating { mu: f64::NAN, sigma: 1.0 };
        assert!(pl_update(&[(bad, 1), (prior(), 2)], &cfg()).is_err());
        assert!(ffa_update(&[prior(), prior()], &[f64::INFINITY, 1.0], &cfg()).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks_from_scores(&[10.0, 30.0, 20.0, 30.0], 1e-9).unwrap(), vec![4, 1, 3, 1]);
        assert_eq!(ranks_from_scores(&[5.0, 5.0 + 1e-12], 1e-9).unwrap(), vec![1, 1]);
    }

    #[test]
    fn full_tie_ffa_keeps_mu() {
        let ratings = vec![prior(); 10];
        let out = ffa_update(&ratings, &[42.0; 10], &cfg()).unwrap();
        assert!(out.iter().all(|r| (r.mu - 25.0).abs() < 1e-9));
    }

    #[test]
    fn ffa_order_follows_pscore() {
        let ratings = vec![prior(); 10];
        let scores = [12.0, 95.0, 40.0, 3.0, 77.0, 56.0, 61.0, 20.0, 88.0, 33.0];
        let out = ffa_update(&ratings, &scores, &cfg()).unwrap();
        let mut by_score: Vec<usize> = (0..10).collect();
        by_score.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        let mut by_mu: Vec<usize> = (0..10).collect();
        by_mu.sort_by(|&a, &b| out[b].mu.total_cmp(&out[a].mu));
        assert_eq!(by_score, by_mu);
        assert!(out[1].mu - 25.0 >= out.iter().map(|r| r.mu - 25.0).fold(f64::MIN, f64::max) - 1e-12);
    }

    #[test]
    fn team_update_moves_teams_apart() {
        let ratings = vec![prior(); 10];
        let sides: Vec<Side> = (0..10).map(|i| if i < 5 { Side::Blue } else { Side::Red }).collect();
        let out = team_update(&ratings, &sides, Side::Red, &cfg()).unwrap();
        assert!(out[..5].iter().all(|r| r.mu < 25.0));
        assert!(out[5..].iter().all(|r| r.mu > 25.0));
        assert!((out[0].mu - out[4].mu).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn update_invariants(
            raw in proptest::collection::vec((0.0f64..50.0, 0.5f64..10.0, 1u32..6), 2..11)
        ) {
            let entries: Vec<(Rating, u32)> = raw.iter().map(|&(m, s, k)| (Rating::new(m, s), k)).collect();
            let out = pl_update(&entries, &cfg()).unwrap();
            prop_assert_eq!(out.len(), entries.len());
            let best = entries.iter().map(|e| e.1).min().unwrap();
            let worst = entries.iter().map(|e| e.1).max().unwrap();
            for ((before, rank), after) in entries.iter().zip(&out) {
                prop_assert!(after.sigma <= before.sigma);
                prop_assert!(after.sigma > 0.0);
                if best != worst && *rank == best && entries.iter().filter(|e| e.1 == best).count() == 1 {
                    prop_assert!(after.mu >= before.mu);
                }
                if best != worst && *rank == worst && entries.iter().filter(|e| e.1 == worst).count() == 1 {
                    prop_assert!(after.mu <= before.mu);
                }
            }
        }
    }
}

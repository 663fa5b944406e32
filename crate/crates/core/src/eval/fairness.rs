//! Distances between per-role rating distributions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::ingest::Role;

/// One-dimensional Wasserstein-1 distance between two empirical
/// distributions: the integral of `|F_a^-1(u) - F_b^-1(u)|` over `u` in
/// `[0, 1]` with step quantile functions. For equal sizes this is the mean
/// absolute difference of matched order statistics.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("wasserstein sample"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut total = 0.0;
    while i < na && j < nb {
        // Next breakpoint is min((i+1)/na, (j+1)/nb), compared exactly.
        let lhs = (i + 1) * nb;
        let rhs = (j + 1) * na;
        let next = if lhs <= rhs { (i + 1) as f64 / na as f64 } else { (j + 1) as f64 / nb as f64 };
        total += (next - prev) * (a[i] - b[j]).abs();
        prev = next;
        if lhs <= rhs {
            i += 1;
        }
        if rhs <= lhs {
            j += 1;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolePairDistance {
    pub a: Role,
    pub b: Role,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    /// Mean over all unordered pairs of the retained roles.
    pub mean_distance: f64,
    pub pairs: Vec<RolePairDistance>,
    /// Roles left out for having fewer than two players.
    pub excluded: Vec<Role>,
}

/// Mean pairwise W1 between the rating samples of each role.
pub fn role_fairness(by_role: &BTreeMap<Role, Vec<f64>>) -> Result<FairnessReport, EvalError> {
    let mut excluded = Vec::new();
    let mut kept = Vec::new();
    for role in Role::ALL {
        match by_role.get(&role) {
            Some(v) if v.len() >= 2 => kept.push((role, v)),
            _ => {
                log::warn!("role fairness: {role} has fewer than 2 players, excluded");
                excluded.push(role);
            }
        }
    }
    if kept.len() < 2 {
        return Err(EvalError::TooFewRoles(kept.len()));
    }
    let mut pairs = Vec::new();
    for x in 0..kept.len() {
        for y in x + 1..kept.len() {
            pairs.push(RolePairDistance { a: kept[x].0, b: kept[y].0, distance: wasserstein_1d(kept[x].1, kept[y].1)? });
        }
    }
    let mean_distance = pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64;
    Ok(FairnessReport { mean_distance, pairs, excluded })
}

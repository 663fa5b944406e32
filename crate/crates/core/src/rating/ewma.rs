use std::collections::BTreeMap;

pub const EWMA_ALPHA: f64 = 0.05;

/// Exponentially weighted moving average; the first observation seeds it.
pub fn ewma_update(prev: Option<f64>, pscore: f64, alpha: f64) -> f64 {
    match prev {
        None => pscore,
        Some(p) => alpha * pscore + (1.0 - alpha) * p,
    }
}

/// Baseline rating: smoothed PScore history per player.
#[derive(Debug, Clone, PartialEq)]
pub struct EwmaTracker {
    pub alpha: f64,
    values: BTreeMap<String, f64>,
}

impl Default for EwmaTracker {
    fn default() -> Self {
        EwmaTracker::new(EWMA_ALPHA)
    }
}

impl EwmaTracker {
    /// Value reported for players with no history: the PScore median.
    pub const UNSEEN: f64 = 50.0;

    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
        EwmaTracker { alpha, values: BTreeMap::new() }
    }

    pub fn value(&self, player_id: &str) -> f64 {
        self.values.get(player_id).copied().unwrap_or(Self::UNSEEN)
    }

    pub fn observe(&mut self, player_id: &str, pscore: f64) -> f64 {
        let v = ewma_update(self.values.get(player_id).copied(), pscore, self.alpha);
        self.values.insert(player_id.to_string(), v);
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_then_smooths() {
        assert_eq!(ewma_update(None, 70.0, EWMA_ALPHA), 70.0);
        assert!((ewma_update(Some(50.0), 100.0, 0.05) - 52.5).abs() < 1e-12);
    }

    #[test]
    fn constant_stream_is_fixed_point() {
        let mut t = EwmaTracker::default();
        for _ in 0..100 {
            t.observe("p", 42.0);
        }
        assert!((t.value("p") - 42.0).abs() < 1e-12);
        assert_eq!(t.value("q"), 50.0);
    }
}

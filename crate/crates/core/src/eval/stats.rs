//! Rank statistics used to compare ratings with latent skills.

/// Ranks starting at 1; ties get the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Spearman rank correlation; `None` for fewer than two points or a
/// constant input.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Kolmogorov-Smirnov distance between a sample and Uniform(lo, hi).
pub fn ks_uniform(sample: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Share of player pairs from different groups that `estimate` orders like
/// `truth`. Pairs with equal truth are skipped; equal estimates count half.
pub fn cross_group_concordance(estimate: &[f64], truth: &[f64], group: &[&str]) -> Option<f64> {
    let mut agree = 0.0;
    let mut total = 0usize;
    for i in 0..estimate.len() {
        for j in i + 1..estimate.len() {
            if group[i] == group[j] || truth[i] == truth[j] {
                continue;
            }
            total += 1;
            let e = estimate[i] - estimate[j];
            if e == 0.0 {
                agree += 0.5;
            } else if (e > 0.0) == (truth[i] > truth[j]) {
                agree += 1.0;
            }
        }
    }
    (total > 0).then(|| agree / total as f64)
}

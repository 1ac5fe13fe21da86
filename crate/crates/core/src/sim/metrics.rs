use crate::error::{Error, Result};

/// Fraction of p-values at or below `alpha`.
pub fn rejection_rate(p_values: &[f64], alpha: f64) -> f64 {
    if p_values.is_empty() {
        return 0.0;
    }
    p_values.iter().filter(|&&p| p <= alpha).count() as f64 / p_values.len() as f64
}

/// Empirical CDF of `p_values` on `points + 1` equally spaced grid values
/// in `[0, 1]`.
pub fn ecdf_grid(p_values: &[f64], points: usize) -> Vec<(f64, f64)> {
    let mut sorted = p_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    (0..=points)
        .map(|k| {
            let t = k as f64 / points as f64;
            let below = sorted.partition_point(|&p| p <= t);
            (t, below as f64 / n)
        })
        .collect()
}

/// `sup_t (F_n(t) − t)`: how far the p-values sit above the uniform CDF.
/// Zero or negative means stochastically no smaller than uniform.
pub fn ks_excess_over_uniform(p_values: &[f64]) -> f64 {
    let mut sorted = p_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1) as f64 / n - p)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Area under the ROC curve with p-values as scores (smaller is more
/// alarming): the fraction of (alt, null) pairs with `p_alt < p_null`, ties
/// counting one half.
pub fn auroc(null_scores: &[f64], alt_scores: &[f64]) -> Result<f64> {
    if null_scores.is_empty() || alt_scores.is_empty() {
        return Err(Error::InvalidArgument("AUROC needs both score sets".into()));
    }
    let mut null = null_scores.to_vec();
    null.sort_by(f64::total_cmp);
    let mut wins = 0.0;
    for &a in alt_scores {
        let le = null.partition_point(|&p| p <= a);
        let lt = null.partition_point(|&p| p < a);
        wins += (null.len() - le) as f64 + 0.5 * (le - lt) as f64;
    }
    Ok(wins / (null.len() as f64 * alt_scores.len() as f64))
}

/// ROC curve `(false positive rate, true positive rate)` over every
/// distinct threshold, from `(0, 0)` to `(1, 1)`.
pub fn roc_points(null_scores: &[f64], alt_scores: &[f64]) -> Vec<(f64, f64)> {
    let mut null = null_scores.to_vec();
    let mut alt = alt_scores.to_vec();
    null.sort_by(f64::total_cmp);
    alt.sort_by(f64::total_cmp);
    let mut thresholds: Vec<f64> = null.iter().chain(&alt).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let (nn, na) = (null.len().max(1) as f64, alt.len().max(1) as f64);
    let mut out = vec![(0.0, 0.0)];
    for t in thresholds {
        let fpr = null.partition_point(|&p| p <= t) as f64 / nn;
        let tpr = alt.partition_point(|&p| p <= t) as f64 / na;
        out.push((fpr, tpr));
    }
    if out.last() != Some(&(1.0, 1.0)) {
        out.push((1.0, 1.0));
    }
    out
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// Central hypergeometric pmf of the (left, left) cell given a first-row
/// margin `row`, a first-column margin `col` and a table total `total`:
/// `C(row, a) C(total − row, col − a) / C(total, col)`; zero off the
/// support.
pub fn hypergeom_pmf(a: u64, row: u64, col: u64, total: u64) -> Result<f64> {
    if row > total || col > total {
        return Err(Error::InfeasibleMargins(format!(
            "margins ({row}, {col}) exceed total {total}"
        )));
    }
    let lo = (row + col).saturating_sub(total);
    let hi = row.min(col);
    if a < lo || a > hi {
        return Ok(0.0);
    }
    Ok((ln_choose(row, a) + ln_choose(total - row, col - a) - ln_choose(total, col)).exp())
}

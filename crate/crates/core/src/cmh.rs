//! CMH statistic on a `2 × 2 × T` table, the χ²₁ survival function, and
//! Mantel–Haenszel effect estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabulate::WindowTable;

/// Half-width multiplier of the reported 95% interval.
pub const CI_Z: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmhResult {
    /// Signed statistic `M`; positive when the (left, left) cell exceeds
    /// its conditional expectation.
    pub statistic_m: f64,
    pub statistic_m2: f64,
    pub p_value: f64,
    /// Strata with positive conditional variance.
    pub strata_used: usize,
    /// Set when no stratum carries variance; then `M = 0` and `p = 1`.
    pub degenerate: bool,
}

impl CmhResult {
    /// Level-`alpha` decision: reject when `M² > χ²_{1, 1−α}`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Survival function of χ²₁: `erfc(√(x/2))`.
pub fn chi2_sf_1df(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "chi-square argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(chi2_sf_unchecked(x))
}

#[inline]
pub(crate) fn chi2_sf_unchecked(x: f64) -> f64 {
    libm::erfc((0.5 * x).sqrt()).clamp(0.0, 1.0)
}

pub fn cmh_statistic(table: &WindowTable) -> CmhResult {
    let mut deviation = 0.0;
    let mut variance = 0.0;
    let mut used = 0;
    for &[a, b, c, d] in table.cells() {
        let n = f64::from(a + b + c + d);
        if n <= 1.0 {
            continue;
        }
        let row = f64::from(a + b);
        let col = f64::from(a + c);
        let var_t = row * (n - row) * col * (n - col) / (n * n * (n - 1.0));
        if var_t <= 0.0 {
            continue;
        }
        deviation += f64::from(a) - row * col / n;
        variance += var_t;
        used += 1;
    }
    if variance <= 0.0 {
        return CmhResult {
            statistic_m: 0.0,
            statistic_m2: 0.0,
            p_value: 1.0,
            strata_used: 0,
            degenerate: true,
        };
    }
    let statistic_m2 = deviation * deviation / variance;
    CmhResult {
        statistic_m: deviation / variance.sqrt(),
        statistic_m2,
        p_value: chi2_sf_unchecked(statistic_m2),
        strata_used: used,
        degenerate: false,
    }
}

/// How far `Σ a_t` can move from `Σ μ_t` in the less roomy direction, given
/// the margins. Mantel's rule of thumb asks for at least 5.
pub fn deviation_capacity(table: &WindowTable) -> f64 {
    let (mut up, mut down) = (0.0, 0.0);
    for &[a, b, c, d] in table.cells() {
        let n = a + b + c + d;
        if n == 0 {
            continue;
        }
        let (row, col) = (a + b, a + c);
        let mu = f64::from(row) * f64::from(col) / f64::from(n);
        up += f64::from(row.min(col)) - mu;
        down += mu - f64::from((row + col).saturating_sub(n));
    }
    f64::min(up, down)
}

struct MhSums {
    r: f64,
    s: f64,
    pr: f64,
    ps_qr: f64,
    qs: f64,
}

fn mh_sums(table: &WindowTable) -> MhSums {
    let mut m = MhSums {
        r: 0.0,
        s: 0.0,
        pr: 0.0,
        ps_qr: 0.0,
        qs: 0.0,
    };
    for &[a, b, c, d] in table.cells() {
        let n = f64::from(a + b + c + d);
        if n == 0.0 {
            continue;
        }
        let (a, b, c, d) = (f64::from(a), f64::from(b), f64::from(c), f64::from(d));
        let p = (a + d) / n;
        let q = (b + c) / n;
        let r = a * d / n;
        let s = b * c / n;
        m.r += r;
        m.s += s;
        m.pr += p * r;
        m.ps_qr += p * s + q * r;
        m.qs += q * s;
    }
    m
}

/// Mantel–Haenszel common log odds ratio `log(Σ a d / n ÷ Σ b c / n)`.
/// Returns `-∞` when the numerator sum is zero, `+∞` when the denominator
/// sum is zero, and an error when both are.
pub fn mh_common_log_or(table: &WindowTable) -> Result<f64> {
    let m = mh_sums(table);
    match (m.r > 0.0, m.s > 0.0) {
        (true, true) => Ok((m.r / m.s).ln()),
        (false, true) => Ok(f64::NEG_INFINITY),
        (true, false) => Ok(f64::INFINITY),
        (false, false) => Err(Error::UndefinedOddsRatio),
    }
}

/// Variance of the Mantel–Haenszel log odds ratio that stays consistent
/// both with many sparse strata and with few large ones:
///
/// `ΣPR/(2(ΣR)²) + Σ(PS+QR)/(2 ΣR ΣS) + ΣQS/(2(ΣS)²)`
///
/// with `P = (a+d)/n`, `Q = (b+c)/n`, `R = ad/n`, `S = bc/n`.
pub fn mh_variance(table: &WindowTable) -> Result<f64> {
    let m = mh_sums(table);
    if m.r <= 0.0 {
        return Err(Error::ZeroAggregate("R"));
    }
    if m.s <= 0.0 {
        return Err(Error::ZeroAggregate("S"));
    }
    Ok(m.pr / (2.0 * m.r * m.r) + m.ps_qr / (2.0 * m.r * m.s) + m.qs / (2.0 * m.s * m.s))
}

/// Stratum log odds ratio with 0.5 added to every cell.
pub fn stratum_log_or(cells: [u32; 4]) -> f64 {
    let [a, b, c, d] = cells.map(|v| f64::from(v) + 0.5);
    (a * d / (b * c)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaStatus {
    Finite,
    PositiveInfinite,
    NegativeInfinite,
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    /// Common log odds ratio; `None` when both Mantel–Haenszel sums vanish.
    pub theta_hat: Option<f64>,
    pub status: ThetaStatus,
    pub sigma_hat: Option<f64>,
    /// `theta_hat ± 1.96 sigma_hat`, present when both are finite.
    pub ci: Option<(f64, f64)>,
    pub stratum_thetas: Vec<f64>,
}

pub fn effect_estimate(table: &WindowTable) -> EffectEstimate {
    let stratum_thetas = table.cells().iter().map(|&c| stratum_log_or(c)).collect();
    let (theta_hat, status) = match mh_common_log_or(table) {
        Ok(t) if t == f64::INFINITY => (Some(t), ThetaStatus::PositiveInfinite),
        Ok(t) if t == f64::NEG_INFINITY => (Some(t), ThetaStatus::NegativeInfinite),
        Ok(t) => (Some(t), ThetaStatus::Finite),
        Err(_) => (None, ThetaStatus::Undefined),
    };
    let sigma_hat = match status {
        ThetaStatus::Finite => mh_variance(table).ok().map(f64::sqrt),
        _ => None,
    };
    let ci = match (theta_hat, sigma_hat) {
        (Some(t), Some(s)) => Some((t - CI_Z * s, t + CI_Z * s)),
        _ => None,
    };
    EffectEstimate {
        theta_hat,
        status,
        sigma_hat,
        ci,
        stratum_thetas,
    }
}

use serde::{Deserialize, Serialize};

/// `1 − (1 − p)^m`, evaluated as `−expm1(m · ln1p(−p))` so that tiny `p`
/// keep their relative precision.
pub fn sidak_combine(min_p: f64, m: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&min_p));
    debug_assert!(m >= 1);
    if m == 1 || min_p >= 1.0 {
        return min_p;
    }
    (-(m as f64 * (-min_p).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

/// Per-window level `1 − (1 − α)^{1 / (R · U(k) · L(l1, l2))}` where `R` is
/// the number of resolutions.
pub fn adjusted_alpha(alpha: f64, resolutions_total: usize, u_k: usize, l_l1l2: usize) -> f64 {
    let m = (resolutions_total * u_k * l_l1l2) as f64;
    -((-alpha).ln_1p() / m).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub l1: usize,
    pub l2: usize,
    /// Partition-wise p-value; absent when no window was screened in.
    pub p: Option<f64>,
    /// Number of screened windows `L(l1, l2)`.
    #[serde(rename = "L")]
    pub valid_windows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionResult {
    pub k: usize,
    pub p_k: Option<f64>,
    /// Number of partitions with a p-value, `U(k)`.
    #[serde(rename = "U")]
    pub valid_partitions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub partitions: Vec<PartitionResult>,
    pub resolutions: Vec<ResolutionResult>,
    pub overall_p: f64,
    pub no_valid_window: bool,
}

impl Ladder {
    pub fn resolutions_total(k1: usize, k2: usize) -> usize {
        (k1 + k2).saturating_sub(1)
    }

    /// Partitions `(l1, l2)` of resolution `k` for trees of depth `(k1, k2)`,
    /// in ascending `l1`.
    pub fn partitions_of(k: usize, k1: usize, k2: usize) -> impl Iterator<Item = (usize, usize)> {
        let lo = k.saturating_sub(k2 - 1);
        let hi = (k1 - 1).min(k);
        (lo..=hi).map(move |l1| (l1, k - l1))
    }

    /// Runs the three Šidák stages. `windows` yields `(l1, l2, p)` with
    /// `p = None` for windows that were screened out; order is irrelevant.
    pub fn build(
        k1: usize,
        k2: usize,
        windows: impl IntoIterator<Item = (usize, usize, Option<f64>)>,
    ) -> Ladder {
        if k1 == 0 || k2 == 0 {
            return Ladder {
                partitions: Vec::new(),
                resolutions: Vec::new(),
                overall_p: 1.0,
                no_valid_window: true,
            };
        }
        // per (l1, l2): (min p, count)
        let mut acc = vec![(1.0f64, 0usize); k1 * k2];
        for (l1, l2, p) in windows {
            if let Some(p) = p {
                let slot = &mut acc[l1 * k2 + l2];
                slot.0 = slot.0.min(p);
                slot.1 += 1;
            }
        }

        let total = Self::resolutions_total(k1, k2);
        let mut partitions = Vec::new();
        let mut resolutions = Vec::with_capacity(total);
        let mut overall_min: Option<f64> = None;
        for k in 0..total {
            let mut res_min: Option<f64> = None;
            let mut valid = 0;
            for (l1, l2) in Self::partitions_of(k, k1, k2) {
                let (min_p, count) = acc[l1 * k2 + l2];
                let p = (count > 0).then(|| sidak_combine(min_p, count));
                if let Some(p) = p {
                    valid += 1;
                    res_min = Some(res_min.map_or(p, |m: f64| m.min(p)));
                }
                partitions.push(PartitionResult {
                    l1,
                    l2,
                    p,
                    valid_windows: count,
                });
            }
            let p_k = res_min.map(|m| sidak_combine(m, valid));
            if let Some(p) = p_k {
                overall_min = Some(overall_min.map_or(p, |m: f64| m.min(p)));
            }
            resolutions.push(ResolutionResult {
                k,
                p_k,
                valid_partitions: valid,
            });
        }
        Ladder {
            partitions,
            resolutions,
            overall_p: overall_min.map_or(1.0, |m| sidak_combine(m, total)),
            no_valid_window: overall_min.is_none(),
        }
    }
}

//! The multiscale scan: enumerate windows from coarse to fine, screen out
//! sparse ones, stratify each remaining window on its own `Z` rows, test it
//! with CMH and combine through the Šidák ladder.

mod ladder;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ladder::{adjusted_alpha, sidak_combine, Ladder, PartitionResult, ResolutionResult};

use crate::cmh::{cmh_statistic, effect_estimate, ThetaStatus};
use crate::error::{Error, Result};
use crate::stratify::{ceil_log2, medtree, target_strata_count, ZRanks};
use crate::tabulate::{tabulate_unchecked, Arity, Dataset, Window, WindowGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Desired samples per stratum.
    pub eta: usize,
    /// Cap on tree depth.
    pub k_max: usize,
    /// Minimum window count.
    pub v_all: usize,
    /// Minimum of each aggregated window margin.
    pub v_margin: usize,
    pub alpha: f64,
    /// Optional lower bound on the number of strata per window.
    pub strata_floor: Option<usize>,
    /// Fixed `(k1, k2)` instead of the data-driven rule.
    pub depths: Option<(usize, usize)>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            eta: 10,
            k_max: 7,
            v_all: 20,
            v_margin: 10,
            alpha: 0.05,
            strata_floor: None,
            depths: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.eta < 1 {
            return bad("eta must be at least 1");
        }
        if self.k_max < 1 {
            return bad("k_max must be at least 1");
        }
        if self.v_margin < 1 || self.v_all < self.v_margin {
            return bad("need v_all >= v_margin >= 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if let Some((k1, k2)) = self.depths {
            if k1 < 1 || k2 < 1 {
                return bad("depth overrides must be at least 1");
            }
        }
        Ok(())
    }
}

/// Tree depths: `min(k_max, max(1, ⌈log₂(n / v_margin)⌉))` per continuous
/// axis, 1 for binary axes, unless overridden.
pub fn choose_depths(
    n: usize,
    x_arity: Arity,
    y_arity: Arity,
    config: &ScanConfig,
) -> (usize, usize) {
    if let Some(d) = config.depths {
        return d;
    }
    // smallest k with v_margin · 2^k ≥ n
    let mut k = 0;
    while config.v_margin.saturating_mul(1usize << k) < n && k < 63 {
        k += 1;
    }
    let k = k.clamp(1, config.k_max);
    let pick = |a: Arity| if a == Arity::Binary { 1 } else { k };
    (pick(x_arity), pick(y_arity))
}

/// Screening rule `V(I, J)` on the window's quadrant counts summed over
/// strata (`[a, b, c, d]` as in [`crate::WindowTable`]).
pub fn screen(quadrants: [u64; 4], config: &ScanConfig) -> bool {
    let [a, b, c, d] = quadrants;
    let n = a + b + c + d;
    let v = config.v_margin as u64;
    n >= config.v_all as u64 && a + b >= v && c + d >= v && a + c >= v && b + d >= v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub l1: usize,
    pub l2: usize,
    pub pos_i: usize,
    pub pos_j: usize,
    /// `n_IJ`.
    pub n: usize,
    /// Quadrant counts `[a, b, c, d]` summed over strata.
    pub counts: [u64; 4],
    pub screened: bool,
    /// Number of strata `T_IJ` (0 when screened out).
    #[serde(rename = "T")]
    pub strata: usize,
    pub p: Option<f64>,
    /// Signed CMH statistic.
    pub m: Option<f64>,
    pub alpha_n: Option<f64>,
    pub significant: bool,
    pub theta_hat: Option<f64>,
    pub theta_status: Option<ThetaStatus>,
    pub sigma_hat: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub stratum_thetas: Vec<f64>,
}

impl WindowResult {
    pub fn window(&self) -> Window {
        Window {
            l1: self.l1,
            pos_i: self.pos_i,
            l2: self.l2,
            pos_j: self.pos_j,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub overall_p: f64,
    pub no_valid_window: bool,
    pub depths: (usize, usize),
    pub config: ScanConfig,
    pub resolutions: Vec<ResolutionResult>,
    pub partitions: Vec<PartitionResult>,
    /// Every window, ordered by resolution, then partition (`l1`
    /// ascending), then position.
    pub windows: Vec<WindowResult>,
}

impl ScanReport {
    pub fn significant_windows(&self) -> impl Iterator<Item = &WindowResult> {
        self.windows.iter().filter(|w| w.significant)
    }

    /// Reruns the ladder from the stored window p-values.
    pub fn recompute_ladder(&self) -> Ladder {
        let (k1, k2) = self.depths;
        Ladder::build(
            k1,
            k2,
            self.windows
                .iter()
                .map(|w| (w.l1, w.l2, if w.screened { w.p } else { None })),
        )
    }

    pub fn resolutions_total(&self) -> usize {
        Ladder::resolutions_total(self.depths.0, self.depths.1)
    }
}

/// Runs the scan on the current rayon pool. The report does not depend on
/// the number of worker threads.
pub fn scan(data: &Dataset, config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let (k1, k2) = choose_depths(data.len(), data.x_arity(), data.y_arity(), config);
    let grid = WindowGrid::new(data, k1, k2);
    let (k1, k2) = grid.depths();

    let t_max = target_strata_count(data.len(), config.eta, config.strata_floor);
    let zr = ZRanks::leading(data, ceil_log2(t_max));

    // screening pass over every partition, in canonical order
    let mut windows: Vec<WindowResult> = Vec::new();
    let mut jobs: Vec<(usize, Vec<u32>)> = Vec::new();
    if k1 > 0 && k2 > 0 {
        for k in 0..Ladder::resolutions_total(k1, k2) {
            for (l1, l2) in Ladder::partitions_of(k, k1, k2) {
                screen_partition(&grid, l1, l2, config, &mut windows, &mut jobs);
            }
        }
    }

    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|(w, idx)| {
            let window = windows[*w].window();
            let t = target_strata_count(idx.len(), config.eta, config.strata_floor);
            let strat = medtree(&zr, idx, config.eta, Some(t));
            let table = tabulate_unchecked(&grid, &window, &strat.strata);
            (strat.len(), cmh_statistic(&table), effect_estimate(&table))
        })
        .collect();
    for ((w, _), (t, cmh, effect)) in jobs.iter().zip(outcomes) {
        let r = &mut windows[*w];
        r.strata = t;
        r.p = Some(cmh.p_value);
        r.m = Some(cmh.statistic_m);
        r.theta_hat = effect.theta_hat;
        r.theta_status = Some(effect.status);
        r.sigma_hat = effect.sigma_hat;
        r.ci = effect.ci;
        r.stratum_thetas = effect.stratum_thetas;
    }

    let ladder = Ladder::build(k1, k2, windows.iter().map(|w| (w.l1, w.l2, w.p)));
    if !ladder.no_valid_window {
        let total = Ladder::resolutions_total(k1, k2);
        let l_of = |l1: usize, l2: usize| {
            ladder
                .partitions
                .iter()
                .find(|p| p.l1 == l1 && p.l2 == l2)
                .map_or(0, |p| p.valid_windows)
        };
        for w in windows.iter_mut().filter(|w| w.screened) {
            let u = ladder.resolutions[w.l1 + w.l2].valid_partitions;
            let a = adjusted_alpha(config.alpha, total, u, l_of(w.l1, w.l2));
            w.alpha_n = Some(a);
            w.significant = w.p.is_some_and(|p| p <= a);
        }
    }

    Ok(ScanReport {
        overall_p: ladder.overall_p,
        no_valid_window: ladder.no_valid_window,
        depths: (k1, k2),
        config: config.clone(),
        resolutions: ladder.resolutions,
        partitions: ladder.partitions,
        windows,
    })
}

/// Runs [`scan`] on a dedicated pool of `workers` threads.
pub fn scan_with_workers(
    data: &Dataset,
    config: &ScanConfig,
    workers: usize,
) -> Result<ScanReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| scan(data, config))
}

fn screen_partition(
    grid: &WindowGrid,
    l1: usize,
    l2: usize,
    config: &ScanConfig,
    windows: &mut Vec<WindowResult>,
    jobs: &mut Vec<(usize, Vec<u32>)>,
) {
    let xa = grid.x_tree().assignment(l1);
    let ya = grid.y_tree().assignment(l2);
    let n = grid.sample_count();
    let buckets = 1usize << (l1 + l2);
    let key = |i: usize| ((xa[i] as usize) << l2) | ya[i] as usize;

    // stable counting sort of samples by window
    let mut start = vec![0usize; buckets + 1];
    for i in 0..n {
        start[key(i) + 1] += 1;
    }
    for b in 0..buckets {
        start[b + 1] += start[b];
    }
    let mut fill = start.clone();
    let mut order = vec![0u32; n];
    for i in 0..n {
        let k = key(i);
        order[fill[k]] = i as u32;
        fill[k] += 1;
    }

    for window in grid.partition_windows(l1, l2) {
        let b = (window.pos_i << l2) | window.pos_j;
        let members = &order[start[b]..start[b + 1]];
        let mut counts = [0u64; 4];
        for &i in members {
            counts[grid.quadrant(&window, i as usize)] += 1;
        }
        let screened = screen(counts, config);
        if screened {
            jobs.push((windows.len(), members.to_vec()));
        }
        windows.push(WindowResult {
            l1,
            l2,
            pos_i: window.pos_i,
            pos_j: window.pos_j,
            n: members.len(),
            counts,
            screened,
            strata: 0,
            p: None,
            m: None,
            alpha_n: None,
            significant: false,
            theta_hat: None,
            theta_status: None,
            sigma_hat: None,
            ci: None,
            stratum_thetas: Vec::new(),
        });
    }
}

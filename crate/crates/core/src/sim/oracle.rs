use rand::seq::SliceRandom;
use rand::Rng;

use super::metrics::hypergeom_pmf;
use crate::cmh::{chi2_sf_1df, cmh_statistic};
use crate::error::Result;
use crate::stratify::Stratification;
use crate::tabulate::{Window, WindowGrid, WindowTable};

/// Conditional-null resampler: within every stratum the Y values are
/// permuted among the stratum's samples, which keeps each stratum's X
/// counts and Y counts fixed. Samples outside every stratum keep their Y.
///
/// Tables are retabulated from the permuted Y-tree assignments, so window
/// membership along Y follows the permuted values.
#[derive(Debug, Clone)]
pub struct PermutationOracle<'a> {
    grid: &'a WindowGrid,
    groups: Vec<Vec<u32>>,
    label: Vec<Option<u32>>,
}

impl<'a> PermutationOracle<'a> {
    pub fn new(grid: &'a WindowGrid, strat: &Stratification) -> Self {
        let mut label = vec![None; grid.sample_count()];
        let groups: Vec<Vec<u32>> = strat.strata.iter().map(|s| s.indices.clone()).collect();
        for (t, g) in groups.iter().enumerate() {
            for &i in g {
                label[i as usize] = Some(t as u32);
            }
        }
        PermutationOracle {
            grid,
            groups,
            label,
        }
    }

    pub fn strata_count(&self) -> usize {
        self.groups.len()
    }

    /// Identity permutation.
    pub fn identity(&self) -> Vec<u32> {
        (0..self.label.len() as u32).collect()
    }

    /// Draws `perm` with `perm[i]` the sample whose Y value sample `i`
    /// receives. `perm[i]` always lies in the stratum of `i`.
    pub fn resample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let mut perm = self.identity();
        let mut buf = Vec::new();
        for g in &self.groups {
            buf.clear();
            buf.extend_from_slice(g);
            buf.shuffle(rng);
            for (&i, &j) in g.iter().zip(&buf) {
                perm[i as usize] = j;
            }
        }
        perm
    }

    /// Window table under `perm`, one row per oracle stratum.
    pub fn tabulate(&self, w: &Window, perm: &[u32]) -> WindowTable {
        let xt = self.grid.x_tree();
        let yt = self.grid.y_tree();
        let mut cells = vec![[0u32; 4]; self.groups.len()];
        for (i, lab) in self.label.iter().enumerate() {
            let Some(t) = *lab else { continue };
            let j = perm[i] as usize;
            if xt.position_of(w.l1, i) != w.pos_i || yt.position_of(w.l2, j) != w.pos_j {
                continue;
            }
            let qx = xt.position_of(w.l1 + 1, i) & 1;
            let qy = yt.position_of(w.l2 + 1, j) & 1;
            cells[t as usize][qx * 2 + qy] += 1;
        }
        WindowTable::from_cells(cells)
    }
}

/// `resamples × windows` matrix of CMH p-values under the stratified
/// permutation null.
pub fn permutation_oracle<R: Rng + ?Sized>(
    grid: &WindowGrid,
    windows: &[Window],
    strat: &Stratification,
    resamples: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let oracle = PermutationOracle::new(grid, strat);
    (0..resamples)
        .map(|_| {
            let perm = oracle.resample(rng);
            windows
                .iter()
                .map(|w| cmh_statistic(&oracle.tabulate(w, &perm)).p_value)
                .collect()
        })
        .collect()
}

/// Exact distribution of the CMH p-value when every stratum's margins are
/// held fixed: `Σ a_t` is a sum of independent central hypergeometric
/// counts, so its pmf is their convolution. Returns `(p, probability)`
/// pairs sorted by `p` with equal p-values merged.
pub fn exact_p_distribution(table: &WindowTable) -> Result<Vec<(f64, f64)>> {
    let mut pmf = vec![1.0f64];
    let mut offset = 0u64;
    let (mut mean, mut var) = (0.0, 0.0);
    for &[a, b, c, d] in table.cells() {
        let (row, col, n) = (u64::from(a + b), u64::from(a + c), u64::from(a + b + c + d));
        if n < 2 {
            continue;
        }
        let (r, k, m) = (row as f64, col as f64, n as f64);
        let v = r * (m - r) * k * (m - k) / (m * m * (m - 1.0));
        if v == 0.0 {
            continue;
        }
        mean += r * k / m;
        var += v;
        let lo = (row + col).saturating_sub(n);
        let hi = row.min(col);
        let local: Vec<f64> = (lo..=hi)
            .map(|s| hypergeom_pmf(s, row, col, n))
            .collect::<Result<_>>()?;
        let mut next = vec![0.0; pmf.len() + local.len() - 1];
        for (i, &p) in pmf.iter().enumerate() {
            for (j, &q) in local.iter().enumerate() {
                next[i + j] += p * q;
            }
        }
        pmf = next;
        offset += lo;
    }
    if var == 0.0 {
        return Ok(vec![(1.0, 1.0)]);
    }
    let mut out: Vec<(f64, f64)> = pmf
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let dev = (offset + i as u64) as f64 - mean;
            Ok((chi2_sf_1df(dev * dev / var)?, q))
        })
        .collect::<Result<_>>()?;
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(out.len());
    for (p, q) in out {
        match merged.last_mut() {
            Some(last) if (last.0 - p).abs() <= 1e-12 * p.max(1e-300) => last.1 += q,
            _ => merged.push((p, q)),
        }
    }
    Ok(merged)
}

//! Recursive median-split stratification of the conditioning space.
//!
//! `medtree` runs `L = ⌈log₂ T⌉` rounds of median splits, cycling through
//! the coordinates of `Z`, and stops the last round early so that exactly
//! `T` strata remain. Equivalently, the `2^L − T` terminal pairs that come
//! last in depth-first order are merged back into their parents. Every
//! stratum is an axis-aligned rectangle on the rank scale of `Z`.

use crate::tabulate::{ranks0, Dataset};

/// 0-based ranks of the conditioning columns, ties broken by sample index.
/// Only a leading subset of columns may be materialised; `medtree` touches
/// at most `⌈log₂ T⌉` of them.
#[derive(Debug, Clone)]
pub struct ZRanks {
    n: usize,
    dim: usize,
    columns: Vec<Vec<u32>>,
}

impl ZRanks {
    pub fn from_dataset(data: &Dataset) -> ZRanks {
        ZRanks::leading(data, data.dim())
    }

    /// Ranks for the first `min(axes, d)` conditioning columns.
    pub fn leading(data: &Dataset, axes: usize) -> ZRanks {
        let dim = data.dim();
        let columns = (0..axes.min(dim))
            .map(|j| ranks0(&data.z_column(j)))
            .collect();
        ZRanks {
            n: data.len(),
            dim,
            columns,
        }
    }

    /// Builds from already-ranked columns (each a permutation of `0..n`).
    pub fn from_columns(columns: Vec<Vec<u32>>) -> ZRanks {
        let n = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == n));
        ZRanks {
            n,
            dim: columns.len(),
            columns,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn rank(&self, axis: usize, i: usize) -> u32 {
        self.columns[axis][i]
    }

    fn column(&self, axis: usize) -> &[u32] {
        assert!(
            axis < self.columns.len(),
            "rank column {axis} was not materialised"
        );
        &self.columns[axis]
    }
}

/// One stratum: sorted sample indices plus the rank intervals `[lo, hi)` of
/// the axes that have been split. Unlisted axes span the full rank range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub indices: Vec<u32>,
    bounds: Vec<(usize, u32, u32)>,
}

impl Stratum {
    /// A stratum with no split axes.
    pub fn unbounded(indices: Vec<u32>) -> Stratum {
        Stratum {
            indices,
            bounds: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Rank interval `[lo, hi)` along `axis` for a sample of size `n`.
    pub fn interval(&self, axis: usize, n: usize) -> (u32, u32) {
        self.bounds
            .iter()
            .find(|b| b.0 == axis)
            .map_or((0, n as u32), |&(_, lo, hi)| (lo, hi))
    }

    /// Axes with a proper sub-interval.
    pub fn split_axes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bounds.iter().map(|b| b.0)
    }

    /// Whether sample `i` of `z` falls inside this stratum's rectangle.
    pub fn contains(&self, z: &ZRanks, i: usize) -> bool {
        self.bounds.iter().all(|&(axis, lo, hi)| {
            let r = z.rank(axis, i);
            lo <= r && r < hi
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    pub strata: Vec<Stratum>,
    n_total: usize,
    dim: usize,
}

impl Stratification {
    pub fn from_strata(strata: Vec<Stratum>, n_total: usize, dim: usize) -> Stratification {
        Stratification {
            strata,
            n_total,
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.strata.iter().map(Stratum::len).collect()
    }

    /// Index of the stratum whose rectangle contains sample `i`. Rectangles
    /// tile the whole rank space, so this is defined for samples outside the
    /// stratified set as well.
    pub fn locate(&self, z: &ZRanks, i: usize) -> Option<usize> {
        self.strata.iter().position(|s| s.contains(z, i))
    }

    /// Largest stratum diagonal with every axis rescaled to `[0, 1]`.
    pub fn max_diameter(&self) -> f64 {
        let n = self.n_total.max(1) as f64;
        self.strata
            .iter()
            .map(|s| {
                (0..self.dim)
                    .map(|axis| {
                        let (lo, hi) = s.interval(axis, self.n_total);
                        let w = f64::from(hi - lo) / n;
                        w * w
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Number of strata for `m` samples with `eta` samples per stratum:
/// `⌈m/η⌉`, or with a floor, `min(max(⌈m/η⌉, floor), max(⌊m/2⌋, 1))`.
pub fn target_strata_count(m: usize, eta: usize, floor: Option<usize>) -> usize {
    assert!(eta >= 1, "eta must be positive");
    let base = m.div_ceil(eta).max(1);
    match floor {
        None => base,
        Some(f) => base.max(f).min((m / 2).max(1)),
    }
}

pub(crate) fn ceil_log2(t: usize) -> usize {
    if t <= 1 {
        0
    } else {
        (usize::BITS - (t - 1).leading_zeros()) as usize
    }
}

#[derive(Clone)]
struct Segment {
    start: usize,
    end: usize,
    bounds: Vec<(usize, u32, u32)>,
}

/// Stratifies the samples at `indices` into `T` strata, where `T` is
/// `strata` if given (clamped to `1..=m`) and `⌈m/η⌉` otherwise. Round `t`
/// splits every stratum on axis `(t − 1) mod d` at its sample median, the
/// left half taking `⌈s/2⌉` samples. A stratum with fewer than two samples is
/// never split, so fewer than `T` strata are returned only when `T` cannot
/// be met with non-empty strata.
pub fn medtree(z: &ZRanks, indices: &[u32], eta: usize, strata: Option<usize>) -> Stratification {
    let m = indices.len();
    let target = match strata {
        Some(t) => t.clamp(1, m.max(1)),
        None => target_strata_count(m, eta, None),
    };
    let rounds = ceil_log2(target);

    let mut buf = indices.to_vec();
    let mut segs = vec![Segment {
        start: 0,
        end: m,
        bounds: Vec::new(),
    }];
    for t in 1..=rounds {
        let axis = (t - 1) % z.dim();
        let ranks = z.column(axis);
        let split_count = if t == rounds {
            target.saturating_sub(segs.len())
        } else {
            segs.len()
        };
        let mut next = Vec::with_capacity(segs.len() * 2);
        for (s, seg) in segs.into_iter().enumerate() {
            if s >= split_count || seg.end - seg.start < 2 {
                next.push(seg);
                continue;
            }
            let (left, right) = split(seg, axis, ranks, &mut buf, z.len());
            next.push(left);
            next.push(right);
        }
        segs = next;
    }

    let strata = segs
        .into_iter()
        .map(|seg| {
            let mut idx = buf[seg.start..seg.end].to_vec();
            idx.sort_unstable();
            let mut bounds = seg.bounds;
            bounds.sort_unstable();
            Stratum {
                indices: idx,
                bounds,
            }
        })
        .collect();
    Stratification {
        strata,
        n_total: z.len(),
        dim: z.dim(),
    }
}

fn split(
    seg: Segment,
    axis: usize,
    ranks: &[u32],
    buf: &mut [u32],
    n: usize,
) -> (Segment, Segment) {
    let slice = &mut buf[seg.start..seg.end];
    let left_len = slice.len().div_ceil(2);
    // ranks are distinct, so the selected partition is unique
    slice.select_nth_unstable_by_key(left_len - 1, |&i| ranks[i as usize]);
    let cut = ranks[slice[left_len - 1] as usize] + 1;

    let (lo, hi) = seg
        .bounds
        .iter()
        .find(|b| b.0 == axis)
        .map_or((0, n as u32), |&(_, lo, hi)| (lo, hi));
    let with = |lo: u32, hi: u32| {
        let mut b: Vec<(usize, u32, u32)> =
            seg.bounds.iter().copied().filter(|b| b.0 != axis).collect();
        b.push((axis, lo, hi));
        b
    };
    let mid = seg.start + left_len;
    (
        Segment {
            start: seg.start,
            end: mid,
            bounds: with(lo, cut),
        },
        Segment {
            start: mid,
            end: seg.end,
            bounds: with(cut, hi),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: u32) -> Vec<u32> {
        (0..n).collect()
    }

    #[test]
    fn strata_count_rules() {
        assert_eq!(target_strata_count(800, 10, None), 80);
        assert_eq!(target_strata_count(800, 10, Some(200)), 200);
        assert_eq!(target_strata_count(7, 10, None), 1);
        // floor is clamped so no stratum is forced empty
        assert_eq!(target_strata_count(100, 10, Some(200)), 50);
        assert_eq!(target_strata_count(1, 10, Some(200)), 1);
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<usize> = [1, 2, 3, 4, 5, 8, 9, 80].map(ceil_log2).to_vec();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 7]);
    }

    #[test]
    fn one_dimensional_eight_into_four() {
        let z = ZRanks::from_columns(vec![all(8)]);
        let s = medtree(&z, &all(8), 2, None);
        let groups: Vec<Vec<u32>> = s.strata.iter().map(|s| s.indices.clone()).collect();
        assert_eq!(groups, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]);
        assert_eq!(s.strata[1].interval(0, 8), (2, 4));
    }

    #[test]
    fn large_eta_gives_single_stratum() {
        let z = ZRanks::from_columns(vec![all(8)]);
        let s = medtree(&z, &all(8), 50, None);
        assert_eq!(s.len(), 1);
        assert_eq!(s.strata[0].indices, all(8));
    }

    #[test]
    fn axes_cycle_by_round() {
        // 8 points; coordinate 1 ranks follow the index, coordinate 2 is a
        // fixed shuffle.
        let z1 = all(8);
        let z2 = vec![5, 2, 7, 0, 3, 6, 1, 4];
        let z = ZRanks::from_columns(vec![z1, z2]);
        let s = medtree(&z, &all(8), 2, Some(4));
        // round 1 on axis 0: {0,1,2,3} | {4,5,6,7}
        // round 2 on axis 1: {0..3} z2 = [5,2,7,0] → low {1,3}, high {0,2}
        //                    {4..7} z2 = [3,6,1,4] → low {4,6}, high {5,7}
        let groups: Vec<Vec<u32>> = s.strata.iter().map(|s| s.indices.clone()).collect();
        assert_eq!(groups, vec![vec![1, 3], vec![0, 2], vec![4, 6], vec![5, 7]]);
        assert_eq!(s.strata[0].interval(0, 8), (0, 4));
        assert_eq!(s.strata[0].interval(1, 8), (0, 3));
        assert_eq!(s.strata[3].interval(1, 8), (4, 8));
    }

    #[test]
    fn exact_count_merges_last_pairs() {
        // T = 5 → L = 3; 8 terminal cells minus 3 merged pairs
        let z = ZRanks::from_columns(vec![all(40)]);
        let s = medtree(&z, &all(40), 8, None);
        assert_eq!(s.len(), 5);
        assert_eq!(s.sizes(), vec![5, 5, 10, 10, 10]);
    }

    #[test]
    fn tiny_strata_are_not_split() {
        let z = ZRanks::from_columns(vec![all(6)]);
        let s = medtree(&z, &all(6), 1, None);
        assert!(s.strata.iter().all(|s| !s.is_empty()));
        let total: usize = s.sizes().iter().sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn locate_tiles_the_rank_space() {
        let z = ZRanks::from_columns(vec![
            all(16),
            vec![3, 9, 0, 12, 5, 1, 15, 7, 2, 11, 4, 14, 6, 8, 13, 10],
        ]);
        // stratify only the even samples; every sample still has a home
        let even: Vec<u32> = (0..16).step_by(2).collect();
        let s = medtree(&z, &even, 2, None);
        for i in 0..16 {
            let hits = s.strata.iter().filter(|st| st.contains(&z, i)).count();
            assert_eq!(hits, 1, "sample {i}");
        }
        for (t, st) in s.strata.iter().enumerate() {
            for &i in &st.indices {
                assert_eq!(s.locate(&z, i as usize), Some(t));
            }
        }
    }

    #[test]
    fn diameter_of_single_stratum_is_sqrt_d() {
        let z = ZRanks::from_columns(vec![all(4), all(4)]);
        let s = medtree(&z, &all(4), 10, None);
        assert!((s.max_diameter() - 2f64.sqrt()).abs() < 1e-15);
    }
}

//! Structural invariants shared by the property tests and the acceptance
//! suite. Each `check_*` takes one generated case.

#![allow(dead_code)]

use multicmh::{
    adjusted_alpha, chi2_sf_1df, cmh_statistic, medtree, mh_variance, scan, scan_with_workers,
    sidak_combine, target_strata_count, Dataset, ScanConfig, WindowTable, ZRanks,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Case = (Vec<f64>, Vec<f64>, Vec<f64>, usize);
pub type Check = Result<(), TestCaseError>;

/// Integer-valued columns with plenty of ties; `x` and `y` may be binary.
pub fn dataset_strategy() -> impl Strategy<Value = Case> {
    (1usize..4, 1usize..160).prop_flat_map(|(d, n)| {
        let col = |hi: u32| prop::collection::vec(0..hi, n);
        (
            prop_oneof![col(2), col(1000)],
            prop_oneof![col(2), col(1000)],
            prop::collection::vec(0u32..500, n * d),
            Just(d),
        )
            .prop_map(|(x, y, z, d)| {
                let f = |v: Vec<u32>| v.into_iter().map(f64::from).collect::<Vec<_>>();
                (f(x), f(y), f(z), d)
            })
    })
}

pub fn scan_config() -> impl Strategy<Value = ScanConfig> {
    (
        1usize..15,
        1usize..6,
        1usize..8,
        0usize..20,
        prop::option::of(1usize..6),
    )
        .prop_map(|(eta, k_max, v_margin, extra, strata_floor)| ScanConfig {
            eta,
            k_max,
            v_margin,
            v_all: v_margin + extra,
            strata_floor,
            ..ScanConfig::default()
        })
}

pub fn table_strategy(max_strata: usize) -> impl Strategy<Value = Vec<[u32; 4]>> {
    prop::collection::vec(prop::array::uniform4(0u32..12), 1..max_strata)
}

pub fn inert_strategy() -> impl Strategy<Value = Vec<[u32; 4]>> {
    prop::collection::vec(
        prop_oneof![
            (0u32..2, 0usize..4).prop_map(|(v, q)| {
                let mut c = [0; 4];
                c[q] = v;
                c
            }),
            (0u32..9, 0u32..9).prop_map(|(a, b)| [a, b, 0, 0]),
            (0u32..9, 0u32..9).prop_map(|(a, c)| [a, 0, c, 0]),
        ],
        0..4,
    )
}

pub type MedtreeCase = (usize, usize, usize, u64, usize);

pub fn medtree_strategy() -> impl Strategy<Value = MedtreeCase> {
    (1usize..300, 1usize..5, 1usize..30, any::<u64>(), 1usize..4)
}

/// Pseudo-random rank permutations from a seed.
fn rank_columns(n: usize, d: usize, seed: u64) -> Vec<Vec<u32>> {
    (0..d)
        .map(|j| {
            let mut v: Vec<(u64, u32)> = (0..n as u32)
                .map(|i| {
                    let h = (u64::from(i) + 1).wrapping_mul(seed | 1);
                    (h.rotate_left(j as u32 * 7 + 13), i)
                })
                .collect();
            v.sort();
            let mut r = vec![0u32; n];
            for (rank, &(_, i)) in v.iter().enumerate() {
                r[i as usize] = rank as u32;
            }
            r
        })
        .collect()
}

/// Strata partition the input exactly, hit the target count when there is
/// room, stay within the median-split size bounds and tile rank space.
pub fn check_medtree((n, d, eta, seed, keep): MedtreeCase) -> Check {
    let z = ZRanks::from_columns(rank_columns(n, d, seed));
    let indices: Vec<u32> = (0..n as u32)
        .filter(|i| (*i as usize).is_multiple_of(keep))
        .collect();
    let m = indices.len();
    let strat = medtree(&z, &indices, eta, None);
    let target = target_strata_count(m, eta, None);

    let mut all: Vec<u32> = strat
        .strata
        .iter()
        .flat_map(|s| s.indices.clone())
        .collect();
    all.sort_unstable();
    prop_assert_eq!(&all, &indices);
    prop_assert!(strat.len() <= target);
    if m >= 2 * target {
        prop_assert_eq!(strat.len(), target);
    }

    let rounds = if target <= 1 {
        0
    } else {
        (usize::BITS - (target - 1).leading_zeros()) as usize
    };
    let lo = (m >> rounds).max(1);
    let hi = if rounds == 0 {
        m
    } else {
        m.div_ceil(1 << (rounds - 1))
    };
    for (t, s) in strat.strata.iter().enumerate() {
        prop_assert!(
            s.len() >= lo && s.len() <= hi,
            "size {} not in [{lo}, {hi}]",
            s.len()
        );
        for &i in &s.indices {
            prop_assert!(s.contains(&z, i as usize));
            prop_assert_eq!(strat.locate(&z, i as usize), Some(t));
        }
    }
    for i in 0..n {
        prop_assert!(strat.locate(&z, i).is_some());
    }
    Ok(())
}

/// Strictly increasing transforms of every column leave the report
/// unchanged.
pub fn check_monotone_invariance(((x, y, z, d), cfg): (Case, ScanConfig)) -> Check {
    let base = Dataset::new(x.clone(), y.clone(), z.clone(), d).unwrap();
    let tx: Vec<f64> = x.iter().map(|v| v * v * v + 2.0 * v - 7.0).collect();
    let ty: Vec<f64> = y.iter().map(|v| (v / 128.0).exp()).collect();
    let tz: Vec<f64> = z.iter().map(|v| -1.0 / (v + 1.0)).collect();
    let moved = Dataset::new(tx, ty, tz, d).unwrap();
    prop_assert_eq!(scan(&base, &cfg).unwrap(), scan(&moved, &cfg).unwrap());
    Ok(())
}

/// The ladder recomputes bit-exactly from stored window p-values and every
/// significance flag matches its recomputed level.
pub fn check_ladder(((x, y, z, d), cfg): (Case, ScanConfig)) -> Check {
    let data = Dataset::new(x, y, z, d).unwrap();
    let report = scan(&data, &cfg).unwrap();
    let ladder = report.recompute_ladder();
    prop_assert_eq!(ladder.overall_p.to_bits(), report.overall_p.to_bits());
    prop_assert_eq!(&ladder.partitions, &report.partitions);
    prop_assert_eq!(&ladder.resolutions, &report.resolutions);
    prop_assert_eq!(ladder.no_valid_window, report.no_valid_window);

    let total = report.resolutions_total();
    for w in &report.windows {
        if !w.screened {
            prop_assert!(w.p.is_none() && !w.significant && w.alpha_n.is_none());
            continue;
        }
        let u = report.resolutions[w.l1 + w.l2].valid_partitions;
        let l = report
            .partitions
            .iter()
            .find(|p| p.l1 == w.l1 && p.l2 == w.l2)
            .unwrap()
            .valid_windows;
        let a = adjusted_alpha(cfg.alpha, total, u, l);
        prop_assert_eq!(w.alpha_n, Some(a));
        prop_assert_eq!(w.significant, w.p.unwrap() <= a);
    }
    let valid: Vec<f64> = report.windows.iter().filter_map(|w| w.p).collect();
    if valid.len() == 1 {
        // the last stage always corrects over every resolution
        let expect = sidak_combine(valid[0], total);
        prop_assert_eq!(report.overall_p.to_bits(), expect.to_bits());
        if total == 1 {
            prop_assert_eq!(report.overall_p.to_bits(), valid[0].to_bits());
        }
    }
    if valid.is_empty() {
        prop_assert!(report.no_valid_window && report.overall_p == 1.0);
    }
    Ok(())
}

pub fn check_workers(((x, y, z, d), cfg, workers): (Case, ScanConfig, usize)) -> Check {
    let data = Dataset::new(x, y, z, d).unwrap();
    prop_assert_eq!(
        scan_with_workers(&data, &cfg, 1).unwrap(),
        scan_with_workers(&data, &cfg, workers).unwrap()
    );
    Ok(())
}

/// Strata with a zero row or column margin, or at most one sample, change
/// nothing.
pub fn check_inert((cells, inert): (Vec<[u32; 4]>, Vec<[u32; 4]>)) -> Check {
    let base = cmh_statistic(&WindowTable::from_cells(cells.clone()));
    let mut more = cells;
    more.extend(inert);
    let padded = cmh_statistic(&WindowTable::from_cells(more));
    prop_assert_eq!(base.statistic_m.to_bits(), padded.statistic_m.to_bits());
    prop_assert_eq!(base.p_value.to_bits(), padded.p_value.to_bits());
    prop_assert_eq!(base.strata_used, padded.strata_used);
    Ok(())
}

pub fn check_column_swap(cells: Vec<[u32; 4]>) -> Check {
    let t = WindowTable::from_cells(cells);
    let a = cmh_statistic(&t);
    let b = cmh_statistic(&t.swap_columns());
    prop_assert!((a.statistic_m + b.statistic_m).abs() <= 1e-12 * (1.0 + a.statistic_m.abs()));
    prop_assert!((a.p_value - b.p_value).abs() <= 1e-12);
    Ok(())
}

pub fn check_woolf(cell: [u32; 4]) -> Check {
    let v = mh_variance(&WindowTable::from_cells(vec![cell])).unwrap();
    let w: f64 = cell.iter().map(|&c| 1.0 / f64::from(c)).sum();
    prop_assert!((v - w).abs() <= 1e-12 * w);
    Ok(())
}

pub fn check_chi2(x: f64) -> Check {
    let oracle = normal_tail_quadrature(x.sqrt());
    let p = chi2_sf_1df(x).unwrap();
    prop_assert!((p - oracle).abs() <= 1e-9, "x={x} p={p} oracle={oracle}");
    Ok(())
}

/// `P(χ²₁ > u²) = 2 ∫_u^∞ φ(s) ds`, by composite Simpson on `[u, u + 40]`.
pub fn normal_tail_quadrature(u: f64) -> f64 {
    let steps = 40_000;
    let h = 40.0 / steps as f64;
    let phi = |s: f64| 2.0 * (-0.5 * s * s).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = phi(u) + phi(u + 40.0);
    for k in 1..steps {
        acc += phi(u + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

//! Multiscale Cochran–Mantel–Haenszel (multiCMH) test of conditional
//! independence `X ⟂ Y | Z`.
//!
//! The test rank-transforms `X` and `Y`, builds nested median-split trees over
//! each, and scans every product window `I × J` of the two trees. Inside a
//! window the samples are stratified on `Z` by recursive median splits and the
//! resulting `2 × 2 × T` table is tested with the CMH statistic. Window
//! p-values are combined by a three-stage Šidák ladder (partition, resolution,
//! overall), and windows that survive their adjusted level are reported with
//! Mantel–Haenszel common log odds-ratio estimates.
//!
//! ```
//! use multicmh::{scan, Dataset, ScanConfig};
//!
//! let x: Vec<f64> = (0..64).map(|i| (i % 2) as f64).collect();
//! let y: Vec<f64> = (0..64).map(|i| ((i / 2) % 2) as f64).collect();
//! let z: Vec<f64> = (0..64).map(|i| i as f64).collect();
//! let data = Dataset::new(x, y, z, 1).unwrap();
//! let report = scan(&data, &ScanConfig::default()).unwrap();
//! assert_eq!(report.windows.len(), 1);
//! ```

pub mod cmh;
pub mod error;
pub mod report;
pub mod scan;
pub mod sim;
pub mod stratify;
pub mod tabulate;

pub use cmh::{
    chi2_sf_1df, cmh_statistic, deviation_capacity, effect_estimate, mh_common_log_or, mh_variance,
    stratum_log_or, CmhResult, EffectEstimate, ThetaStatus,
};
pub use error::{Error, Result};
pub use scan::{
    adjusted_alpha, choose_depths, scan, scan_with_workers, screen, sidak_combine, ScanConfig,
    ScanReport, WindowResult,
};
pub use stratify::{medtree, target_strata_count, Stratification, Stratum, ZRanks};
pub use tabulate::{
    build_dyadic_tree, ingest_csv, rank_transform, tabulate_window, Arity, ColumnSpec, Dataset,
    DyadicTree, Window, WindowGrid, WindowTable,
};

//! Simulation harness: data generators, calibration and power metrics,
//! the hypergeometric pmf, a stratified permutation oracle, and experiment
//! runners.

mod generate;
mod metrics;
mod oracle;
mod rng;
mod runner;

pub use generate::{gen_planted, gen_pnl, gen_pnl_with, gen_pure_null, Hypothesis, Link};
pub use metrics::{
    auroc, ecdf_grid, hypergeom_pmf, ks_excess_over_uniform, median, rejection_rate, roc_points,
};
pub use oracle::{exact_p_distribution, permutation_oracle, PermutationOracle};
pub use rng::{stream_rng, SimRng};
pub use runner::{
    run_eta_sweep, run_roc, run_scaling, run_t1e, MetricsBundle, ScalingPoint, Scenario, SimSpec,
};

//! Fixtures shared by the benchmarks.

use multicmh::sim::{gen_pnl, gen_pure_null, stream_rng, Hypothesis};
use multicmh::Dataset;

/// Gaussian null data with `d` conditioning columns.
pub fn pure_null(n: usize, d: usize) -> Dataset {
    gen_pure_null(n, d, &mut stream_rng(7, (n as u64) << 8 | d as u64))
}

/// Post-nonlinear alternative with `d` conditioning columns.
pub fn pnl_alt(n: usize, d: usize) -> Dataset {
    gen_pnl(
        n,
        d,
        Hypothesis::Alternative,
        &mut stream_rng(8, (n as u64) << 8 | d as u64),
    )
}

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::tabulate::{Arity, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    Alternative,
}

/// Nonlinear links of the post-nonlinear noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Identity,
    Square,
    Cube,
    Tanh,
    ExpNegAbs,
}

impl Link {
    pub const ALL: [Link; 5] = [
        Link::Identity,
        Link::Square,
        Link::Cube,
        Link::Tanh,
        Link::ExpNegAbs,
    ];

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Link::Identity => v,
            Link::Square => v * v,
            Link::Cube => v * v * v,
            Link::Tanh => v.tanh(),
            Link::ExpNegAbs => (-v.abs()).exp(),
        }
    }
}

/// Post-nonlinear noise model. Both links are drawn uniformly per dataset.
///
/// Under the null, `X = f1(m + e1)` and `Y = f2(m + e2)` where `m` is the
/// mean of the first `⌊d/2⌋` coordinates of `Z` (the only coordinate when
/// `d = 1`). Under the alternative, `X = f1(0.8 e3 + e1)` and
/// `Y = f2(0.8 e3 + e2)` with `Z` unrelated to both. All draws are standard
/// normal.
pub fn gen_pnl<R: Rng + ?Sized>(n: usize, d: usize, h: Hypothesis, rng: &mut R) -> Dataset {
    let f1 = *Link::ALL.choose(rng).expect("non-empty");
    let f2 = *Link::ALL.choose(rng).expect("non-empty");
    gen_pnl_with(n, d, h, (f1, f2), rng)
}

pub fn gen_pnl_with<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    h: Hypothesis,
    (f1, f2): (Link, Link),
    rng: &mut R,
) -> Dataset {
    assert!(n >= 1 && d >= 1);
    let used = (d / 2).max(1);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n * d);
    for _ in 0..n {
        let row_start = z.len();
        z.extend((0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let e1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let (u, v) = match h {
            Hypothesis::Null => {
                let m = z[row_start..row_start + used].iter().sum::<f64>() / used as f64;
                (m + e1, m + e2)
            }
            Hypothesis::Alternative => {
                let e3: f64 = rng.sample(StandardNormal);
                (0.8 * e3 + e1, 0.8 * e3 + e2)
            }
        };
        x.push(f1.apply(u));
        y.push(f2.apply(v));
    }
    continuous(x, y, z, d)
}

/// All of `X`, `Y` and `Z` independent standard normal.
pub fn gen_pure_null<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Dataset {
    assert!(n >= 1 && d >= 1);
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
    let x = draw(n);
    let y = draw(n);
    let z = draw(n * d);
    continuous(x, y, z, d)
}

/// Dependence confined to the window `[0, ½) × [0, ½)` of the unit square.
///
/// `X ~ U(0, 1)` and `Z` is independent standard normal noise. When
/// `X ≥ ½`, `Y ~ U(0, 1)`. When `X < ½`, with probability ½ `Y ~ U(½, 1)`,
/// and otherwise `Y` is `X + 0.05 ε` folded back into `[0, ½]`. Both halves
/// of `Y` are equally likely for every `X`, so only windows inside the
/// lower-left quadrant see an association.
pub fn gen_planted<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Dataset {
    assert!(n >= 1 && d >= 1);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n * d);
    for _ in 0..n {
        let xi: f64 = rng.random();
        let yi = if xi >= 0.5 {
            rng.random()
        } else if rng.random_bool(0.5) {
            0.5 + 0.5 * rng.random::<f64>()
        } else {
            let e: f64 = rng.sample(StandardNormal);
            let v = (xi + 0.05 * e).rem_euclid(1.0);
            if v > 0.5 {
                1.0 - v
            } else {
                v
            }
        };
        x.push(xi);
        y.push(yi);
        z.extend((0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
    }
    continuous(x, y, z, d)
}

fn continuous(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, d: usize) -> Dataset {
    Dataset::with_arity(x, y, z, d, Some(Arity::Continuous), Some(Arity::Continuous))
        .expect("generated data is finite and well-shaped")
}

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{gen_planted, gen_pnl, gen_pure_null, Hypothesis};
use super::metrics::{
    auroc, ecdf_grid, ks_excess_over_uniform, median, rejection_rate, roc_points,
};
use super::rng::{stream_rng, SimRng};
use crate::error::{Error, Result};
use crate::scan::{scan, ScanConfig};
use crate::tabulate::Dataset;

/// Alternative-hypothesis replications draw from streams starting here.
const ALT_STREAM: u64 = 1 << 32;
const ECDF_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    NullPnl,
    AltPnl,
    PureNullGaussian,
    PlantedWindow,
}

impl Scenario {
    pub fn generate(self, n: usize, d: usize, rng: &mut SimRng) -> Dataset {
        match self {
            Scenario::NullPnl => gen_pnl(n, d, Hypothesis::Null, rng),
            Scenario::AltPnl => gen_pnl(n, d, Hypothesis::Alternative, rng),
            Scenario::PureNullGaussian => gen_pure_null(n, d, rng),
            Scenario::PlantedWindow => gen_planted(n, d, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    /// Data under test; the null side for ROC runs.
    pub scenario: Scenario,
    /// Alternative side for ROC runs.
    pub alt_scenario: Scenario,
    pub n: usize,
    pub d: usize,
    pub replications: usize,
    pub seed: u64,
    pub config: ScanConfig,
    /// η values for sweeps; empty means `config.eta` only.
    pub etas: Vec<usize>,
    /// Sample sizes for scaling runs; empty means `n` only.
    pub ns: Vec<usize>,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec {
            scenario: Scenario::NullPnl,
            alt_scenario: Scenario::AltPnl,
            n: 400,
            d: 10,
            replications: 100,
            seed: 0,
            config: ScanConfig::default(),
            etas: Vec::new(),
            ns: Vec::new(),
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 || self.n < 1 || self.d < 1 {
            return Err(Error::Config(
                "replications, n and d must be at least 1".into(),
            ));
        }
        if self.ns.contains(&0) || self.etas.contains(&0) {
            return Err(Error::Config("sweep values must be at least 1".into()));
        }
        self.config.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub d: usize,
    pub median_seconds: f64,
    pub runtimes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsBundle {
    pub label: String,
    pub scenario: Scenario,
    pub n: usize,
    pub d: usize,
    pub eta: usize,
    pub seed: u64,
    pub alpha: f64,
    pub replications: usize,
    /// Rejection rate of the (null) overall p-values at `alpha`.
    pub rejection_rate: Option<f64>,
    /// `sup_t (ECDF(t) − t)` of the (null) overall p-values.
    pub ks_excess: Option<f64>,
    pub ecdf: Vec<(f64, f64)>,
    pub roc: Vec<(f64, f64)>,
    pub auroc: Option<f64>,
    /// Seconds per replication, in replication order.
    pub runtimes: Vec<f64>,
    pub scaling: Vec<ScalingPoint>,
    pub null_p: Vec<f64>,
    pub alt_p: Vec<f64>,
}

impl MetricsBundle {
    fn empty(label: &str, spec: &SimSpec) -> Self {
        MetricsBundle {
            label: label.to_string(),
            scenario: spec.scenario,
            n: spec.n,
            d: spec.d,
            eta: spec.config.eta,
            seed: spec.seed,
            alpha: spec.config.alpha,
            replications: spec.replications,
            rejection_rate: None,
            ks_excess: None,
            ecdf: Vec::new(),
            roc: Vec::new(),
            auroc: None,
            runtimes: Vec::new(),
            scaling: Vec::new(),
            null_p: Vec::new(),
            alt_p: Vec::new(),
        }
    }

    fn fill_null(&mut self, p: Vec<f64>) {
        self.rejection_rate = Some(rejection_rate(&p, self.alpha));
        self.ks_excess = Some(ks_excess_over_uniform(&p));
        self.ecdf = ecdf_grid(&p, ECDF_POINTS);
        self.null_p = p;
    }
}

/// Overall p-values and scan times of replications `0..reps`, drawn from
/// streams `offset + i`. Order follows the replication index.
fn replicate(
    scenario: Scenario,
    spec: &SimSpec,
    config: &ScanConfig,
    offset: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let out: Vec<(f64, f64)> = (0..spec.replications as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(spec.seed, offset + i);
            let data = scenario.generate(spec.n, spec.d, &mut rng);
            let start = Instant::now();
            let report = scan(&data, config)?;
            Ok((report.overall_p, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().unzip())
}

/// Type-I error protocol: rejection rate and p-value ECDF of
/// `spec.scenario`.
pub fn run_t1e(spec: &SimSpec) -> Result<MetricsBundle> {
    spec.validate()?;
    let (p, times) = replicate(spec.scenario, spec, &spec.config, 0)?;
    let mut b = MetricsBundle::empty("t1e", spec);
    b.fill_null(p);
    b.runtimes = times;
    Ok(b)
}

/// ROC protocol: `spec.replications` datasets from each of
/// `spec.scenario` and `spec.alt_scenario`, scored by overall p-value.
pub fn run_roc(spec: &SimSpec) -> Result<MetricsBundle> {
    spec.validate()?;
    roc_with(spec, &spec.config, "roc")
}

fn roc_with(spec: &SimSpec, config: &ScanConfig, label: &str) -> Result<MetricsBundle> {
    let (null_p, mut times) = replicate(spec.scenario, spec, config, 0)?;
    let (alt_p, alt_times) = replicate(spec.alt_scenario, spec, config, ALT_STREAM)?;
    times.extend(alt_times);
    let mut b = MetricsBundle::empty(label, spec);
    b.eta = config.eta;
    b.roc = roc_points(&null_p, &alt_p);
    b.auroc = Some(auroc(&null_p, &alt_p)?);
    b.fill_null(null_p);
    b.alt_p = alt_p;
    b.runtimes = times;
    Ok(b)
}

/// One ROC bundle per η in `spec.etas`.
pub fn run_eta_sweep(spec: &SimSpec) -> Result<Vec<MetricsBundle>> {
    spec.validate()?;
    let etas = if spec.etas.is_empty() {
        vec![spec.config.eta]
    } else {
        spec.etas.clone()
    };
    etas.into_iter()
        .map(|eta| {
            let config = ScanConfig {
                eta,
                ..spec.config.clone()
            };
            roc_with(spec, &config, &format!("eta={eta}"))
        })
        .collect()
}

/// Single-threaded scan times for every `n` in `spec.ns`, `replications`
/// repeats each, summarised by the median. Data generation is not timed.
pub fn run_scaling(spec: &SimSpec) -> Result<MetricsBundle> {
    spec.validate()?;
    let ns = if spec.ns.is_empty() {
        vec![spec.n]
    } else {
        spec.ns.clone()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut b = MetricsBundle::empty("scale", spec);
    for (k, &n) in ns.iter().enumerate() {
        let mut runtimes = Vec::with_capacity(spec.replications);
        for i in 0..spec.replications as u64 {
            let mut rng = stream_rng(spec.seed, ((k as u64) << 20) + i);
            let data = spec.scenario.generate(n, spec.d, &mut rng);
            let start = Instant::now();
            pool.install(|| scan(&data, &spec.config))?;
            runtimes.push(start.elapsed().as_secs_f64());
        }
        b.runtimes.extend(&runtimes);
        b.scaling.push(ScalingPoint {
            n,
            d: spec.d,
            median_seconds: median(&runtimes),
            runtimes,
        });
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scenario: Scenario) -> SimSpec {
        SimSpec {
            scenario,
            n: 120,
            d: 3,
            replications: 12,
            seed: 5,
            ..SimSpec::default()
        }
    }

    #[test]
    fn t1e_is_deterministic() {
        let spec = small(Scenario::PureNullGaussian);
        let a = run_t1e(&spec).unwrap();
        let b = run_t1e(&spec).unwrap();
        assert_eq!(a.null_p, b.null_p);
        assert_eq!(a.null_p.len(), 12);
        assert!(a.ecdf.windows(2).all(|w| w[0].1 <= w[1].1));
        let r = a.rejection_rate.unwrap();
        assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn roc_bundle_invariants() {
        let spec = SimSpec {
            alt_scenario: Scenario::PureNullGaussian,
            ..small(Scenario::NullPnl)
        };
        let b = run_roc(&spec).unwrap();
        assert_eq!(b.roc.first(), Some(&(0.0, 0.0)));
        assert_eq!(b.roc.last(), Some(&(1.0, 1.0)));
        let a = b.auroc.unwrap();
        assert!((0.0..=1.0).contains(&a));
        assert_eq!(b.alt_p.len(), 12);
    }

    #[test]
    fn sweep_and_scaling_shapes() {
        let spec = SimSpec {
            etas: vec![5, 20],
            ns: vec![60, 120],
            replications: 3,
            ..small(Scenario::PureNullGaussian)
        };
        let sweep = run_eta_sweep(&spec).unwrap();
        assert_eq!(sweep.iter().map(|b| b.eta).collect::<Vec<_>>(), vec![5, 20]);
        let s = run_scaling(&spec).unwrap();
        assert_eq!(s.scaling.len(), 2);
        assert!(s
            .scaling
            .iter()
            .all(|p| p.runtimes.len() == 3 && p.median_seconds >= 0.0));
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(run_t1e(&SimSpec {
            replications: 0,
            ..SimSpec::default()
        })
        .is_err());
    }
}

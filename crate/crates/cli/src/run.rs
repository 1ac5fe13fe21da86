use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use multicmh::report::{format_f64, to_json_string};
use multicmh::sim::{self, MetricsBundle, Scenario, SimSpec};
use multicmh::{
    cmh_statistic, effect_estimate, ingest_csv, medtree, scan, tabulate_window,
    target_strata_count, Arity, ColumnSpec, Dataset, ScanReport, ThetaStatus, Window, WindowGrid,
    ZRanks,
};
use serde::Serialize;

use crate::args::{
    CmhArgs, Command, Format, InputArgs, Model, OutputArgs, Protocol, SimArgs, TestArgs,
};
use crate::error::CliError;

pub type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Test(a) => {
            let report = with_workers(a.output.workers, || cmd_test(a))?;
            emit(&a.output, |w, f| match f {
                Format::Json => write_str(w, &to_json_string(&report)),
                Format::Csv => write_windows_csv(w, &report),
            })
        }
        Command::Cmh(a) => {
            let out = cmd_cmh(a)?;
            emit(&a.output, |w, f| match f {
                Format::Json => write_str(w, &to_json_string(&out)),
                Format::Csv => write_cmh_csv(w, &out),
            })
        }
        Command::Sim(a) => {
            let bundles = with_workers(a.output.workers, || cmd_sim(a))?;
            emit(&a.output, |w, f| match f {
                Format::Json if bundles.len() == 1 => write_str(w, &to_json_string(&bundles[0])),
                Format::Json => write_str(w, &to_json_string(&bundles)),
                Format::Csv => write_bundles_csv(w, &bundles),
            })
        }
    }
}

fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match workers {
        None => f(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| CliError::Invariant(format!("thread pool: {e}")))?;
            pool.install(f)
        }
    }
}

pub fn load(input: &InputArgs, x_arity: Option<Arity>, y_arity: Option<Arity>) -> Result<Dataset> {
    let file = File::open(&input.input).map_err(|source| CliError::Open {
        path: input.input.display().to_string(),
        source,
    })?;
    let spec = ColumnSpec {
        x: input.x.clone(),
        y: input.y.clone(),
        z: input.z.clone(),
        x_arity,
        y_arity,
    };
    Ok(ingest_csv(io::BufReader::new(file), &spec)?)
}

/// Ingests, scans and checks that the ladder recomputes from the window
/// p-values.
pub fn cmd_test(args: &TestArgs) -> Result<ScanReport> {
    let config = args.scan.config();
    config.validate()?;
    let data = load(
        &args.input,
        args.x_arity.map(Into::into),
        args.y_arity.map(Into::into),
    )?;
    let report = scan(&data, &config)?;
    let ladder = report.recompute_ladder();
    if ladder.overall_p.to_bits() != report.overall_p.to_bits() {
        return Err(CliError::Invariant(format!(
            "ladder recomputes to {} but report holds {}",
            ladder.overall_p, report.overall_p
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmhOutput {
    pub n: usize,
    #[serde(rename = "T")]
    pub strata: usize,
    /// `[a, b, c, d]` per stratum.
    pub cells: Vec<[u32; 4]>,
    pub m: f64,
    pub m2: f64,
    pub p: f64,
    pub strata_used: usize,
    pub degenerate: bool,
    pub theta_hat: Option<f64>,
    pub theta_status: ThetaStatus,
    pub sigma_hat: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub stratum_thetas: Vec<f64>,
}

/// CMH test of binary `x` and `y` with strata from a medtree over all rows.
pub fn cmd_cmh(args: &CmhArgs) -> Result<CmhOutput> {
    if args.eta < 1 {
        return Err(multicmh::Error::Config("eta must be at least 1".into()).into());
    }
    let data = load(&args.input, Some(Arity::Binary), Some(Arity::Binary))?;
    let grid = WindowGrid::new(&data, 1, 1);
    let root = Window {
        l1: 0,
        pos_i: 0,
        l2: 0,
        pos_j: 0,
    };
    let all: Vec<u32> = (0..data.len() as u32).collect();
    let t = target_strata_count(data.len(), args.eta, args.strata_floor);
    let strat = medtree(&ZRanks::from_dataset(&data), &all, args.eta, Some(t));
    let table = tabulate_window(&grid, &root, &strat)?;
    let cmh = cmh_statistic(&table);
    let effect = effect_estimate(&table);
    Ok(CmhOutput {
        n: data.len(),
        strata: strat.len(),
        cells: table.cells().to_vec(),
        m: cmh.statistic_m,
        m2: cmh.statistic_m2,
        p: cmh.p_value,
        strata_used: cmh.strata_used,
        degenerate: cmh.degenerate,
        theta_hat: effect.theta_hat,
        theta_status: effect.status,
        sigma_hat: effect.sigma_hat,
        ci: effect.ci,
        stratum_thetas: effect.stratum_thetas,
    })
}

pub fn cmd_sim(args: &SimArgs) -> Result<Vec<MetricsBundle>> {
    let default_model = match args.scenario {
        Protocol::Scale => Model::PureNullGaussian,
        _ => Model::NullPnl,
    };
    let spec = SimSpec {
        scenario: Scenario::from(args.model.unwrap_or(default_model)),
        alt_scenario: args.alt_model.into(),
        n: args.n,
        d: args.d,
        replications: args.reps,
        seed: args.seed,
        config: args.scan.config(),
        etas: args.etas.clone(),
        ns: args.ns.clone(),
    };
    let bundles = match args.scenario {
        Protocol::T1e => vec![sim::run_t1e(&spec)?],
        Protocol::Roc => vec![sim::run_roc(&spec)?],
        Protocol::Scale => vec![sim::run_scaling(&spec)?],
        Protocol::Eta => sim::run_eta_sweep(&spec)?,
    };
    Ok(bundles)
}

fn emit(out: &OutputArgs, write: impl FnOnce(&mut dyn Write, Format) -> Result<()>) -> Result<()> {
    match &out.out {
        Some(path) => {
            let mut file = create(path)?;
            write(&mut file, out.format)?;
            file.flush().map_err(|e| CliError::Write(e.to_string()))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock, out.format)?;
            lock.flush().map_err(|e| CliError::Write(e.to_string()))
        }
    }
}

fn create(path: &Path) -> Result<io::BufWriter<File>> {
    File::create(path)
        .map(io::BufWriter::new)
        .map_err(|source| CliError::Open {
            path: path.display().to_string(),
            source,
        })
}

fn write_str(w: &mut dyn Write, s: &str) -> Result<()> {
    w.write_all(s.as_bytes())
        .map_err(|e| CliError::Write(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Write(e.to_string())
}

fn theta_status_str(s: ThetaStatus) -> &'static str {
    match s {
        ThetaStatus::Finite => "finite",
        ThetaStatus::PositiveInfinite => "positive-infinite",
        ThetaStatus::NegativeInfinite => "negative-infinite",
        ThetaStatus::Undefined => "undefined",
    }
}

/// One row per window; per-stratum thetas are `;`-joined.
fn write_windows_csv(w: &mut dyn Write, report: &ScanReport) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "l1",
        "l2",
        "pos_i",
        "pos_j",
        "n",
        "a",
        "b",
        "c",
        "d",
        "T",
        "screened",
        "p",
        "m",
        "alpha_n",
        "significant",
        "theta_hat",
        "theta_status",
        "sigma_hat",
        "ci_lo",
        "ci_hi",
        "stratum_thetas",
    ])
    .map_err(csv_err)?;
    for r in &report.windows {
        let [a, b, c, d] = r.counts;
        let thetas: Vec<String> = r.stratum_thetas.iter().map(|&t| format_f64(t)).collect();
        wr.write_record([
            r.l1.to_string(),
            r.l2.to_string(),
            r.pos_i.to_string(),
            r.pos_j.to_string(),
            r.n.to_string(),
            a.to_string(),
            b.to_string(),
            c.to_string(),
            d.to_string(),
            r.strata.to_string(),
            r.screened.to_string(),
            opt(r.p),
            opt(r.m),
            opt(r.alpha_n),
            r.significant.to_string(),
            opt(r.theta_hat),
            r.theta_status
                .map(theta_status_str)
                .unwrap_or_default()
                .to_string(),
            opt(r.sigma_hat),
            opt(r.ci.map(|c| c.0)),
            opt(r.ci.map(|c| c.1)),
            thetas.join(";"),
        ])
        .map_err(csv_err)?;
    }
    wr.flush().map_err(|e| CliError::Write(e.to_string()))
}

/// Header plus one row per stratum; the test-level columns repeat.
fn write_cmh_csv(w: &mut dyn Write, out: &CmhOutput) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "stratum",
        "a",
        "b",
        "c",
        "d",
        "stratum_theta",
        "m",
        "m2",
        "p",
        "theta_hat",
        "theta_status",
        "sigma_hat",
        "ci_lo",
        "ci_hi",
    ])
    .map_err(csv_err)?;
    for (t, (cell, theta)) in out.cells.iter().zip(&out.stratum_thetas).enumerate() {
        let [a, b, c, d] = cell.map(|v| v.to_string());
        wr.write_record([
            t.to_string(),
            a,
            b,
            c,
            d,
            format_f64(*theta),
            format_f64(out.m),
            format_f64(out.m2),
            format_f64(out.p),
            opt(out.theta_hat),
            theta_status_str(out.theta_status).to_string(),
            opt(out.sigma_hat),
            opt(out.ci.map(|c| c.0)),
            opt(out.ci.map(|c| c.1)),
        ])
        .map_err(csv_err)?;
    }
    wr.flush().map_err(|e| CliError::Write(e.to_string()))
}

/// Long form: `label,kind,x,y` with kinds `ecdf` (t, F(t)), `roc` (fpr,
/// tpr), `scaling` (n, median seconds), `runtime` (replication, seconds)
/// and scalar rows `rejection_rate`, `ks_excess`, `auroc` with an empty x.
fn write_bundles_csv(w: &mut dyn Write, bundles: &[MetricsBundle]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["label", "kind", "x", "y"])
        .map_err(csv_err)?;
    for b in bundles {
        let mut row = |kind: &str, x: String, y: f64| {
            wr.write_record([b.label.as_str(), kind, &x, &format_f64(y)])
                .map_err(csv_err)
        };
        for (name, v) in [
            ("rejection_rate", b.rejection_rate),
            ("ks_excess", b.ks_excess),
            ("auroc", b.auroc),
        ] {
            if let Some(v) = v {
                row(name, String::new(), v)?;
            }
        }
        for &(t, f) in &b.ecdf {
            row("ecdf", format_f64(t), f)?;
        }
        for &(x, y) in &b.roc {
            row("roc", format_f64(x), y)?;
        }
        for p in &b.scaling {
            row("scaling", p.n.to_string(), p.median_seconds)?;
        }
        if b.scaling.is_empty() {
            for (i, &t) in b.runtimes.iter().enumerate() {
                row("runtime", i.to_string(), t)?;
            }
        }
    }
    wr.flush().map_err(|e| CliError::Write(e.to_string()))
}

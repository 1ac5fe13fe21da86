//! Regenerates the shipped fixtures:
//!
//! ```text
//! cargo run -p multicmh-cli --example make_fixtures
//! ```
//!
//! `planted.csv` is 200 rows of the planted-window model (seed 2024,
//! stream 0, two conditioning columns) and `planted_report.json` is the
//! default `test` report on it. `cmh_two_strata.csv` holds two strata whose
//! tables are both (3, 0, 0, 3).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use multicmh::report::to_json_string;
use multicmh::sim::{gen_planted, stream_rng};
use multicmh_cli::args::{Format, InputArgs, OutputArgs, ScanArgs, TestArgs};
use multicmh_cli::cmd_test;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir).unwrap();

    let data = gen_planted(200, 2, &mut stream_rng(2024, 0));
    let mut csv = String::from("x,y,z1,z2\n");
    for i in 0..data.len() {
        let z = data.z_row(i);
        writeln!(csv, "{},{},{},{}", data.x()[i], data.y()[i], z[0], z[1]).unwrap();
    }
    fs::write(dir.join("planted.csv"), csv).unwrap();

    let args = TestArgs {
        input: InputArgs {
            input: dir.join("planted.csv"),
            x: "x".into(),
            y: "y".into(),
            z: vec!["z1".into(), "z2".into()],
        },
        scan: ScanArgs {
            eta: 10,
            kmax: 7,
            v_all: 20,
            v_margin: 10,
            alpha: 0.05,
            strata_floor: None,
        },
        output: OutputArgs {
            out: None,
            format: Format::Json,
            workers: None,
        },
        x_arity: None,
        y_arity: None,
        seed: None,
    };
    let report = cmd_test(&args).unwrap();
    fs::write(dir.join("planted_report.json"), to_json_string(&report)).unwrap();

    let mut cmh = String::from("x,y,z\n");
    for (k, (x, y)) in [(0, 0), (0, 0), (0, 0), (1, 1), (1, 1), (1, 1)]
        .iter()
        .cycle()
        .take(12)
        .enumerate()
    {
        writeln!(cmh, "{x},{y},{k}").unwrap();
    }
    fs::write(dir.join("cmh_two_strata.csv"), cmh).unwrap();
}

//! Command-line front end: `test` runs the multiscale scan on a CSV file,
//! `cmh` runs a single stratified CMH test on binary columns, and `sim`
//! runs the simulation protocols. Errors print as one JSON line on standard
//! error; exit code 2 marks bad input and 3 an internal invariant failure.

pub mod args;
pub mod error;
pub mod run;

pub use args::Cli;
pub use error::CliError;
pub use run::{cmd_cmh, cmd_sim, cmd_test, run, CmhOutput};

use clap::Parser;
use multicmh_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli.command) {
        eprintln!("{}", e.to_line());
        std::process::exit(e.exit_code());
    }
}

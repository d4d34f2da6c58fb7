use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coulomb_cli::{configure_threads, run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let out = run(&RunConfig::from(cli));
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", out.stderr);
    ExitCode::from(out.status as u8)
}

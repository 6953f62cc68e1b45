use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    pfaffkp_cli::run(pfaffkp_cli::Cli::parse())
}

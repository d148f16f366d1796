use std::process::ExitCode;

use clap::Parser;
use driven_ising_cli::config::Cli;
use driven_ising_cli::{configure_threads, execute};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| execute(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

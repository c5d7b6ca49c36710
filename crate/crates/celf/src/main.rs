use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = celf::cli::Cli::parse();
    match celf::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

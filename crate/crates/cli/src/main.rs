use std::process::ExitCode;

use clap::Parser;
use pcx_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match pcx_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(pcx_cli::exit_code(&err))
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use heegner_aj::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match heegner_aj::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(heegner_aj::CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code())
        }
    }
}

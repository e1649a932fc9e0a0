mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::EXIT_USAGE;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let budget = cli.time_budget_ms;
    let result = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Overlay(args) => commands::overlay(args),
        Command::Reliability(args) => commands::reliability(args, budget),
        Command::Compare(args) => commands::compare(args, budget),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

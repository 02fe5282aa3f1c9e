use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;
mod io;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Density(a) => commands::density::run(a),
        Command::Attend(a) => commands::attend::run(a),
        Command::Fit(a) => commands::fit::run(a),
        Command::Check(a) => commands::check::run(a, cli.seed),
        Command::Demo(a) => commands::demo::run(a, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! `mitest` command-line front end.

mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, Common};
use commands::CliError;

fn common(c: &Command) -> &Common {
    match c {
        Command::Test(a) => &a.common,
        Command::Weights(a) => &a.common,
        Command::Simulate(a) => &a.common,
        Command::Power(a) => &a.common,
        Command::Bin(a) => &a.common,
        Command::VerifyConjecture(a) => &a.common,
        Command::Curve(a) => &a.common,
    }
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write '{}': {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let common = common(&cli.command);
    let result = commands::run(&cli.command).and_then(|outcome| {
        let text = if common.csv {
            outcome.csv.clone()
        } else {
            let timing = common.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            report::to_json(&outcome, timing)
        };
        emit(common, &text)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mitest: error: {}", e.message().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

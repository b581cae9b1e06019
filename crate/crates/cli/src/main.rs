mod cli;
mod commands;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::ExitStatus;

fn run(cli: Cli) -> commands::Outcome {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    match cli.command {
        Command::Validate { path, lenient } => commands::validate(&path, lenient, &mut err),
        Command::Score { path, format, node, precision, lenient } => {
            commands::score(&path, format, node.as_deref(), precision, lenient, &mut out, &mut err)
        }
        Command::Compare { paths, precision } => commands::compare(&paths, precision, &mut out, &mut err),
        Command::Whatif { path, set, weights, precision } => {
            commands::whatif(&path, &set, weights.as_ref(), precision, &mut out, &mut err)
        }
        Command::Series { paths, precision } => commands::series(&paths, precision, &mut out, &mut err),
        Command::Rubric => commands::rubric(&mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(ExitStatus::Usage.code() as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(ExitStatus::Success.code() as u8),
        Err(failure) => {
            let mut err = io::stderr().lock();
            for line in &failure.lines {
                let _ = writeln!(err, "{line}");
            }
            ExitCode::from(failure.status.code() as u8)
        }
    }
}

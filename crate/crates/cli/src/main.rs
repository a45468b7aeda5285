use std::io::Write;
use std::process::ExitCode;

use aim_cli::args::Cli;
use aim_cli::{execute, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let run = RunConfig::from_args(cli.command).and_then(|cfg| {
        let outcome = execute(&cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, &outcome.output)?,
            None => std::io::stdout().write_all(outcome.output.as_bytes())?,
        }
        Ok(outcome)
    });
    match run {
        Ok(outcome) => {
            for m in &outcome.messages {
                eprintln!("aim: {m}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("aim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use crate::args::Cli;
use crate::output::CliError;

const THREADS_VAR: &str = "SL_EXTREMAL_THREADS";

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::input("InvalidArgument", format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::io(format!("cannot start thread pool: {e}")))
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let message = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let message = message.trim_start_matches("error: ");
            eprintln!("{}", json!({ "error": "Usage", "message": message }));
            return ExitCode::from(2);
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let result = pool.install(|| commands::run(&cli.command));
    match result.and_then(|(artifact, path)| artifact.write(path.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

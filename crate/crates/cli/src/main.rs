use std::process::ExitCode;

use clap::Parser;
use geophase_cli::args::Cli;
use geophase_cli::error::CliError;

const THREADS_VAR: &str = "GEOPHASE_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR}='{raw}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = init_threads()
        .and_then(|()| geophase_cli::run(&cli.command))
        .unwrap_or_else(|e| {
            eprintln!("geophase: {e}");
            e.exit_code()
        });
    ExitCode::from(code as u8)
}

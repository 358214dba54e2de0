//! Command-line front end for `geophase`.
//!
//! Every command resolves a [`config::RunConfig`], computes its results in
//! memory and hands back [`output::Artifact`]s; [`run`] writes them
//! atomically. Files are byte-identical for identical configurations,
//! whatever the size of the thread pool.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use args::Command;
use commands::Outcome;
use error::CliResult;

/// Runs one command and writes its files; returns the exit code.
pub fn run(command: &Command) -> CliResult<i32> {
    let (opts, f): (_, fn(&config::RunConfig) -> CliResult<Outcome>) = match command {
        Command::Schema => {
            print!("{}", output::SCHEMA);
            return Ok(0);
        }
        Command::Phase(o) => (o, commands::phase),
        Command::Sweep(o) => (o, commands::sweep),
        Command::Transition(o) => (o, commands::transition),
        Command::Mc(o) => (o, commands::mc),
        Command::Surface(o) => (o, commands::surface),
    };
    let cfg = opts.resolve()?;
    let started = std::time::Instant::now();
    let outcome = f(&cfg)?;
    output::write_all(&cfg.out_dir(), &outcome.artifacts)?;
    println!("{}", outcome.stdout);
    eprintln!("elapsed {:.3} s", started.elapsed().as_secs_f64());
    Ok(outcome.exit_code)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_angle, parse_jump, Format, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "geophase",
    version,
    about = "Measurement-induced geometric phases on a qutrit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interference phase and contrast of one protocol run.
    Phase(Opts),
    /// Dense (theta, m) map as CSV plus a gnuplot script.
    Sweep(Opts),
    /// Critical strength of the winding transition.
    Transition(Opts),
    /// Monte Carlo trajectories against the closed form.
    Mc(Opts),
    /// Bloch-sphere trajectory surface and its degree.
    Surface(Opts),
    /// Print the JSON schema of result envelopes.
    Schema,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Polar angle in radians, or degrees with a `deg` suffix.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Measurement strength m = exp(-gamma tau) in [0, 1].
    #[arg(long, conflicts_with = "gamma_tau")]
    pub m: Option<f64>,
    /// Measurement strength as gamma tau >= 0.
    #[arg(long)]
    pub gamma_tau: Option<f64>,
    /// Number of measurements [default: 6].
    #[arg(long)]
    pub n_meas: Option<usize>,
    /// Reference weight |a_g|^2 [default: 0.5].
    #[arg(long)]
    pub ref_weight: Option<f64>,
    /// Use explicit projectors (requires m = 0).
    #[arg(long)]
    pub projective: bool,
    /// Theta grid A:B:K [default: 0:pi:64].
    #[arg(long)]
    pub grid_theta: Option<String>,
    /// Strength grid A:B:K over m [default: 0:1:64].
    #[arg(long)]
    pub grid_m: Option<String>,
    /// Monte Carlo trajectories [default: 100000].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Monte Carlo seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bracket width for the transition search [default: 1e-4].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Polar angles on the trajectory surface [default: 64].
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Interpolated points per path segment [default: 8].
    #[arg(long)]
    pub interp: Option<usize>,
    /// Fail unless the equatorial jump matches this angle (`pi` accepted).
    #[arg(long)]
    pub assert_jump: Option<String>,
    /// Output directory [default: .].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output files to write [default: both].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Opts {
    /// Configuration file (if any) overlaid with the flags.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let flags = RunConfig {
            theta: self.theta.as_deref().map(parse_angle).transpose()?,
            m: self.m,
            gamma_tau: self.gamma_tau,
            n_meas: self.n_meas,
            ref_weight: self.ref_weight,
            projective: self.projective.then_some(true),
            grid_theta: self.grid_theta.clone(),
            grid_m: self.grid_m.clone(),
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            n_theta: self.n_theta,
            interp: self.interp,
            assert_jump: self.assert_jump.as_deref().map(parse_jump).transpose()?,
            format: self.format,
            out: self.out.clone(),
            phi_schedule: None,
        };
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(flags))
    }
}

//! Run configuration: JSON file values overlaid by command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use geophase::measurement::Strength;
use geophase::protocol::{ProtocolSpec, DEFAULT_N_MEAS, DEFAULT_REFERENCE_WEIGHT};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MAX_CELLS: usize = 1_000_000;
pub const DEFAULT_GRID_THETA: &str = "0:3.141592653589793:64";
pub const DEFAULT_GRID_M: &str = "0:1:64";
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_N_THETA: usize = 64;
pub const DEFAULT_INTERP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Every option of every command. Angles are radians.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_meas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_schedule: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ref_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projective: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_theta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interp: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_jump: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Output directory; never echoed into results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `top` win. A strength given in `top` in either
    /// parameterization replaces both strength fields of `self`.
    pub fn overlay(mut self, top: RunConfig) -> RunConfig {
        if top.m.is_some() || top.gamma_tau.is_some() {
            self.m = None;
            self.gamma_tau = None;
        }
        let base = self;
        overlay!(base, top; theta, m, gamma_tau, n_meas, phi_schedule, ref_weight, projective,
            grid_theta, grid_m, samples, seed, tol, n_theta, interp, assert_jump, format, out)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn is_projective(&self) -> bool {
        self.projective.unwrap_or(false)
    }

    pub fn theta(&self) -> CliResult<f64> {
        let t = self
            .theta
            .ok_or_else(|| CliError::Config("--theta is required".into()))?;
        if !(0.0..=PI).contains(&t) {
            return Err(CliError::Config(format!("theta {t} outside [0, π]")));
        }
        Ok(t)
    }

    pub fn strength(&self) -> CliResult<Strength> {
        let s = match (self.m, self.gamma_tau) {
            (Some(_), Some(_)) => return Err(CliError::Config("m and gamma_tau are mutually exclusive".into())),
            (Some(m), None) => Strength::new(m)?,
            (None, Some(g)) => Strength::from_gamma_tau(g)?,
            (None, None) if self.is_projective() => Strength::PROJECTIVE,
            (None, None) => return Err(CliError::Config("--m or --gamma-tau is required".into())),
        };
        if self.is_projective() && !s.is_projective() {
            return Err(CliError::Config(format!("--projective needs m = 0, got m = {}", s.m())));
        }
        Ok(s)
    }

    /// Protocol at `theta` and `strength`, with the schedule and reference
    /// weight of this configuration.
    pub fn protocol(&self, theta: f64, strength: Strength) -> CliResult<ProtocolSpec> {
        let mut spec = ProtocolSpec::new(theta, strength)?;
        match (&self.phi_schedule, self.n_meas) {
            (Some(s), Some(n)) if s.len() != n => {
                return Err(CliError::Config(format!(
                    "phi_schedule has {} entries but n_meas is {n}",
                    s.len()
                )))
            }
            (Some(s), _) => spec = spec.with_schedule(s.clone())?,
            (None, Some(n)) => spec = spec.with_n_meas(n)?,
            (None, None) => {}
        }
        Ok(spec.with_reference_weight(self.ref_weight.unwrap_or(DEFAULT_REFERENCE_WEIGHT))?)
    }

    /// Echo of the sequence fields, for result envelopes.
    pub fn sequence_echo(&self) -> RunConfig {
        RunConfig {
            n_meas: Some(
                self.phi_schedule
                    .as_ref()
                    .map_or(self.n_meas.unwrap_or(DEFAULT_N_MEAS), Vec::len),
            ),
            phi_schedule: self.phi_schedule.clone(),
            ref_weight: Some(self.ref_weight.unwrap_or(DEFAULT_REFERENCE_WEIGHT)),
            ..RunConfig::default()
        }
    }
}

/// `A:B:K`, `K` evenly spaced values from `A` to `B` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(s: &str, angle: bool) -> CliResult<Grid> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, k] = parts[..] else {
            return Err(CliError::Config(format!("grid '{s}' is not of the form A:B:K")));
        };
        let value = |x: &str| if angle { parse_angle(x) } else { parse_number(x) };
        let count: usize = k
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("grid count '{k}' is not a positive integer")))?;
        if count == 0 {
            return Err(CliError::Config("grid count must be positive".into()));
        }
        let grid = Grid {
            start: value(a)?,
            stop: value(b)?,
            count,
        };
        if count > 1 && grid.stop <= grid.start {
            return Err(CliError::Config(format!("grid '{s}' must ascend")));
        }
        Ok(grid)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|k| {
                if k == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (k as f64 / last as f64)
                }
            })
            .collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

pub fn parse_number(s: &str) -> CliResult<f64> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::Config(format!("'{s}' is not a finite number"))),
    }
}

/// Radians, or degrees with a `deg` suffix.
pub fn parse_angle(s: &str) -> CliResult<f64> {
    let s = s.trim();
    match s.strip_suffix("deg") {
        Some(d) => Ok(parse_number(d)?.to_radians()),
        None => parse_number(s),
    }
}

/// Like [`parse_angle`], also accepting `pi`.
pub fn parse_jump(s: &str) -> CliResult<f64> {
    if s.trim().eq_ignore_ascii_case("pi") {
        Ok(PI)
    } else {
        parse_angle(s)
    }
}

//! Dense `(θ, m)` maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::angle_diff;
use crate::error::{domain, Result};
use crate::measurement::Strength;
use crate::protocol::{run_protocol_analytic, ProtocolSpec};

/// Row-major `θ × m` map; cell `(i, j)` lives at `i * strength_grid.len() + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMap {
    pub theta_grid: Vec<f64>,
    pub strength_grid: Vec<Strength>,
    pub n_meas: usize,
    pub reference_weight: f64,
    pub phi_schedule: Vec<f64>,
    pub chi_wrapped: Vec<f64>,
    /// Unwrapped along `θ` within each strength column; `NaN` where undefined.
    pub chi_unwrapped: Vec<f64>,
    pub contrast: Vec<f64>,
    pub defined: Vec<bool>,
}

impl PhaseMap {
    pub fn n_theta(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn n_strength(&self) -> usize {
        self.strength_grid.len()
    }

    pub fn index(&self, i_theta: usize, j_strength: usize) -> usize {
        i_theta * self.n_strength() + j_strength
    }

    /// `(i_theta, j_strength)` of the smallest contrast; ties go to the
    /// first cell in row-major order.
    pub fn contrast_minimum(&self) -> (usize, usize) {
        let k = self
            .contrast
            .iter()
            .enumerate()
            .fold(0, |best, (k, &c)| if c < self.contrast[best] { k } else { best });
        (k / self.n_strength(), k % self.n_strength())
    }
}

/// Evaluates every cell independently; the result does not depend on the
/// size of the thread pool.
pub fn sweep_phase_map(template: &ProtocolSpec, theta_grid: &[f64], strength_grid: &[Strength]) -> Result<PhaseMap> {
    if theta_grid.is_empty() || strength_grid.is_empty() {
        return Err(domain("sweep grids must be nonempty"));
    }
    template.validate()?;
    let (nt, nm) = (theta_grid.len(), strength_grid.len());
    let cells: Vec<(f64, f64, bool)> = (0..nt * nm)
        .into_par_iter()
        .map(|k| {
            let spec = template
                .clone()
                .with_strength(strength_grid[k % nm])
                .with_theta(theta_grid[k / nm])?;
            let (r, _) = run_protocol_analytic(&spec)?;
            Ok((r.phase, r.contrast, r.phase_defined))
        })
        .collect::<Result<_>>()?;

    let mut chi_unwrapped = vec![f64::NAN; nt * nm];
    for j in 0..nm {
        let mut prev: Option<f64> = None;
        for i in 0..nt {
            let (chi, _, defined) = cells[i * nm + j];
            if !defined {
                continue;
            }
            let v = prev.map_or(chi, |p| p + angle_diff(chi, p));
            chi_unwrapped[i * nm + j] = v;
            prev = Some(v);
        }
    }

    Ok(PhaseMap {
        theta_grid: theta_grid.to_vec(),
        strength_grid: strength_grid.to_vec(),
        n_meas: template.n_meas(),
        reference_weight: template.reference_weight,
        phi_schedule: template.phi_schedule.clone(),
        chi_wrapped: cells.iter().map(|c| c.0).collect(),
        chi_unwrapped,
        contrast: cells.iter().map(|c| c.1).collect(),
        defined: cells.iter().map(|c| c.2).collect(),
    })
}

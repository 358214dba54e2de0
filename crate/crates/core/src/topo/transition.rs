//! Locating the strength at which the winding is lost.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::curve::chern_at;
use crate::angle::angle_diff;
use crate::error::{domain, Error, Result};
use crate::measurement::Strength;
use crate::protocol::{run_protocol_analytic, ProtocolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionOptions {
    /// Target bracket width in `m`.
    pub tol: f64,
    /// Strengths probed before bisection starts.
    pub scan_points: usize,
    /// Accepted deviation of the equatorial jump from π.
    pub jump_tol: f64,
}

impl Default for TransitionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            scan_points: 21,
            jump_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub n_meas: usize,
    pub reference_weight: f64,
    pub m_star: Strength,
    pub gamma_tau_star: f64,
    pub bracket: (f64, f64),
    pub contrast_min: f64,
    pub chern_below: i32,
    pub chern_above: i32,
    /// `|χ(π/2, m_hi) − χ(π/2, m_lo)|` on the circle.
    pub jump_at_equator: f64,
    pub chern_evaluations: usize,
}

fn equator(template: &ProtocolSpec, m: f64) -> Result<(f64, f64)> {
    let spec = template
        .clone()
        .with_strength(Strength::new(m)?)
        .with_theta(FRAC_PI_2)?;
    let (r, _) = run_protocol_analytic(&spec)?;
    Ok((r.contrast, r.phase))
}

// Golden-section search for the minimum of a unimodal function.
fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { c } else { d })
}

/// Bisects the Chern flip of the sequence in `template` (its `θ` and
/// strength are ignored), then pins `m*` at the equatorial contrast minimum
/// inside the final bracket.
pub fn find_critical_strength(template: &ProtocolSpec, opts: &TransitionOptions) -> Result<TransitionReport> {
    if !(opts.tol >= 1e-6) {
        return Err(domain(format!("tolerance {} below 1e-6", opts.tol)));
    }
    if opts.scan_points < 2 {
        return Err(domain("need at least two scan points"));
    }
    let mut evaluations = 0usize;
    let mut chern = |m: f64| -> Result<i32> {
        evaluations += 1;
        chern_at(template, Strength::new(m)?)
    };

    let scan: Vec<f64> = (0..opts.scan_points)
        .map(|k| k as f64 / (opts.scan_points - 1) as f64)
        .collect();
    let mut prev = (scan[0], chern(scan[0])?);
    let mut bracket = None;
    for &m in &scan[1..] {
        let c = chern(m)?;
        if c != prev.1 {
            bracket = Some((prev, (m, c)));
            break;
        }
        prev = (m, c);
    }
    let Some(((mut lo, c_lo), (mut hi, c_hi))) = bracket else {
        return Err(Error::NoTransition(format!(
            "Chern number is {} across the whole scan of m ∈ [0, 1]",
            prev.1
        )));
    };

    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        // a midpoint landing on the singularity itself has no Chern number
        let c = match chern(mid) {
            Ok(c) => c,
            Err(Error::UndefinedChern(_)) => chern(mid + 0.01 * (hi - lo))?,
            Err(e) => return Err(e),
        };
        if c == c_lo {
            lo = mid;
        } else if c == c_hi {
            hi = mid;
        } else {
            return Err(Error::NoTransition(format!(
                "Chern number {c} at m = {mid} is neither {c_lo} nor {c_hi}"
            )));
        }
    }

    let m_star = golden_min(lo, hi, |m| Ok(equator(template, m)?.0))?;
    let contrast_min = equator(template, m_star)?.0;
    let jump = angle_diff(equator(template, hi)?.1, equator(template, lo)?.1).abs();
    if (jump - PI).abs() > opts.jump_tol {
        return Err(Error::Numeric {
            what: "equatorial phase jump across the bracket".into(),
            residual: (jump - PI).abs(),
        });
    }
    let m_star = Strength::new(m_star)?;
    Ok(TransitionReport {
        n_meas: template.n_meas(),
        reference_weight: template.reference_weight,
        m_star,
        gamma_tau_star: m_star.gamma_tau(),
        bracket: (lo, hi),
        contrast_min,
        chern_below: c_lo,
        chern_above: c_hi,
        jump_at_equator: jump,
        chern_evaluations: evaluations,
    })
}

//! `χ(θ)` curves and their winding.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angle::angle_diff;
use crate::error::{domain, Error, Result};
use crate::measurement::Strength;
use crate::protocol::{run_protocol_analytic, ProtocolSpec, CONTRAST_FLOOR};

/// Knobs for adaptive sampling and unwrapping of a [`PhaseCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    /// Upper bound on the number of nodes after refinement.
    pub max_nodes: usize,
    /// Intervals whose wrapped phase step exceeds this are bisected.
    pub refine_step: f64,
    /// Largest accepted phase step between adjacent defined nodes.
    pub max_step: f64,
    /// Intervals narrower than this are never split.
    pub min_width: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            max_nodes: 4096,
            refine_step: PI / 8.0,
            max_step: PI / 2.0,
            min_width: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurve {
    pub theta_grid: Vec<f64>,
    /// Unwrapped phase, `NaN` on masked nodes.
    pub chi: Vec<f64>,
    pub contrast: Vec<f64>,
    pub strength: Strength,
    pub undefined_mask: Vec<bool>,
    pub unwrappable: bool,
}

impl PhaseCurve {
    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }

    /// Largest phase step between adjacent defined nodes.
    pub fn max_step(&self) -> f64 {
        let defined: Vec<f64> = self
            .chi
            .iter()
            .zip(&self.undefined_mask)
            .filter(|(_, &u)| !u)
            .map(|(&c, _)| c)
            .collect();
        defined.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }
}

/// `n` evenly spaced nodes on `[0, π]`, both ends included.
pub fn theta_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two nodes");
    (0..n)
        .map(|k| if k + 1 == n { PI } else { PI * k as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Clone, Copy)]
struct Node {
    theta: f64,
    chi: f64,
    contrast: f64,
    defined: bool,
}

fn evaluate(template: &ProtocolSpec, s: Strength, theta: f64) -> Result<Node> {
    let spec = template.clone().with_strength(s).with_theta(theta)?;
    let (r, _) = run_protocol_analytic(&spec)?;
    Ok(Node {
        theta,
        chi: r.phase,
        contrast: r.contrast,
        defined: r.contrast > CONTRAST_FLOOR,
    })
}

fn needs_split(a: &Node, b: &Node, opts: &CurveOptions) -> bool {
    if b.theta - a.theta < opts.min_width {
        return false;
    }
    !(a.defined && b.defined) || angle_diff(b.chi, a.chi).abs() > opts.refine_step
}

/// Samples `χ(θ)` for the sequence described by `template` (its own `θ` and
/// strength are ignored) at strength `s`, bisecting intervals until the
/// phase is resolved, then unwraps from `χ(0) = 0`.
pub fn phase_vs_theta(template: &ProtocolSpec, s: Strength, grid: &[f64], opts: &CurveOptions) -> Result<PhaseCurve> {
    if grid.len() < 2 {
        return Err(domain("a phase curve needs at least two nodes"));
    }
    if grid[0] != 0.0 {
        return Err(domain("the θ grid must start at 0"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("the θ grid must be strictly ascending"));
    }
    if grid.len() > opts.max_nodes {
        return Err(domain(format!(
            "grid of {} nodes exceeds the cap of {}",
            grid.len(),
            opts.max_nodes
        )));
    }
    let mut nodes = grid
        .iter()
        .map(|&t| evaluate(template, s, t))
        .collect::<Result<Vec<_>>>()?;

    loop {
        let split: Vec<usize> = (0..nodes.len() - 1)
            .filter(|&i| needs_split(&nodes[i], &nodes[i + 1], opts))
            .take(opts.max_nodes - nodes.len())
            .collect();
        if split.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(nodes.len() + split.len());
        let mut it = split.iter().peekable();
        for i in 0..nodes.len() {
            next.push(nodes[i]);
            if it.peek() == Some(&&i) {
                it.next();
                let mid = 0.5 * (nodes[i].theta + nodes[i + 1].theta);
                next.push(evaluate(template, s, mid)?);
            }
        }
        nodes = next;
    }

    let mut chi = vec![f64::NAN; nodes.len()];
    let mut unwrappable = true;
    let mut prev: Option<f64> = None;
    for (k, n) in nodes.iter().enumerate() {
        if !n.defined {
            continue;
        }
        let v = match prev {
            None => n.chi,
            Some(p) => {
                let d = angle_diff(n.chi, p);
                if d.abs() > opts.max_step {
                    unwrappable = false;
                }
                p + d
            }
        };
        chi[k] = v;
        prev = Some(v);
    }
    if let Some(anchor) = nodes[0].defined.then_some(chi[0]) {
        for c in chi.iter_mut() {
            *c -= anchor;
        }
    }

    Ok(PhaseCurve {
        theta_grid: nodes.iter().map(|n| n.theta).collect(),
        chi,
        contrast: nodes.iter().map(|n| n.contrast).collect(),
        strength: s,
        undefined_mask: nodes.iter().map(|n| !n.defined).collect(),
        unwrappable,
    })
}

pub const CHERN_RESIDUAL_TOL: f64 = 0.05;

/// `round((χ(π) − χ(0)) / 2π)`, refusing curves whose winding is not close
/// to an integer within `residual_tol`.
pub fn chern_from_curve_with_tol(curve: &PhaseCurve, residual_tol: f64) -> Result<i32> {
    if !curve.unwrappable {
        return Err(Error::UndefinedChern(format!(
            "curve at m = {} could not be unwrapped",
            curve.strength.m()
        )));
    }
    let (Some(&first), Some(&last)) = (curve.chi.first(), curve.chi.last()) else {
        return Err(Error::UndefinedChern("empty curve".into()));
    };
    if !first.is_finite() || !last.is_finite() {
        return Err(Error::UndefinedChern("curve endpoints are masked".into()));
    }
    if (curve.theta_grid[curve.len() - 1] - PI).abs() > 1e-12 {
        return Err(Error::UndefinedChern("curve does not reach θ = π".into()));
    }
    let raw = (last - first) / TAU;
    let c = raw.round();
    let residual = (raw - c).abs();
    if residual >= residual_tol {
        return Err(Error::UndefinedChern(format!(
            "winding {raw:.4} is {residual:.3} away from an integer"
        )));
    }
    Ok(c as i32)
}

pub fn chern_from_curve(curve: &PhaseCurve) -> Result<i32> {
    chern_from_curve_with_tol(curve, CHERN_RESIDUAL_TOL)
}

/// Chern number at strength `s` from a 65-node seed grid.
pub fn chern_at(template: &ProtocolSpec, s: Strength) -> Result<i32> {
    let curve = phase_vs_theta(template, s, &theta_grid(65), &CurveOptions::default())?;
    chern_from_curve(&curve)
}

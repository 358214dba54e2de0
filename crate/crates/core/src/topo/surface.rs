//! The closed surface swept by the Bloch paths of all `θ`, and its degree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::geometry::triangle_solid_angle;
use crate::error::{domain, Error, Result};
use crate::measurement::Strength;
use crate::protocol::{run_protocol_analytic, ProtocolSpec};
use crate::qutrit::BlochVector;

pub const MIN_THETA_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceOptions {
    pub n_theta: usize,
    pub interp_per_segment: usize,
    pub residual_tol: f64,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self {
            n_theta: 64,
            interp_per_segment: 8,
            residual_tol: 0.05,
        }
    }
}

/// One closed Bloch path. `points` does not repeat its first entry; `step`
/// holds the path parameter in units of measurement steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLoop {
    pub theta: f64,
    pub step: Vec<f64>,
    pub points: Vec<BlochVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDegree {
    pub degree: i32,
    pub raw: f64,
    pub residual: f64,
}

fn check_arc(a: &BlochVector, b: &BlochVector, theta: f64, segment: usize) -> Result<()> {
    if a.dot(b) < -1.0 + 1e-10 {
        return Err(Error::SingularSurface { theta, segment });
    }
    Ok(())
}

/// Geodesically interpolated path through the initial axis, every
/// post-measurement state and back along the closing arc.
pub fn surface_loop(template: &ProtocolSpec, s: Strength, theta: f64, interp: usize) -> Result<SurfaceLoop> {
    if interp == 0 {
        return Err(domain("interp_per_segment must be positive"));
    }
    let spec = template.clone().with_strength(s).with_theta(theta)?;
    let (_, record) = run_protocol_analytic(&spec)?;
    let mut vertices = vec![spec.initial_axis().bloch()];
    for (k, step) in record.steps.iter().enumerate() {
        vertices.push(step.post.ok_or(Error::SingularSurface { theta, segment: k })?);
    }
    vertices.push(spec.closing_axis().bloch());

    let mut points = Vec::with_capacity((vertices.len() - 1) * interp);
    let mut steps = Vec::with_capacity(points.capacity());
    for (seg, pair) in vertices.windows(2).enumerate() {
        check_arc(&pair[0], &pair[1], theta, seg)?;
        for j in 0..interp {
            let t = j as f64 / interp as f64;
            points.push(pair[0].slerp(&pair[1], t)?);
            steps.push(seg as f64 + t);
        }
    }
    Ok(SurfaceLoop {
        theta,
        step: steps,
        points,
    })
}

/// Loops on `n_theta` evenly spaced polar angles in `[0, π]`.
pub fn surface_loops(template: &ProtocolSpec, s: Strength, opts: &SurfaceOptions) -> Result<Vec<SurfaceLoop>> {
    if opts.n_theta < MIN_THETA_NODES {
        return Err(domain(format!(
            "surface needs at least {MIN_THETA_NODES} θ nodes, got {}",
            opts.n_theta
        )));
    }
    super::curve::theta_grid(opts.n_theta)
        .into_iter()
        .map(|t| surface_loop(template, s, t, opts.interp_per_segment))
        .collect()
}

/// Signed area of the tiled surface divided by `4π`. Each quad spans
/// `(θ_i, j) → (θ_{i+1}, j) → (θ_{i+1}, j+1) → (θ_i, j+1)`.
pub fn degree_of_loops(loops: &[SurfaceLoop]) -> f64 {
    let mut total = 0.0;
    for pair in loops.windows(2) {
        let (a, b) = (&pair[0].points, &pair[1].points);
        let n = a.len();
        for j in 0..n {
            let k = (j + 1) % n;
            total += triangle_solid_angle(&a[j], &b[j], &b[k]);
            total += triangle_solid_angle(&a[j], &b[k], &a[k]);
        }
    }
    total / (4.0 * PI)
}

/// Rounds [`degree_of_loops`] to an integer, failing if the raw value is not
/// within `residual_tol` of one.
pub fn degree_from_loops(loops: &[SurfaceLoop], residual_tol: f64) -> Result<SurfaceDegree> {
    let raw = degree_of_loops(loops);
    let degree = raw.round();
    let residual = (raw - degree).abs();
    if residual >= residual_tol {
        return Err(Error::Numeric {
            what: "surface degree".into(),
            residual,
        });
    }
    Ok(SurfaceDegree {
        degree: degree as i32,
        raw,
        residual,
    })
}

pub fn surface_degree(template: &ProtocolSpec, s: Strength, opts: &SurfaceOptions) -> Result<SurfaceDegree> {
    degree_from_loops(&surface_loops(template, s, opts)?, opts.residual_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tpl() -> ProtocolSpec {
        ProtocolSpec::new(0.0, Strength::PROJECTIVE).unwrap()
    }

    fn deg(m: f64) -> i32 {
        surface_degree(&tpl(), Strength::new(m).unwrap(), &SurfaceOptions::default())
            .unwrap()
            .degree
    }

    #[test]
    fn strong_measurements_wrap() {
        assert_eq!(deg(0.01), 1);
        assert_eq!(deg(0.05), 1);
    }

    #[test]
    fn weak_measurements_do_not_wrap() {
        assert_eq!(deg(0.95), 0);
        assert_eq!(deg(0.99), 0);
    }

    #[test]
    fn loops_are_closed_and_on_the_sphere() {
        let loops = surface_loops(&tpl(), Strength::new(0.3).unwrap(), &SurfaceOptions::default()).unwrap();
        assert_eq!(loops.len(), 64);
        for l in &loops {
            assert_eq!(l.points.len(), 7 * 8);
            assert!(l.points.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        }
        assert!(loops[0].points.iter().all(|p| p.z > 1.0 - 1e-12));
        assert!(loops[63].points.iter().all(|p| p.z < -1.0 + 1e-12));
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let o = SurfaceOptions {
            n_theta: 16,
            ..SurfaceOptions::default()
        };
        assert!(surface_degree(&tpl(), Strength::new(0.5).unwrap(), &o).is_err());
        let o = SurfaceOptions {
            interp_per_segment: 0,
            ..SurfaceOptions::default()
        };
        assert!(surface_degree(&tpl(), Strength::new(0.5).unwrap(), &o).is_err());
    }
}

//! Topology of the phase family: geometric oracles, `χ(θ)` curves, the
//! Chern number, the Bloch-surface degree, the critical strength and dense
//! parameter maps.

pub mod curve;
pub mod geometry;
pub mod surface;
pub mod sweep;
pub mod transition;

pub use curve::{
    chern_at, chern_from_curve, chern_from_curve_with_tol, phase_vs_theta, theta_grid, CurveOptions, PhaseCurve,
    CHERN_RESIDUAL_TOL,
};
pub use geometry::{bloch_polygon, pancharatnam_phase, solid_angle_polygon, triangle_solid_angle};
pub use surface::{
    degree_from_loops, degree_of_loops, surface_degree, surface_loop, surface_loops, SurfaceDegree, SurfaceLoop,
    SurfaceOptions,
};
pub use sweep::{sweep_phase_map, PhaseMap};
pub use transition::{find_critical_strength, TransitionOptions, TransitionReport};

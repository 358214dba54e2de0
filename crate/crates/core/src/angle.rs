//! Phase bookkeeping.

use std::f64::consts::{PI, TAU};

/// Maps an angle into `(−π, π]`.
pub fn wrap_to_pi(a: f64) -> f64 {
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// Shortest signed distance `a − b` on the circle.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_to_pi(a - b)
}

/// Unwraps a sequence of wrapped phases so that consecutive values differ by
/// at most π. The first value is kept as is.
pub fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    for &p in phases {
        let v = match out.last() {
            Some(&q) => q + angle_diff(p, q),
            None => p,
        };
        out.push(v);
    }
    out
}

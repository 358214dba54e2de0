//! Spherical-geometry and overlap oracles.

use std::f64::consts::{PI, TAU};

use crate::error::{domain, Error, Result};
use crate::qutrit::{bloch_of, BlochVector, QutritState};

/// Signed solid angle of the geodesic triangle `a → b → c`, positive for
/// counter-clockwise order seen from outside the sphere.
pub fn triangle_solid_angle(a: &BlochVector, b: &BlochVector, c: &BlochVector) -> f64 {
    let bc = b.cross(c);
    let triple = a.x * bc[0] + a.y * bc[1] + a.z * bc[2];
    2.0 * triple.atan2(1.0 + a.dot(b) + b.dot(c) + c.dot(a))
}

fn normalize_4pi(omega: f64) -> f64 {
    let mut w = omega.rem_euclid(2.0 * TAU);
    if w > TAU {
        w -= 2.0 * TAU;
    }
    w
}

// Apex for the fan triangulation: the candidate whose antipode stays
// furthest from every vertex.
fn fan_apex(vertices: &[BlochVector]) -> BlochVector {
    let mut candidates = vec![
        BlochVector { x: 1.0, y: 0.0, z: 0.0 },
        BlochVector {
            x: -1.0,
            y: 0.0,
            z: 0.0,
        },
        BlochVector { x: 0.0, y: 1.0, z: 0.0 },
        BlochVector {
            x: 0.0,
            y: -1.0,
            z: 0.0,
        },
        BlochVector { x: 0.0, y: 0.0, z: 1.0 },
        BlochVector {
            x: 0.0,
            y: 0.0,
            z: -1.0,
        },
    ];
    let (sx, sy, sz) = vertices
        .iter()
        .fold((0.0, 0.0, 0.0), |(x, y, z), v| (x + v.x, y + v.y, z + v.z));
    if let Ok(c) = BlochVector::new(sx, sy, sz) {
        candidates.insert(0, c);
    }
    let clearance = |p: &BlochVector| vertices.iter().map(|v| 1.0 + p.dot(v)).fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .map(|p| (clearance(&p), p))
        .fold(None, |best: Option<(f64, BlochVector)>, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("non-empty candidates")
        .1
}

/// Signed solid angle (steradians, in `(−2π, 2π]`) enclosed by the geodesic
/// polygon through `vertices`. A repeated closing vertex is ignored.
pub fn solid_angle_polygon(vertices: &[BlochVector]) -> Result<f64> {
    let mut v: Vec<BlochVector> = vertices.to_vec();
    if v.len() > 1 {
        let (first, last) = (v[0], v[v.len() - 1]);
        if first.angle_to(&last) < 1e-14 {
            v.pop();
        }
    }
    if v.len() < 3 {
        return Err(domain("a spherical polygon needs at least three vertices"));
    }
    for (k, a) in v.iter().enumerate() {
        let b = &v[(k + 1) % v.len()];
        if a.dot(b) < -1.0 + 1e-12 {
            return Err(Error::Undefined(format!(
                "vertices {k} and {} are antipodal; the edge is not a unique geodesic",
                (k + 1) % v.len()
            )));
        }
    }
    let apex = fan_apex(&v);
    let total: f64 = (0..v.len())
        .map(|k| triangle_solid_angle(&apex, &v[k], &v[(k + 1) % v.len()]))
        .sum();
    Ok(normalize_4pi(total))
}

/// `arg Π_k ⟨ψ_{k+1}|ψ_k⟩` over a closed list (last state equal to the first).
pub fn pancharatnam_phase(states: &[QutritState]) -> Result<f64> {
    if states.len() < 2 {
        return Err(domain("need a closed list of at least two states"));
    }
    let (first, last) = (&states[0], &states[states.len() - 1]);
    let closure = first.inner(last).norm() / (first.norm_sqr() * last.norm_sqr()).sqrt();
    if !(closure > 1.0 - 1e-9) {
        return Err(domain("state list is not closed (last state differs from the first)"));
    }
    let mut product = crate::qutrit::C64::new(1.0, 0.0);
    for (k, pair) in states.windows(2).enumerate() {
        let overlap = pair[1].inner(&pair[0]);
        let scale = (pair[0].norm_sqr() * pair[1].norm_sqr()).sqrt();
        if !(overlap.norm() > 1e-14 * scale) {
            return Err(Error::Undefined(format!("states {k} and {} are orthogonal", k + 1)));
        }
        product *= overlap / overlap.norm();
    }
    let arg = product.arg();
    Ok(if arg <= -PI { arg + TAU } else { arg })
}

/// Bloch polygon of a closed state list, for comparison with
/// [`pancharatnam_phase`].
pub fn bloch_polygon(states: &[QutritState]) -> Result<Vec<BlochVector>> {
    states.iter().map(bloch_of).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::angle_diff;
    use crate::qutrit::{axis_state, MeasurementAxis};
    use proptest::prelude::*;

    fn bv(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    fn state_at(v: &BlochVector) -> QutritState {
        axis_state(&v.to_axis())
    }

    #[test]
    fn octant() {
        let w = solid_angle_polygon(&[bv(1.0, 0.0, 0.0), bv(0.0, 1.0, 0.0), bv(0.0, 0.0, 1.0)]).unwrap();
        assert!((w - PI / 2.0).abs() < 1e-14);
        let r = solid_angle_polygon(&[bv(1.0, 0.0, 0.0), bv(0.0, 0.0, 1.0), bv(0.0, 1.0, 0.0)]).unwrap();
        assert!((r + PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn equatorial_hexagon_bounds_a_hemisphere() {
        let hex: Vec<BlochVector> = (0..6)
            .map(|k| {
                let a = -(k as f64) * PI / 3.0;
                bv(a.cos(), a.sin(), 0.0)
            })
            .collect();
        let w = solid_angle_polygon(&hex).unwrap();
        assert!((w.abs() - TAU).abs() < 1e-12, "{w}");
    }

    #[test]
    fn repeated_vertex_adds_nothing() {
        let tri = [bv(1.0, 0.2, 0.1), bv(0.1, 1.0, 0.3), bv(0.2, 0.1, 1.0)];
        let base = solid_angle_polygon(&tri).unwrap();
        let rep = solid_angle_polygon(&[tri[0], tri[1], tri[1], tri[2]]).unwrap();
        assert!((base - rep).abs() < 1e-14);
    }

    #[test]
    fn antipodal_edge_is_rejected() {
        let r = solid_angle_polygon(&[bv(0.0, 0.0, 1.0), bv(0.0, 0.0, -1.0), bv(1.0, 0.0, 0.0)]);
        assert!(matches!(r, Err(Error::Undefined(_))));
        assert!(solid_angle_polygon(&[bv(0.0, 0.0, 1.0), bv(1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn hexagon_pancharatnam_is_pi() {
        let mut states: Vec<QutritState> = (0..6)
            .map(|k| axis_state(&MeasurementAxis::new(PI / 2.0, -(k as f64) * PI / 3.0).unwrap()))
            .collect();
        states.push(states[0]);
        let chi = pancharatnam_phase(&states).unwrap();
        assert!(angle_diff(chi, PI).abs() < 1e-12);
    }

    #[test]
    fn identical_states_have_no_phase() {
        let s = axis_state(&MeasurementAxis::new(0.9, 0.3).unwrap());
        assert_eq!(pancharatnam_phase(&[s, s, s, s]).unwrap(), 0.0);
    }

    #[test]
    fn pancharatnam_rejects_open_or_orthogonal_lists() {
        let a = axis_state(&MeasurementAxis::new(0.0, 0.0).unwrap());
        let b = axis_state(&MeasurementAxis::new(1.0, 0.0).unwrap());
        let c = axis_state(&MeasurementAxis::new(std::f64::consts::PI, 0.0).unwrap());
        assert!(matches!(pancharatnam_phase(&[a, b]), Err(Error::Domain(_))));
        assert!(matches!(pancharatnam_phase(&[a, c, a]), Err(Error::Undefined(_))));
    }

    proptest! {
        #[test]
        fn three_state_phase_is_half_the_solid_angle(
            t in proptest::array::uniform3(0.05f64..3.09),
            p in proptest::array::uniform3(-3.1f64..3.1),
        ) {
            let verts: Vec<BlochVector> = (0..3)
                .map(|k| MeasurementAxis::new(t[k], p[k]).unwrap().bloch())
                .collect();
            for k in 0..3 {
                prop_assume!(verts[k].dot(&verts[(k + 1) % 3]) > -0.99);
            }
            let states: Vec<QutritState> = verts.iter().chain(std::iter::once(&verts[0])).map(state_at).collect();
            let chi = pancharatnam_phase(&states).unwrap();
            let omega = solid_angle_polygon(&verts).unwrap();
            prop_assert!(angle_diff(chi, omega / 2.0).abs() < 1e-10, "chi={} omega={}", chi, omega);
        }
    }
}

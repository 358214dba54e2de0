//! Complex linear algebra on the three-level system.
//!
//! Amplitudes and matrices are ordered `(f, e, g)`. The `{e, f}` pair forms the
//! measured qubit; `|g⟩` is the untouched reference level.
//!
//! Bloch-sphere convention: `|e⟩` is the north pole and the axis state
//! `|θ, φ⟩ = cos(θ/2)|e⟩ + e^{iφ} sin(θ/2)|f⟩` sits at polar angle `θ` and
//! Bloch azimuth `−φ`, i.e. `x + iy = 2·a_e·conj(a_f)`. With this choice a
//! counter-clockwise (positively oriented) Bloch loop carries a Pancharatnam
//! phase equal to half its signed solid angle.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Index of `|f⟩`.
pub const F: usize = 0;
/// Index of `|e⟩`.
pub const E: usize = 1;
/// Index of `|g⟩`.
pub const G: usize = 2;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Pure state of the qutrit. After a Kraus operator is applied the state is
/// left unnormalized and its squared norm is the outcome probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QutritState {
    pub amps: [C64; 3],
}

impl QutritState {
    pub fn new(f: C64, e: C64, g: C64) -> Self {
        Self { amps: [f, e, g] }
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 3];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn f(&self) -> C64 {
        self.amps[F]
    }

    pub fn e(&self) -> C64 {
        self.amps[E]
    }

    pub fn g(&self) -> C64 {
        self.amps[G]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Squared norm of the `{e, f}` qubit component.
    pub fn qubit_norm_sqr(&self) -> f64 {
        self.amps[F].norm_sqr() + self.amps[E].norm_sqr()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            amps: self.amps.map(|a| a * k),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Undefined("cannot normalize a null state".into()));
        }
        Ok(self.scale(1.0 / n))
    }

    /// Normalized `{e, f}` projection with the `g` amplitude dropped.
    pub fn qubit_part(&self) -> Result<Self> {
        QutritState::new(self.amps[F], self.amps[E], ZERO)
            .normalized()
            .map_err(|_| Error::Undefined("state has no {e,f} component".into()))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QutritState) -> C64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &QutritState) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// 3×3 complex operator in `(f, e, g)` ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Operator3 {
    pub entries: [[C64; 3]; 3],
}

impl Operator3 {
    pub fn zero() -> Self {
        Self {
            entries: [[ZERO; 3]; 3],
        }
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 3])
    }

    pub fn diag(d: [C64; 3]) -> Self {
        let mut op = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            op.entries[i][i] = v;
        }
        op
    }

    pub fn diag_real(d: [f64; 3]) -> Self {
        Self::diag(d.map(|x| C64::new(x, 0.0)))
    }

    /// Rank-one operator `|ket⟩⟨bra|`.
    pub fn outer(ket: &QutritState, bra: &QutritState) -> Self {
        let mut op = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                op.entries[i][j] = ket.amps[i] * bra.amps[j].conj();
            }
        }
        op
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut op = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                op.entries[i][j] = self.entries[j][i].conj();
            }
        }
        op
    }

    pub fn apply(&self, state: &QutritState) -> QutritState {
        let mut amps = [ZERO; 3];
        for (i, out) in amps.iter_mut().enumerate() {
            *out = (0..3).map(|j| self.entries[i][j] * state.amps[j]).sum();
        }
        QutritState { amps }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            entries: self.entries.map(|row| row.map(|x| x * k)),
        }
    }

    pub fn add(&self, other: &Operator3) -> Self {
        let mut op = *self;
        for i in 0..3 {
            for j in 0..3 {
                op.entries[i][j] += other.entries[i][j];
            }
        }
        op
    }

    pub fn max_abs_diff(&self, other: &Operator3) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Operator3::identity()) <= tol
    }

    /// No coupling between `|g⟩` and the `{e, f}` block.
    pub fn is_block_diagonal(&self, tol: f64) -> bool {
        [F, E]
            .iter()
            .all(|&q| self.entries[q][G].norm() <= tol && self.entries[G][q].norm() <= tol)
    }

    pub fn commutator(&self, other: &Operator3) -> Operator3 {
        (*self * *other).add(&(*other * *self).scale(C64::new(-1.0, 0.0)))
    }
}

impl Mul for Operator3 {
    type Output = Operator3;

    fn mul(self, rhs: Operator3) -> Operator3 {
        let mut op = Operator3::zero();
        for i in 0..3 {
            for j in 0..3 {
                op.entries[i][j] = (0..3).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        op
    }
}

impl Mul<QutritState> for Operator3 {
    type Output = QutritState;

    fn mul(self, rhs: QutritState) -> QutritState {
        self.apply(&rhs)
    }
}

/// Direction on the `{e, f}` Bloch sphere, given by the polar angle and the
/// azimuth that appears in the axis state `|θ, φ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAxis {
    theta: f64,
    phi: f64,
}

impl MeasurementAxis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(domain(format!("theta={theta} outside [0, pi]")));
        }
        if !phi.is_finite() {
            return Err(domain(format!("phi={phi} is not finite")));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The opposite direction `(π − θ, φ + π)`.
    pub fn antipode(&self) -> Self {
        Self {
            theta: std::f64::consts::PI - self.theta,
            phi: self.phi + std::f64::consts::PI,
        }
    }

    pub fn bloch(&self) -> BlochVector {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        BlochVector {
            x: st * cp,
            y: -st * sp,
            z: ct,
        }
    }
}

/// Unit vector on the qubit Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const NORTH: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 1.0 };

    /// Builds a unit vector, normalizing the input.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Undefined("zero Bloch vector".into()));
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &BlochVector) -> [f64; 3] {
        [
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        ]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Great-circle angle to `o`.
    pub fn angle_to(&self, o: &BlochVector) -> f64 {
        let c = self.cross(o);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(o))
    }

    /// Point at fraction `t` along the minor geodesic from `self` to `o`.
    pub fn slerp(&self, o: &BlochVector, t: f64) -> Result<BlochVector> {
        let omega = self.angle_to(o);
        if std::f64::consts::PI - omega < 1e-12 {
            return Err(Error::Undefined("geodesic between antipodal points".into()));
        }
        let s = omega.sin();
        if s < 1e-12 {
            return BlochVector::new(
                (1.0 - t) * self.x + t * o.x,
                (1.0 - t) * self.y + t * o.y,
                (1.0 - t) * self.z + t * o.z,
            );
        }
        let a = ((1.0 - t) * omega).sin() / s;
        let b = (t * omega).sin() / s;
        BlochVector::new(a * self.x + b * o.x, a * self.y + b * o.y, a * self.z + b * o.z)
    }

    /// Inverse of [`MeasurementAxis::bloch`]; `φ` is returned in `(−π, π]`.
    pub fn to_axis(&self) -> MeasurementAxis {
        let theta = self.z.clamp(-1.0, 1.0).acos();
        let phi = -self.y.atan2(self.x);
        let phi = if phi <= -std::f64::consts::PI {
            phi + 2.0 * std::f64::consts::PI
        } else {
            phi
        };
        MeasurementAxis { theta, phi }
    }
}

/// `cos(θ/2)|e⟩ + e^{iφ} sin(θ/2)|f⟩`.
pub fn axis_state(axis: &MeasurementAxis) -> QutritState {
    let (s, c) = (axis.theta / 2.0).sin_cos();
    QutritState::new(C64::from_polar(s, axis.phi), C64::new(c, 0.0), ZERO)
}

/// Block-diagonal unitary with `R·|θ,φ⟩ = |e⟩` exactly and identity on `|g⟩`.
///
/// The `{e, f}` block is the SU(2) element whose rows are `⟨θ,φ|` and
/// `⟨θ̄,φ̄|`, where `|θ̄,φ̄⟩ = c|f⟩ − s·e^{−iφ}|e⟩` is the antipodal axis
/// state with the phase that makes the determinant one.
pub fn rotation_to_axis(axis: &MeasurementAxis) -> Operator3 {
    let (s, c) = (axis.theta / 2.0).sin_cos();
    let u_f = C64::from_polar(s, axis.phi);
    let c = C64::new(c, 0.0);
    let mut r = Operator3::zero();
    r.entries[F][F] = c;
    r.entries[F][E] = -u_f;
    r.entries[E][F] = u_f.conj();
    r.entries[E][E] = c;
    r.entries[G][G] = ONE;
    r
}

/// Bloch vector of the normalized `{e, f}` projection of `state`.
pub fn bloch_of(state: &QutritState) -> Result<BlochVector> {
    let q = state.qubit_norm_sqr();
    if !(q > 1e-300) {
        return Err(Error::Undefined("state has no {e,f} component".into()));
    }
    let (f, e) = (state.f(), state.e());
    let xy = e * f.conj() * 2.0;
    BlochVector::new(xy.re / q, xy.im / q, (e.norm_sqr() - f.norm_sqr()) / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn axis(t: f64, p: f64) -> MeasurementAxis {
        MeasurementAxis::new(t, p).unwrap()
    }

    #[test]
    fn axis_state_poles_and_equator() {
        let north = axis_state(&axis(0.0, 1.7));
        assert_eq!(north, QutritState::basis(E));

        let south = axis_state(&axis(PI, 0.0));
        assert!(south.max_abs_diff(&QutritState::basis(F)) < 1e-15);

        let eq = axis_state(&axis(PI / 2.0, -PI / 3.0));
        let expect = QutritState::new(
            C64::from_polar(1.0 / 2f64.sqrt(), -PI / 3.0),
            C64::new(1.0 / 2f64.sqrt(), 0.0),
            ZERO,
        );
        assert!(eq.max_abs_diff(&expect) < 1e-15);
        assert!(eq.is_normalized(1e-12));
    }

    #[test]
    fn axis_rejects_out_of_range_theta() {
        assert!(matches!(MeasurementAxis::new(-0.1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(MeasurementAxis::new(3.2, 0.0), Err(Error::Domain(_))));
        assert!(MeasurementAxis::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn rotation_at_north_pole_is_identity() {
        let r = rotation_to_axis(&axis(0.0, 0.0));
        assert!(r.max_abs_diff(&Operator3::identity()) < 1e-15);
    }

    #[test]
    fn rotation_maps_equatorial_state_to_e() {
        let a = axis(PI / 2.0, 0.0);
        let out = rotation_to_axis(&a) * axis_state(&a);
        assert!(out.max_abs_diff(&QutritState::basis(E)) < 1e-15);
    }

    #[test]
    fn rotation_maps_antipode_to_f_up_to_phase() {
        let a = axis(1.1, -2.3);
        let out = rotation_to_axis(&a) * axis_state(&a.antipode());
        assert!(out.e().norm() < 1e-15);
        assert!((out.f().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_of_poles() {
        let e = bloch_of(&QutritState::basis(E)).unwrap();
        let f = bloch_of(&QutritState::basis(F)).unwrap();
        assert_eq!(e.as_array(), [0.0, 0.0, 1.0]);
        assert_eq!(f.as_array(), [0.0, 0.0, -1.0]);
        assert!(bloch_of(&QutritState::basis(G)).is_err());
    }

    #[test]
    fn bloch_of_ignores_reference_amplitude() {
        let a = axis(0.7, 0.4);
        let mut s = axis_state(&a).scale(0.6);
        s.amps[G] = C64::new(0.0, 0.8);
        let b = bloch_of(&s).unwrap();
        let direct = a.bloch();
        assert!((b.x - direct.x).abs() < 1e-14);
        assert!((b.y - direct.y).abs() < 1e-14);
        assert!((b.z - direct.z).abs() < 1e-14);
    }

    #[test]
    fn slerp_refuses_antipodes() {
        let n = BlochVector::NORTH;
        let s = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        assert!(n.slerp(&s, 0.5).is_err());
        let mid = n.slerp(&BlochVector::new(1.0, 0.0, 0.0).unwrap(), 0.5).unwrap();
        assert!((mid.x - mid.z).abs() < 1e-15 && (mid.norm() - 1.0).abs() < 1e-15);
        let near = BlochVector::new(1e-13, 0.0, 1.0).unwrap();
        assert!(n.slerp(&near, 0.5).is_ok());
    }
}

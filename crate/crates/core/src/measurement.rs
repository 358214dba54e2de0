//! Selective Gaussian-readout measurement of the `|f⟩` level.
//!
//! The readout coordinate `r` is measured in units of the readout width `σ`.
//! Conditioned on `|e⟩` or `|g⟩` the outcome amplitude is
//! `Ψ(r) = π^{-1/4} exp(−r²/2)`; conditioned on `|f⟩` it is `Ψ(r − r0)`.
//! Both `|Ψ|²` are unit-mass densities with variance 1/2, and their overlap is
//! `∫ Ψ(r) Ψ(r − r0) dr = exp(−r0²/4)`, which is the null-outcome attenuation
//! `m = exp(−γτ)`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{domain, Error, Result};
use crate::quadrature::GaussHermite;
use crate::qutrit::{Operator3, QutritState, C64};

/// π^{-1/4}
const PI_M4: f64 = 0.751_125_544_464_942_5;
/// 1/√π
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Tolerance on `∫ M†M = I` and on the selective-averaging integral.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Null-outcome attenuation `m = exp(−γτ) ∈ [0, 1]` of the `|f⟩` amplitude
/// per measurement. `m = 0` is projective, `m = 1` is no measurement.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Strength(f64);

impl Strength {
    pub const PROJECTIVE: Strength = Strength(0.0);
    pub const NONE: Strength = Strength(1.0);

    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(domain(format!("strength m={m} outside [0, 1]")));
        }
        Ok(Self(m))
    }

    /// From the dimensionless dephasing exponent `γτ ≥ 0` (`+∞` is projective).
    pub fn from_gamma_tau(gamma_tau: f64) -> Result<Self> {
        if !(gamma_tau >= 0.0) {
            return Err(domain(format!("gamma*tau={gamma_tau} must be >= 0")));
        }
        Self::new((-gamma_tau).exp())
    }

    /// From the cloud separation `r0/σ` of the readout histogram.
    pub fn from_r0_over_sigma(r0: f64) -> Result<Self> {
        if !r0.is_finite() || r0 < 0.0 {
            return Err(domain(format!("r0/sigma={r0} must be finite and >= 0")));
        }
        Self::new((-r0 * r0 / 4.0).exp())
    }

    pub fn m(self) -> f64 {
        self.0
    }

    pub fn gamma_tau(self) -> f64 {
        -self.0.ln()
    }

    /// `r0/σ = 2√(γτ)`; infinite in the projective limit.
    pub fn r0_over_sigma(self) -> f64 {
        2.0 * self.gamma_tau().sqrt()
    }

    pub fn is_projective(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for Strength {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Strength::new(m)
    }
}

impl From<Strength> for f64 {
    fn from(s: Strength) -> f64 {
        s.0
    }
}

/// Readout amplitude for the unmonitored levels.
pub fn psi(r: f64) -> f64 {
    PI_M4 * (-0.5 * r * r).exp()
}

/// Null-outcome effective Kraus operator `diag(m, 1, 1)`.
pub fn kraus_null(s: Strength) -> Operator3 {
    Operator3::diag_real([s.m(), 1.0, 1.0])
}

fn finite_separation(s: Strength) -> Result<f64> {
    if s.is_projective() {
        return Err(domain(
            "the Gaussian readout model needs m > 0; use the null or projective operators",
        ));
    }
    Ok(s.r0_over_sigma())
}

/// Outcome-resolved Kraus operator `diag(Ψ(r − r0), Ψ(r), Ψ(r))`.
pub fn kraus_readout(s: Strength, r: f64) -> Result<Operator3> {
    let r0 = finite_separation(s)?;
    if !r.is_finite() {
        return Err(domain(format!("readout r={r} is not finite")));
    }
    let p = psi(r);
    Ok(Operator3::diag_real([psi(r - r0), p, p]))
}

fn integrate_operator<F>(rule: &GaussHermite, center: f64, mut f: F) -> Operator3
where
    F: FnMut(f64) -> Operator3,
{
    rule.nodes()
        .iter()
        .zip(rule.plain_weights())
        .fold(Operator3::zero(), |acc, (&x, &w)| {
            acc.add(&f(center + x).scale(C64::new(w, 0.0)))
        })
}

/// `max |∫ M(r)†M(r) dr − I|` under `rule`.
pub fn povm_completeness_residual(s: Strength, rule: &GaussHermite) -> Result<f64> {
    let r0 = finite_separation(s)?;
    let total = integrate_operator(rule, r0 / 2.0, |r| {
        let m = kraus_readout(s, r).expect("finite readout");
        m.adjoint() * m
    });
    Ok(total.max_abs_diff(&Operator3::identity()))
}

/// Result of integrating `Ψ*(r)·M(r)` over the readout line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedKraus {
    pub operator: Operator3,
    pub completeness_residual: f64,
}

/// Numerically integrates `∫ Ψ*(r) M(r) dr`, which should reproduce
/// [`kraus_null`]. Fails if the POVM completeness integral under the same
/// rule misses the identity by more than [`QUADRATURE_TOL`].
pub fn effective_kraus_from_integral(s: Strength, rule: &GaussHermite) -> Result<IntegratedKraus> {
    let r0 = finite_separation(s)?;
    let completeness_residual = povm_completeness_residual(s, rule)?;
    if !(completeness_residual <= QUADRATURE_TOL) {
        return Err(Error::Numeric {
            what: format!("{}-node readout quadrature", rule.len()),
            residual: completeness_residual,
        });
    }
    let operator = integrate_operator(rule, r0 / 2.0, |r| {
        kraus_readout(s, r)
            .expect("finite readout")
            .scale(C64::new(psi(r), 0.0))
    });
    Ok(IntegratedKraus {
        operator,
        completeness_residual,
    })
}

/// Two-component Gaussian mixture of readout outcomes for a state whose
/// `|f⟩` population (in the measurement frame) is `p_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutPdf {
    pub p_f: f64,
    pub r0: f64,
}

// N(μ, 1/2) density and CDF
fn component_density(x: f64) -> f64 {
    FRAC_1_SQRT_PI * (-x * x).exp()
}

fn component_cdf(x: f64) -> f64 {
    0.5 * erfc(-x)
}

impl ReadoutPdf {
    pub fn new(p_f: f64, s: Strength) -> Result<Self> {
        let r0 = finite_separation(s)?;
        if !(-1e-12..=1.0 + 1e-12).contains(&p_f) {
            return Err(domain(format!("f population {p_f} outside [0, 1]")));
        }
        Ok(Self {
            p_f: p_f.clamp(0.0, 1.0),
            r0,
        })
    }

    pub fn density(&self, r: f64) -> f64 {
        self.p_f * component_density(r - self.r0) + (1.0 - self.p_f) * component_density(r)
    }

    pub fn cdf(&self, r: f64) -> f64 {
        self.p_f * component_cdf(r - self.r0) + (1.0 - self.p_f) * component_cdf(r)
    }

    pub fn mean(&self) -> f64 {
        self.p_f * self.r0
    }

    pub fn variance(&self) -> f64 {
        0.5 + self.p_f * (1.0 - self.p_f) * self.r0 * self.r0
    }

    /// Quantile function, solved by Newton iteration safeguarded by bisection.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        let mut lo = -10.0;
        let mut hi = self.r0 + 10.0;
        let mut x = self.mean();
        for _ in 0..200 {
            let f = self.cdf(x) - u;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.density(x);
            let mut next = if d > 0.0 { x - f / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) || hi - lo <= 1e-14 {
                return next;
            }
            x = next;
        }
        x
    }
}

/// Outcome distribution `P(r) = ‖M(r)|ψ⟩‖²` of a measurement along `z`.
pub fn readout_pdf(state: &QutritState, s: Strength) -> Result<ReadoutPdf> {
    if !state.is_normalized(1e-10) {
        return Err(domain(format!(
            "readout distribution needs a normalized state (norm² = {})",
            state.norm_sqr()
        )));
    }
    ReadoutPdf::new(state.f().norm_sqr(), s)
}

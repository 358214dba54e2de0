//! Gauss–Hermite quadrature for integrals over the readout line.
//!
//! Nodes come from Newton iteration on the orthonormal Hermite recurrence,
//! which keeps the tail weights accurate to relative precision. That matters
//! here because integrals over `r` are evaluated with the Gaussian weight
//! divided back out.

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 64;

/// π^{-1/4}
const PI_M4: f64 = 0.751_125_544_464_942_5;

#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // w_i · exp(x_i²), for integrating functions that are not pre-weighted
    plain_weights: Vec<f64>,
}

impl Default for GaussHermite {
    fn default() -> Self {
        Self::new(DEFAULT_NODES).expect("default Gauss-Hermite rule")
    }
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0_f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut deriv = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let (p, dp) = hermite_orthonormal(n, z);
                deriv = dp;
                let step = p / dp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Numeric {
                    what: format!("Gauss-Hermite node {i} of {n}"),
                    residual: hermite_orthonormal(n, z).0.abs(),
                });
            }
            let (_, dp) = hermite_orthonormal(n, z);
            deriv = if dp.is_finite() { dp } else { deriv };
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (deriv * deriv);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        // ascending order
        nodes.reverse();
        weights.reverse();
        let plain_weights = nodes.iter().zip(&weights).map(|(x, w)| w * (x * x).exp()).collect();
        Ok(Self {
            nodes,
            weights,
            plain_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i·exp(x_i²)`: weights for integrands that carry their own decay.
    pub fn plain_weights(&self) -> &[f64] {
        &self.plain_weights
    }

    /// `∫ e^{-x²} f(x) dx`.
    pub fn integrate_weighted<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `∫ f(r) dr` for integrands with Gaussian-like decay around `center`
    /// on length scale `scale`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, center: f64, scale: f64, mut f: F) -> f64 {
        scale
            * self
                .nodes
                .iter()
                .zip(&self.plain_weights)
                .map(|(&x, &w)| w * f(center + scale * x))
                .sum::<f64>()
    }
}

/// Orthonormal Hermite function value `p_n(z)` and its derivative.
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI_M4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

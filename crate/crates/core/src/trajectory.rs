//! Born-rule sampling of complete readout records.
//!
//! Each trajectory draws one readout per measurement from the outcome
//! distribution of its current state, applies the outcome-resolved Kraus
//! operator and renormalizes. The mean of the per-trajectory interference
//! term `⟨φ̂|A|φ̂⟩` over *all* trajectories estimates `c·e^{iχ}`: nothing is
//! discarded, because weighting each normalized term by its Born probability
//! is the same as integrating the unnormalized term over all outcomes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Result};
use crate::measurement::{kraus_readout, ReadoutPdf};
use crate::protocol::{InterferenceResult, McStderr, Method, ProtocolSpec};
use crate::qutrit::{rotation_to_axis, QutritState, C64, E, F, G};
use crate::rng::SampleRng;

/// Below this many samples an estimate is flagged as statistically weak.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    /// Readouts in units of σ. Projective runs record `0` for a null
    /// outcome and `+∞` for a detection of `|f⟩`.
    pub readouts: Vec<f64>,
    pub final_state: QutritState,
    /// Product of the outcome densities (probabilities when projective).
    pub probability_weight: f64,
    pub interference_term: C64,
}

/// Simulates trajectory `sample_id` of the stream family `seed`.
pub fn sample_trajectory(spec: &ProtocolSpec, sample_id: u64, seed: u64) -> Result<TrajectorySample> {
    spec.validate()?;
    let mut rng = SampleRng::new(seed, sample_id);
    let s = spec.strength;
    let mut state = spec.initial_state();
    let mut readouts = Vec::with_capacity(spec.n_meas());
    let mut weight = 1.0;
    for axis in spec.axes() {
        let rot = rotation_to_axis(&axis);
        let local = rot.apply(&state);
        let p_f = local.amps[F].norm_sqr();
        let u = rng.uniform_open();
        let (next, prob, r) = if s.is_projective() {
            let mut next = local;
            if u < p_f {
                next.amps[E] = C64::new(0.0, 0.0);
                next.amps[G] = C64::new(0.0, 0.0);
                (next, p_f, f64::INFINITY)
            } else {
                next.amps[F] = C64::new(0.0, 0.0);
                (next, 1.0 - p_f, 0.0)
            }
        } else {
            let pdf = ReadoutPdf::new(p_f, s)?;
            let r = pdf.inverse_cdf(u);
            (kraus_readout(s, r)?.apply(&local), pdf.density(r), r)
        };
        readouts.push(r);
        weight *= prob;
        state = rot.adjoint().apply(&next.normalized()?);
    }
    let closed = rotation_to_axis(&spec.closing_axis()).apply(&state);
    let interference_term = state.g().conj() * closed.amps[E] * 2.0;
    Ok(TrajectorySample {
        readouts,
        final_state: state,
        probability_weight: weight,
        interference_term,
    })
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean, sample variances and covariance of complex samples, accumulated
/// around the first sample so identical inputs give exactly zero spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMoments {
    pub mean: C64,
    pub var_re: f64,
    pub var_im: f64,
    pub cov: f64,
    pub n: usize,
}

impl ComplexMoments {
    pub fn from_samples(xs: &[C64]) -> Result<Self> {
        let n = xs.len();
        if n == 0 {
            return Err(domain("no samples"));
        }
        let x0 = xs[0];
        let dre: Vec<f64> = xs.iter().map(|x| x.re - x0.re).collect();
        let dim: Vec<f64> = xs.iter().map(|x| x.im - x0.im).collect();
        let nf = n as f64;
        let shift = C64::new(pairwise_sum(&dre) / nf, pairwise_sum(&dim) / nf);
        let mean = x0 + shift;
        if n == 1 {
            return Ok(Self {
                mean,
                var_re: 0.0,
                var_im: 0.0,
                cov: 0.0,
                n,
            });
        }
        let cre: Vec<f64> = dre.iter().map(|d| d - shift.re).collect();
        let cim: Vec<f64> = dim.iter().map(|d| d - shift.im).collect();
        let sq = |v: &[f64]| pairwise_sum(&v.iter().map(|d| d * d).collect::<Vec<_>>());
        let cross: Vec<f64> = cre.iter().zip(&cim).map(|(a, b)| a * b).collect();
        Ok(Self {
            mean,
            var_re: sq(&cre) / (nf - 1.0),
            var_im: sq(&cim) / (nf - 1.0),
            cov: pairwise_sum(&cross) / (nf - 1.0),
            n,
        })
    }

    /// Standard errors of the mean, its modulus and its argument (delta
    /// method with the real/imaginary covariance).
    pub fn stderr(&self) -> McStderr {
        let nf = self.n as f64;
        let (x, y) = (self.mean.re, self.mean.im);
        let c2 = x * x + y * y;
        let (contrast, phase) = if c2 > 0.0 {
            let vc = (x * x * self.var_re + y * y * self.var_im + 2.0 * x * y * self.cov) / c2;
            let vp = (y * y * self.var_re + x * x * self.var_im - 2.0 * x * y * self.cov) / (c2 * c2);
            ((vc.max(0.0) / nf).sqrt(), (vp.max(0.0) / nf).sqrt())
        } else {
            (((self.var_re + self.var_im) / nf).sqrt(), f64::INFINITY)
        };
        McStderr {
            re: (self.var_re / nf).sqrt(),
            im: (self.var_im / nf).sqrt(),
            contrast,
            phase,
        }
    }
}

/// Interference terms of samples `0..n_samples`, in sample order.
pub fn interference_terms(spec: &ProtocolSpec, cfg: &McConfig) -> Result<Vec<C64>> {
    (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|id| sample_trajectory(spec, id, cfg.seed).map(|t| t.interference_term))
        .collect()
}

/// Monte Carlo estimate of `c·e^{iχ}` with standard errors. The result is
/// bit-identical for any number of worker threads.
pub fn mc_interference(spec: &ProtocolSpec, cfg: &McConfig) -> Result<InterferenceResult> {
    if cfg.n_samples == 0 {
        return Err(domain("n_samples must be positive"));
    }
    let terms = interference_terms(spec, cfg)?;
    let moments = ComplexMoments::from_samples(&terms)?;
    let mut result = InterferenceResult::from_amplitude(moments.mean, Method::MonteCarlo);
    result.stderr = Some(moments.stderr());
    result.low_statistics = cfg.n_samples < MIN_SAMPLES;
    Ok(result)
}

/// Binned first-measurement readouts against the two-Gaussian model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutHistogram {
    /// `n_bins + 1` edges; the outermost bins also collect the tails.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub expected: Vec<f64>,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub r0: f64,
    /// `|f⟩` population in the first measurement frame.
    pub p_f: f64,
    /// `mean(r)/r0`, absent when the clouds coincide.
    pub p_f_estimate: Option<f64>,
    pub p_f_stderr: Option<f64>,
}

pub fn readout_histogram(spec: &ProtocolSpec, cfg: &McConfig, n_bins: usize) -> Result<ReadoutHistogram> {
    spec.validate()?;
    if spec.strength.is_projective() {
        return Err(domain("readout histogram needs a finite-separation readout (m > 0)"));
    }
    if n_bins < 2 {
        return Err(domain("need at least two bins"));
    }
    if cfg.n_samples < 2 {
        return Err(domain("need at least two samples"));
    }
    let first = spec.clone().with_schedule(vec![spec.phi_schedule[0]])?;
    let readouts: Vec<f64> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|id| sample_trajectory(&first, id, cfg.seed).map(|t| t.readouts[0]))
        .collect::<Result<_>>()?;

    let axis = first.axes().next().expect("one axis");
    let local = rotation_to_axis(&axis).apply(&spec.initial_state());
    let pdf = ReadoutPdf::new(local.amps[F].norm_sqr(), spec.strength)?;

    let half_width = 4.5 / 2f64.sqrt();
    let lo = pdf.r0.min(0.0) - half_width;
    let hi = pdf.r0.max(0.0) + half_width;
    let step = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|k| lo + step * k as f64).collect();
    let mut counts = vec![0u64; n_bins];
    for &r in &readouts {
        let k = (((r - lo) / step).floor().max(0.0) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    let nf = cfg.n_samples as f64;
    let expected: Vec<f64> = (0..n_bins)
        .map(|k| {
            let a = if k == 0 { 0.0 } else { pdf.cdf(edges[k]) };
            let b = if k == n_bins - 1 { 1.0 } else { pdf.cdf(edges[k + 1]) };
            nf * (b - a)
        })
        .collect();

    // merge neighbours until every cell expects at least five counts
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&c, &e) in counts.iter().zip(&expected) {
        acc.0 += c as f64;
        acc.1 += e;
        if acc.1 >= 5.0 {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cells.push(acc),
        }
    }
    let chi_square: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(chi_square))
        .unwrap_or(f64::NAN);

    let (p_f_estimate, p_f_stderr) = if pdf.r0 > 0.0 {
        let mean = pairwise_sum(&readouts) / nf;
        let var = pairwise_sum(&readouts.iter().map(|r| (r - mean) * (r - mean)).collect::<Vec<_>>()) / (nf - 1.0);
        (Some(mean / pdf.r0), Some((var / nf).sqrt() / pdf.r0))
    } else {
        (None, None)
    };

    Ok(ReadoutHistogram {
        edges,
        counts,
        expected,
        chi_square,
        dof,
        p_value,
        r0: pdf.r0,
        p_f: pdf.p_f,
        p_f_estimate,
        p_f_stderr,
    })
}

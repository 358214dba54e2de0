//! The measurement sequence and its closed-form evaluation.
//!
//! A run prepares `√w|g⟩ + √(1−w)|θ, 0⟩`, applies one null-outcome
//! effective measurement per azimuth in the schedule, rotates the closing
//! axis `(θ, −2π)` into `|e⟩` and reads the `g`/`e` interference
//! `c·e^{iχ} = 2√w·⟨e|R₀|ψ_N⟩`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::angle::wrap_to_pi;
use crate::error::{domain, Result};
use crate::measurement::{kraus_null, Strength};
use crate::qutrit::{
    axis_state, bloch_of, rotation_to_axis, BlochVector, MeasurementAxis, Operator3, QutritState, C64, E, G,
};

/// Below this contrast the interference phase is reported as undefined.
pub const CONTRAST_FLOOR: f64 = 1e-9;

// squared qubit norm below which a projection counts as annihilating
const ANNIHILATED: f64 = 1e-24;

pub const DEFAULT_N_MEAS: usize = 6;
pub const DEFAULT_REFERENCE_WEIGHT: f64 = 0.5;

/// `φ_k = −2πk/N` for `k = 1..=N`.
pub fn default_schedule(n_meas: usize) -> Vec<f64> {
    (1..=n_meas).map(|k| -TAU * k as f64 / n_meas as f64).collect()
}

/// Everything that defines one run of the sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub theta: f64,
    pub strength: Strength,
    pub phi_schedule: Vec<f64>,
    /// `|a_g|²` of the initial state.
    pub reference_weight: f64,
}

impl ProtocolSpec {
    /// Default sequence: six measurements, balanced reference.
    pub fn new(theta: f64, strength: Strength) -> Result<Self> {
        let spec = Self {
            theta,
            strength,
            phi_schedule: default_schedule(DEFAULT_N_MEAS),
            reference_weight: DEFAULT_REFERENCE_WEIGHT,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_n_meas(mut self, n_meas: usize) -> Result<Self> {
        self.phi_schedule = default_schedule(n_meas);
        self.validate()?;
        Ok(self)
    }

    pub fn with_schedule(mut self, phi_schedule: Vec<f64>) -> Result<Self> {
        self.phi_schedule = phi_schedule;
        self.validate()?;
        Ok(self)
    }

    pub fn with_reference_weight(mut self, w: f64) -> Result<Self> {
        self.reference_weight = w;
        self.validate()?;
        Ok(self)
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        self.theta = theta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_strength(mut self, strength: Strength) -> Self {
        self.strength = strength;
        self
    }

    pub fn n_meas(&self) -> usize {
        self.phi_schedule.len()
    }

    pub fn validate(&self) -> Result<()> {
        MeasurementAxis::new(self.theta, 0.0)?;
        if self.phi_schedule.is_empty() {
            return Err(domain("the azimuth schedule is empty"));
        }
        if let Some(bad) = self.phi_schedule.iter().find(|p| !p.is_finite()) {
            return Err(domain(format!("non-finite azimuth {bad} in schedule")));
        }
        let w = self.reference_weight;
        if !(w > 0.0 && w < 1.0) {
            return Err(domain(format!("reference weight {w} outside (0, 1)")));
        }
        Ok(())
    }

    pub fn initial_axis(&self) -> MeasurementAxis {
        MeasurementAxis::new(self.theta, 0.0).expect("validated theta")
    }

    pub fn closing_axis(&self) -> MeasurementAxis {
        MeasurementAxis::new(self.theta, -TAU).expect("validated theta")
    }

    pub fn axes(&self) -> impl Iterator<Item = MeasurementAxis> + '_ {
        self.phi_schedule
            .iter()
            .map(|&phi| MeasurementAxis::new(self.theta, phi).expect("validated axis"))
    }

    /// `√w|g⟩ + √(1−w)|θ, 0⟩`.
    pub fn initial_state(&self) -> QutritState {
        let mut s = axis_state(&self.initial_axis()).scale((1.0 - self.reference_weight).sqrt());
        s.amps[G] = C64::new(self.reference_weight.sqrt(), 0.0);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Projective,
    MonteCarlo,
}

/// Standard errors of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McStderr {
    pub re: f64,
    pub im: f64,
    pub contrast: f64,
    pub phase: f64,
}

/// Interference amplitude `c·e^{iχ}` between the reference and `|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceResult {
    pub amplitude: C64,
    pub contrast: f64,
    /// Geometric phase in `(−π, π]`; meaningless unless `phase_defined`.
    pub phase: f64,
    pub phase_defined: bool,
    pub method: Method,
    pub stderr: Option<McStderr>,
    /// Set when a Monte Carlo estimate rests on too few samples.
    #[serde(default)]
    pub low_statistics: bool,
}

impl InterferenceResult {
    pub fn from_amplitude(amplitude: C64, method: Method) -> Self {
        let contrast = amplitude.norm();
        Self {
            amplitude,
            contrast,
            phase: wrap_to_pi(amplitude.arg()),
            phase_defined: contrast > CONTRAST_FLOOR,
            method,
            stderr: None,
            low_statistics: false,
        }
    }
}

/// One step of the state's path on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub axis: MeasurementAxis,
    pub pre: Option<BlochVector>,
    pub post: Option<BlochVector>,
    /// Ratio of `{e, f}` norms after and before the measurement.
    pub amplitude_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub steps: Vec<PathStep>,
}

/// `R†·K·R` for an arbitrary lift `R` of the measurement frame.
pub fn measure_with_rotation(state: &QutritState, rotation: &Operator3, kraus: &Operator3) -> QutritState {
    rotation.adjoint().apply(&kraus.apply(&rotation.apply(state)))
}

/// Null-outcome effective measurement along `axis`; the result is left
/// unnormalized and its `g` amplitude is untouched.
pub fn measure_along(state: &QutritState, axis: &MeasurementAxis, s: Strength) -> QutritState {
    measure_with_rotation(state, &rotation_to_axis(axis), &kraus_null(s))
}

/// `2√w·⟨e|R₀|ψ⟩` with `R₀` taking the closing axis to `|e⟩`.
pub fn closing_amplitude(spec: &ProtocolSpec, state: &QutritState) -> C64 {
    let rotated = rotation_to_axis(&spec.closing_axis()).apply(state);
    rotated.amps[E] * (2.0 * spec.reference_weight.sqrt())
}

fn path_step(axis: MeasurementAxis, before: &QutritState, after: &QutritState) -> PathStep {
    let n0 = before.qubit_norm_sqr().sqrt();
    let n1 = after.qubit_norm_sqr().sqrt();
    PathStep {
        axis,
        pre: bloch_of(before).ok(),
        post: bloch_of(after).ok(),
        amplitude_factor: if n0 > 0.0 { n1 / n0 } else { 0.0 },
    }
}

/// Closed-form evaluation of the interference amplitude: the full readout
/// ensemble collapses onto the product of null-outcome effective Kraus
/// operators.
pub fn run_protocol_analytic(spec: &ProtocolSpec) -> Result<(InterferenceResult, PathRecord)> {
    spec.validate()?;
    let kraus = kraus_null(spec.strength);
    let mut state = spec.initial_state();
    let mut steps = Vec::with_capacity(spec.n_meas());
    for axis in spec.axes() {
        let next = measure_with_rotation(&state, &rotation_to_axis(&axis), &kraus);
        steps.push(path_step(axis, &state, &next));
        state = next;
    }
    let result = InterferenceResult::from_amplitude(closing_amplitude(spec, &state), Method::Analytic);
    Ok((result, PathRecord { steps }))
}

/// Final state of the analytic run, before the closing rotation.
pub fn final_state_analytic(spec: &ProtocolSpec) -> Result<QutritState> {
    spec.validate()?;
    let kraus = kraus_null(spec.strength);
    Ok(spec.axes().fold(spec.initial_state(), |s, axis| {
        measure_with_rotation(&s, &rotation_to_axis(&axis), &kraus)
    }))
}

/// Projective-limit run with explicit projectors `|n_k⟩⟨n_k| + |g⟩⟨g|`.
///
/// Also returns the closed list of normalized qubit states visited: the
/// initial axis state, the state after each projection, and the closing
/// axis state. The list is truncated if a projection annihilates the state.
pub fn run_protocol_projective(spec: &ProtocolSpec) -> Result<(InterferenceResult, Vec<QutritState>)> {
    spec.validate()?;
    if !spec.strength.is_projective() {
        return Err(domain(format!(
            "projective run needs m = 0, got m = {}",
            spec.strength.m()
        )));
    }
    let g_proj = Operator3::outer(&QutritState::basis(G), &QutritState::basis(G));
    let mut state = spec.initial_state();
    let mut visited = vec![axis_state(&spec.initial_axis())];
    for axis in spec.axes() {
        let n = axis_state(&axis);
        state = Operator3::outer(&n, &n).add(&g_proj).apply(&state);
        match state.qubit_part() {
            Ok(q) if state.qubit_norm_sqr() > ANNIHILATED => visited.push(q),
            _ => {
                let zero = InterferenceResult::from_amplitude(C64::new(0.0, 0.0), Method::Projective);
                return Ok((zero, visited));
            }
        }
    }
    visited.push(axis_state(&spec.closing_axis()));
    let result = InterferenceResult::from_amplitude(closing_amplitude(spec, &state), Method::Projective);
    Ok((result, visited))
}

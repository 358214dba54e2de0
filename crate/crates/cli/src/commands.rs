//! The subcommands. Each one computes everything first and returns the
//! files to write, so that failures never leave partial output behind.

use geophase::measurement::Strength;
use geophase::protocol::{final_state_analytic, run_protocol_analytic, run_protocol_projective, InterferenceResult};
use geophase::qutrit::{BlochVector, C64, G};
use geophase::topo::{
    degree_from_loops, find_critical_strength, pancharatnam_phase, surface_loops, sweep_phase_map, PhaseMap,
    SurfaceOptions, TransitionOptions,
};
use geophase::trajectory::{mc_interference, McConfig, MIN_SAMPLES};
use serde_json::{json, Value};

use crate::config::*;
use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, fmt_f64, surface_plot, sweep_plot, Artifact, Envelope, Timing};

/// A finished command: files to write, a stdout summary and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub stdout: String,
    pub exit_code: i32,
}

/// Differences at or below this count as exact agreement.
pub const Z_ROUNDING_FLOOR: f64 = 1e-12;
pub const Z_LIMIT: f64 = 3.0;

/// Signed z-score of `diff` with `stderr`, exactly zero below the rounding
/// floor.
pub fn z_score(diff: f64, stderr: f64) -> f64 {
    if diff.abs() <= Z_ROUNDING_FLOOR {
        0.0
    } else if stderr > 0.0 {
        diff / stderr
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn bloch_json(b: &Option<BlochVector>) -> Value {
    b.map_or(Value::Null, |v| json!([v.x, v.y, v.z]))
}

fn bundle(
    name: &str,
    format: Format,
    envelope: Envelope,
    csv: impl FnOnce() -> CliResult<Vec<u8>>,
    plot: Option<String>,
) -> CliResult<Vec<Artifact>> {
    let mut out = Vec::new();
    if format.json() {
        out.push(Artifact::new(format!("{name}.json"), envelope.to_bytes()?));
    }
    if format.csv() {
        out.push(Artifact::new(format!("{name}.csv"), csv()?));
        if let Some(p) = plot {
            out.push(Artifact::new(format!("{name}.gp"), p.into_bytes()));
        }
    }
    Ok(out)
}

fn with_format(mut echo: RunConfig, cfg: &RunConfig) -> RunConfig {
    echo.format = Some(cfg.format());
    echo
}

pub fn phase(cfg: &RunConfig) -> CliResult<Outcome> {
    let theta = cfg.theta()?;
    let s = cfg.strength()?;
    let spec = cfg.protocol(theta, s)?;
    let (analytic, path) = run_protocol_analytic(&spec)?;
    let mut diagnostics = json!({
        "reference_amplitude_error":
            (final_state_analytic(&spec)?.amps[G] - C64::new(spec.reference_weight.sqrt(), 0.0)).norm(),
    });
    let r: InterferenceResult = if cfg.is_projective() {
        let (r, states) = run_protocol_projective(&spec)?;
        diagnostics["analytic_agreement"] = json!((r.amplitude - analytic.amplitude).norm());
        if let Ok(p) = pancharatnam_phase(&states) {
            diagnostics["pancharatnam_chi"] = json!(p);
        }
        r
    } else {
        analytic
    };

    let m = s.m();
    let results = json!({
        "theta": theta,
        "m": m,
        "gamma_tau": finite_or_null(s.gamma_tau()),
        "chi": r.phase,
        "contrast": r.contrast,
        "phase_defined": r.phase_defined,
        "method": r.method,
        "amplitude": { "re": r.amplitude.re, "im": r.amplitude.im },
        "path": path.steps.iter().map(|p| json!({
            "phi": p.axis.phi(),
            "pre": bloch_json(&p.pre),
            "post": bloch_json(&p.post),
            "amplitude_factor": p.amplitude_factor,
        })).collect::<Vec<_>>(),
    });
    let echo = with_format(
        RunConfig {
            theta: Some(theta),
            m: Some(m),
            projective: cfg.projective.filter(|&p| p),
            ..cfg.sequence_echo()
        },
        cfg,
    );
    let envelope = Envelope::new(
        "phase",
        echo,
        results,
        diagnostics,
        Timing::counters([("protocol_runs", 1)]),
    );
    let artifacts = bundle(
        "phase",
        cfg.format(),
        envelope,
        || {
            csv_bytes(
                &["theta", "m", "gamma_tau", "chi", "contrast", "defined"],
                [vec![
                    fmt_f64(theta),
                    fmt_f64(m),
                    fmt_f64(s.gamma_tau()),
                    fmt_f64(r.phase),
                    fmt_f64(r.contrast),
                    r.phase_defined.to_string(),
                ]],
            )
        },
        None,
    )?;
    Ok(Outcome {
        artifacts,
        stdout: format!("theta={theta} m={m} chi={} contrast={}", r.phase, r.contrast),
        exit_code: 0,
    })
}

pub const SWEEP_HEADER: [&str; 7] = [
    "theta",
    "gamma_tau",
    "m",
    "chi_wrapped",
    "chi_unwrapped",
    "contrast",
    "defined",
];

pub fn sweep_csv(map: &PhaseMap) -> CliResult<Vec<u8>> {
    let rows = (0..map.n_theta()).flat_map(|i| {
        (0..map.n_strength()).map(move |j| {
            let k = map.index(i, j);
            let s = map.strength_grid[j];
            vec![
                fmt_f64(map.theta_grid[i]),
                fmt_f64(s.gamma_tau()),
                fmt_f64(s.m()),
                fmt_f64(map.chi_wrapped[k]),
                fmt_f64(map.chi_unwrapped[k]),
                fmt_f64(map.contrast[k]),
                map.defined[k].to_string(),
            ]
        })
    });
    csv_bytes(&SWEEP_HEADER, rows)
}

pub fn sweep(cfg: &RunConfig) -> CliResult<Outcome> {
    let gt = Grid::parse(cfg.grid_theta.as_deref().unwrap_or(DEFAULT_GRID_THETA), true)?;
    let gm = Grid::parse(cfg.grid_m.as_deref().unwrap_or(DEFAULT_GRID_M), false)?;
    let cells = gt.count.saturating_mul(gm.count);
    if cells > MAX_CELLS {
        return Err(CliError::Oversize {
            cells,
            limit: MAX_CELLS,
        });
    }
    let thetas = gt.values();
    let strengths = gm
        .values()
        .into_iter()
        .map(Strength::new)
        .collect::<Result<Vec<_>, _>>()?;
    let tpl = cfg.protocol(0.0, Strength::PROJECTIVE)?;
    let map = sweep_phase_map(&tpl, &thetas, &strengths)?;

    let (i, j) = map.contrast_minimum();
    let k = map.index(i, j);
    let undefined = map.defined.iter().filter(|d| !**d).count();
    let results = json!({
        "n_theta": map.n_theta(),
        "n_m": map.n_strength(),
        "theta_grid": &map.theta_grid,
        "m_grid": strengths.iter().map(|s| s.m()).collect::<Vec<_>>(),
        "gamma_tau_grid": strengths.iter().map(|s| finite_or_null(s.gamma_tau())).collect::<Vec<_>>(),
        "chi_wrapped": &map.chi_wrapped,
        "chi_unwrapped": map.chi_unwrapped.iter().map(|&x| finite_or_null(x)).collect::<Vec<_>>(),
        "contrast": &map.contrast,
        "defined": &map.defined,
        "contrast_minimum": {
            "theta": map.theta_grid[i],
            "m": strengths[j].m(),
            "contrast": map.contrast[k],
        },
    });
    let diagnostics = json!({ "undefined_cells": undefined });
    let echo = with_format(
        RunConfig {
            grid_theta: Some(gt.to_string()),
            grid_m: Some(gm.to_string()),
            ..cfg.sequence_echo()
        },
        cfg,
    );
    let envelope = Envelope::new(
        "sweep",
        echo,
        results,
        diagnostics,
        Timing::counters([("cells", cells as u64)]),
    );
    let artifacts = bundle(
        "sweep",
        cfg.format(),
        envelope,
        || sweep_csv(&map),
        Some(sweep_plot("sweep.csv")),
    )?;
    Ok(Outcome {
        artifacts,
        stdout: format!(
            "cells={cells} contrast_min={} at theta={} m={}",
            map.contrast[k],
            map.theta_grid[i],
            strengths[j].m()
        ),
        exit_code: 0,
    })
}

pub fn transition(cfg: &RunConfig) -> CliResult<Outcome> {
    let tpl = cfg.protocol(0.0, Strength::PROJECTIVE)?;
    let opts = TransitionOptions {
        tol: cfg.tol.unwrap_or(DEFAULT_TOL),
        ..TransitionOptions::default()
    };
    let r = find_critical_strength(&tpl, &opts)?;
    let topology_ok = (r.chern_below, r.chern_above) == (1, 0);
    let jump_ok = cfg
        .assert_jump
        .is_none_or(|j| (r.jump_at_equator - j).abs() <= opts.jump_tol);

    let results = json!({
        "n_meas": r.n_meas,
        "reference_weight": r.reference_weight,
        "m_star": r.m_star.m(),
        "gamma_tau_star": r.gamma_tau_star,
        "bracket": [r.bracket.0, r.bracket.1],
        "contrast_min": r.contrast_min,
        "chern_below": r.chern_below,
        "chern_above": r.chern_above,
        "jump_at_equator": r.jump_at_equator,
    });
    let diagnostics = json!({
        "bracket_width": r.bracket.1 - r.bracket.0,
        "jump_error": (r.jump_at_equator - std::f64::consts::PI).abs(),
        "topology_ok": topology_ok,
        "jump_ok": jump_ok,
    });
    let echo = with_format(
        RunConfig {
            tol: Some(opts.tol),
            assert_jump: cfg.assert_jump,
            ..cfg.sequence_echo()
        },
        cfg,
    );
    let envelope = Envelope::new(
        "transition",
        echo,
        results,
        diagnostics,
        Timing::counters([("chern_evaluations", r.chern_evaluations as u64)]),
    );
    let artifacts = bundle(
        "transition",
        cfg.format(),
        envelope,
        || {
            csv_bytes(
                &[
                    "n_meas",
                    "reference_weight",
                    "m_star",
                    "gamma_tau_star",
                    "m_lo",
                    "m_hi",
                    "contrast_min",
                    "chern_below",
                    "chern_above",
                    "jump_at_equator",
                ],
                [vec![
                    r.n_meas.to_string(),
                    fmt_f64(r.reference_weight),
                    fmt_f64(r.m_star.m()),
                    fmt_f64(r.gamma_tau_star),
                    fmt_f64(r.bracket.0),
                    fmt_f64(r.bracket.1),
                    fmt_f64(r.contrast_min),
                    r.chern_below.to_string(),
                    r.chern_above.to_string(),
                    fmt_f64(r.jump_at_equator),
                ]],
            )
        },
        None,
    )?;
    Ok(Outcome {
        artifacts,
        stdout: format!(
            "m_star={} gamma_tau_star={} chern_below={} chern_above={} jump={}",
            r.m_star.m(),
            r.gamma_tau_star,
            r.chern_below,
            r.chern_above,
            r.jump_at_equator
        ),
        exit_code: if topology_ok && jump_ok { 0 } else { 1 },
    })
}

pub fn mc(cfg: &RunConfig) -> CliResult<Outcome> {
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples < MIN_SAMPLES {
        return Err(CliError::Statistics(format!(
            "{samples} samples requested, at least {MIN_SAMPLES} needed"
        )));
    }
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let theta = cfg.theta()?;
    let s = cfg.strength()?;
    let spec = cfg.protocol(theta, s)?;
    let (exact, _) = run_protocol_analytic(&spec)?;
    let est = mc_interference(
        &spec,
        &McConfig {
            n_samples: samples,
            seed,
        },
    )?;
    let se = est.stderr.expect("Monte Carlo results carry standard errors");
    let z_re = z_score(est.amplitude.re - exact.amplitude.re, se.re);
    let z_im = z_score(est.amplitude.im - exact.amplitude.im, se.im);
    let pass = z_re.abs() <= Z_LIMIT && z_im.abs() <= Z_LIMIT;

    let point = |r: &InterferenceResult| json!({ "re": r.amplitude.re, "im": r.amplitude.im, "contrast": r.contrast, "chi": r.phase });
    let results = json!({
        "theta": theta,
        "m": s.m(),
        "samples": samples,
        "seed": seed,
        "analytic": point(&exact),
        "estimate": point(&est),
        "stderr": { "re": se.re, "im": se.im, "contrast": se.contrast, "chi": se.phase },
        "z_re": finite_or_null(z_re),
        "z_im": finite_or_null(z_im),
        "pass": pass,
    });
    let diagnostics = json!({ "low_statistics": est.low_statistics, "z_limit": Z_LIMIT });
    let echo = with_format(
        RunConfig {
            theta: Some(theta),
            m: Some(s.m()),
            samples: Some(samples),
            seed: Some(seed),
            ..cfg.sequence_echo()
        },
        cfg,
    );
    let envelope = Envelope::new(
        "mc",
        echo,
        results,
        diagnostics,
        Timing::counters([
            ("trajectories", samples as u64),
            ("measurement_steps", (samples * spec.n_meas()) as u64),
        ]),
    );
    let artifacts = bundle(
        "mc",
        cfg.format(),
        envelope,
        || {
            csv_bytes(
                &[
                    "theta",
                    "m",
                    "samples",
                    "seed",
                    "analytic_re",
                    "analytic_im",
                    "mc_re",
                    "mc_im",
                    "stderr_re",
                    "stderr_im",
                    "z_re",
                    "z_im",
                    "pass",
                ],
                [vec![
                    fmt_f64(theta),
                    fmt_f64(s.m()),
                    samples.to_string(),
                    seed.to_string(),
                    fmt_f64(exact.amplitude.re),
                    fmt_f64(exact.amplitude.im),
                    fmt_f64(est.amplitude.re),
                    fmt_f64(est.amplitude.im),
                    fmt_f64(se.re),
                    fmt_f64(se.im),
                    fmt_f64(z_re),
                    fmt_f64(z_im),
                    pass.to_string(),
                ]],
            )
        },
        None,
    )?;
    Ok(Outcome {
        artifacts,
        stdout: format!("z_re={z_re} z_im={z_im} pass={pass}"),
        exit_code: if pass { 0 } else { 1 },
    })
}

pub fn surface(cfg: &RunConfig) -> CliResult<Outcome> {
    let s = cfg.strength()?;
    if s.m() >= 1.0 {
        return Err(CliError::Config("the surface needs m < 1".into()));
    }
    let opts = SurfaceOptions {
        n_theta: cfg.n_theta.unwrap_or(DEFAULT_N_THETA),
        interp_per_segment: cfg.interp.unwrap_or(DEFAULT_INTERP),
        ..SurfaceOptions::default()
    };
    let tpl = cfg.protocol(0.0, s)?;
    let loops = surface_loops(&tpl, s, &opts)?;
    let d = degree_from_loops(&loops, opts.residual_tol)?;
    let n_points: usize = loops.iter().map(|l| l.points.len()).sum();
    let norm_error = loops
        .iter()
        .flat_map(|l| l.points.iter())
        .map(|p| (p.norm() - 1.0).abs())
        .fold(0.0, f64::max);

    let results = json!({
        "m": s.m(),
        "n_theta": opts.n_theta,
        "interp": opts.interp_per_segment,
        "degree": d.degree,
        "raw_degree": d.raw,
        "points": n_points,
    });
    let diagnostics = json!({ "residual": d.residual, "max_norm_error": norm_error });
    let echo = with_format(
        RunConfig {
            m: Some(s.m()),
            n_theta: Some(opts.n_theta),
            interp: Some(opts.interp_per_segment),
            ..cfg.sequence_echo()
        },
        cfg,
    );
    let envelope = Envelope::new(
        "surface",
        echo,
        results,
        diagnostics,
        Timing::counters([("loops", loops.len() as u64), ("points", n_points as u64)]),
    );
    let artifacts = bundle(
        "surface",
        cfg.format(),
        envelope,
        || {
            let rows = loops.iter().flat_map(|l| {
                l.points
                    .iter()
                    .zip(&l.step)
                    .map(move |(p, st)| vec![fmt_f64(l.theta), fmt_f64(*st), fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z)])
            });
            csv_bytes(&["theta", "step", "x", "y", "z"], rows)
        },
        Some(surface_plot("surface.csv", d.degree)),
    )?;
    Ok(Outcome {
        artifacts,
        stdout: format!("m={} degree={} raw={}", s.m(), d.degree, d.raw),
        exit_code: 0,
    })
}

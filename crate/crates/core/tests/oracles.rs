//! Pinned reference values. Each expected number below is derived by hand or
//! by an independent route and must not be loosened.

use std::f64::consts::{FRAC_PI_2, PI};

use geophase::angle::angle_diff;
use geophase::measurement::{effective_kraus_from_integral, kraus_null, Strength};
use geophase::protocol::{run_protocol_analytic, run_protocol_projective, ProtocolSpec};
use geophase::quadrature::GaussHermite;
use geophase::qutrit::Operator3;
use geophase::topo::{
    bloch_polygon, find_critical_strength, pancharatnam_phase, phase_vs_theta, solid_angle_polygon, sweep_phase_map,
    theta_grid, CurveOptions, TransitionOptions,
};

const HEXAGON_CONTRAST: f64 = 27.0 / 64.0;
const M_STAR_N6: f64 = 0.472_546_189_3;

fn strong_law(theta: f64) -> f64 {
    PI * (1.0 - theta.cos())
}

fn projective(theta: f64, n: usize) -> ProtocolSpec {
    ProtocolSpec::new(theta, Strength::PROJECTIVE)
        .unwrap()
        .with_n_meas(n)
        .unwrap()
}

#[test]
fn equatorial_hexagon_three_ways() {
    let spec = projective(FRAC_PI_2, 6);
    let (r, states) = run_protocol_projective(&spec).unwrap();
    assert!(angle_diff(r.phase, PI).abs() < 1e-10);
    assert!((r.contrast - HEXAGON_CONTRAST).abs() < 1e-12);

    let (a, _) = run_protocol_analytic(&spec).unwrap();
    assert!((a.amplitude - r.amplitude).norm() < 1e-12);

    assert!(angle_diff(pancharatnam_phase(&states).unwrap(), PI).abs() < 1e-10);
    let omega = solid_angle_polygon(&bloch_polygon(&states).unwrap()).unwrap();
    assert!(angle_diff(omega / 2.0, PI).abs() < 1e-10);
}

#[test]
fn projective_phase_is_pancharatnam_is_half_solid_angle() {
    for theta in theta_grid(41) {
        let (r, states) = run_protocol_projective(&projective(theta, 6)).unwrap();
        let p = pancharatnam_phase(&states).unwrap();
        let omega = solid_angle_polygon(&bloch_polygon(&states).unwrap());
        assert!(angle_diff(r.phase, p).abs() < 1e-9, "θ = {theta}");
        // the polar polygons degenerate to a point
        if let Ok(omega) = omega {
            assert!(angle_diff(p, omega / 2.0).abs() < 1e-9, "θ = {theta}");
        }
    }
}

#[test]
fn strong_limit_converges_monotonically() {
    for theta in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let errs: Vec<f64> = [6, 24, 96, 384]
            .iter()
            .map(|&n| {
                let (r, _) = run_protocol_projective(&projective(theta, n)).unwrap();
                angle_diff(r.phase, strong_law(theta)).abs()
            })
            .collect();
        // on the equator every N lands on π exactly
        let exact = errs.iter().all(|&e| e <= 1e-12);
        assert!(exact || errs.windows(2).all(|w| w[1] < w[0]), "θ = {theta}: {errs:?}");
        assert!(errs[3] < 0.02, "θ = {theta}: {errs:?}");
    }
}

#[test]
fn null_path_equals_averaged_readout() {
    let rule = GaussHermite::default();
    for k in 0..10 {
        let m = 0.05 + 0.1 * k as f64;
        let s = Strength::new(m).unwrap();
        let got = effective_kraus_from_integral(s, &rule).unwrap();
        assert!(got.completeness_residual < 1e-8);
        assert!(got.operator.max_abs_diff(&kraus_null(s)) < 1e-8);
        assert!(kraus_null(s).max_abs_diff(&Operator3::diag_real([m, 1.0, 1.0])) == 0.0);
    }
}

#[test]
fn critical_strength_for_six_measurements() {
    let tpl = projective(0.0, 6);
    let r = find_critical_strength(&tpl, &TransitionOptions::default()).unwrap();
    assert!((r.m_star.m() - M_STAR_N6).abs() < 1e-8, "{}", r.m_star.m());
    assert_eq!((r.chern_below, r.chern_above), (1, 0));
    assert!(r.bracket.1 - r.bracket.0 <= 1e-4);
    assert!((r.jump_at_equator - PI).abs() < 0.05);
    assert!(r.contrast_min < 1e-3);
}

#[test]
fn critical_strength_moves_toward_one_with_more_steps() {
    let m = |n| {
        find_critical_strength(&projective(0.0, n), &TransitionOptions::default())
            .unwrap()
            .m_star
            .m()
    };
    let (a, b, c) = (m(6), m(24), m(96));
    assert!(a < b && b < c && c < 1.0);
}

#[test]
fn curves_on_either_side_of_the_transition() {
    let tpl = projective(0.0, 6);
    let curve = |m: f64| {
        phase_vs_theta(
            &tpl,
            Strength::new(m).unwrap(),
            &theta_grid(65),
            &CurveOptions::default(),
        )
        .unwrap()
    };
    let below = curve(M_STAR_N6 - 0.01);
    let above = curve(M_STAR_N6 + 0.01);
    assert!((below.chi.last().unwrap() - 2.0 * PI).abs() < 1e-9);
    assert!(above.chi.last().unwrap().abs() < 1e-9);
}

#[test]
fn sweep_edges_and_singular_row() {
    let tpl = projective(0.0, 6);
    let thetas = theta_grid(64);
    let strengths: Vec<Strength> = (0..64).map(|j| Strength::new(j as f64 / 63.0).unwrap()).collect();
    let map = sweep_phase_map(&tpl, &thetas, &strengths).unwrap();

    let (i, _) = map.contrast_minimum();
    let step = thetas[1];
    assert!((thetas[i] - FRAC_PI_2).abs() <= step, "minimum at θ = {}", thetas[i]);

    for (i, &theta) in thetas.iter().enumerate() {
        let strong = map.chi_unwrapped[map.index(i, 0)];
        let (r, _) = run_protocol_projective(&projective(theta, 6)).unwrap();
        assert!(angle_diff(strong, r.phase).abs() < 1e-12);
        // N = 6 discretization envelope of the continuous law
        assert!((strong - strong_law(theta)).abs() < 0.3, "θ = {theta}");
        assert!(map.chi_wrapped[map.index(i, 63)].abs() < 1e-12);
    }
}

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_geophase");

fn geophase(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn geophase")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn envelope(dir: &Path, cmd: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{cmd}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from {line}"))
        .parse()
        .unwrap()
}

fn schema() -> jsonschema::Validator {
    let s: Value = serde_json::from_str(geophase_cli::output::SCHEMA).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

#[test]
fn phase_on_the_poles_and_the_projective_equator() {
    let dir = tempfile::tempdir().unwrap();

    let o = geophase(&["phase", "--theta", "0", "--m", "0.5"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = &envelope(dir.path(), "phase")["results"];
    assert_eq!(r["chi"].as_f64().unwrap(), 0.0);
    assert!((r["contrast"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let o = geophase(
        &["phase", "--theta", "1.5707963", "--m", "0", "--projective"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = stdout(&o);
    assert!((field(&line, "chi") - PI).abs() < 1e-6);
    assert!((field(&line, "contrast") - 0.421875).abs() < 1e-9);
    let env = envelope(dir.path(), "phase");
    assert_eq!(env["results"]["method"], "projective");
    assert!(env["diagnostics"]["analytic_agreement"].as_f64().unwrap() < 1e-12);

    let o = geophase(&["phase", "--theta", "3.14159265", "--m", "0.3"], dir.path());
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!((field(&line, "contrast") - 1.0).abs() < 1e-12);
    assert!(
        field(&line, "chi")
            .rem_euclid(2.0 * PI)
            .min(2.0 * PI - field(&line, "chi").rem_euclid(2.0 * PI))
            < 1e-12
    );
}

#[test]
fn degrees_and_gamma_tau_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&geophase(
        &["phase", "--theta", "60deg", "--gamma-tau", "0.5"],
        dir.path(),
    ));
    let b = stdout(&geophase(
        &[
            "phase",
            "--theta",
            "1.0471975511965976",
            "--m",
            &(-0.5f64).exp().to_string(),
        ],
        dir.path(),
    ));
    assert!((field(&a, "chi") - field(&b, "chi")).abs() < 1e-12);
    assert!((field(&a, "contrast") - field(&b, "contrast")).abs() < 1e-12);
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["phase", "--theta", "4", "--m", "0.5"][..],
        &["phase", "--theta", "1", "--m", "1.5"],
        &["phase", "--theta", "1"],
        &["phase", "--theta", "1", "--m", "0.5", "--ref-weight", "1"],
        &["phase", "--theta", "1", "--m", "0.3", "--projective"],
        &["sweep", "--grid-theta", "0:1"],
        &["surface", "--m", "1"],
    ] {
        let o = geophase(args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"theta": 1.0, "m": 0.5, "thetta": 2}"#).unwrap();
    let o = geophase(&["phase", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn oversize_grid_exits_3_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = geophase(&["sweep", "--grid-theta", "0:3:1001", "--grid-m", "0:1:1000"], &out);
    assert_eq!(code(&o), 3);
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn missing_transition_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["transition", "--n-meas", "1"], dir.path());
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn too_few_samples_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["mc", "--theta", "1", "--m", "0.5", "--samples", "10"], dir.path());
    assert_eq!(code(&o), 5);
}

#[test]
fn singular_surface_exits_6_and_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["surface", "--m", "0.4725461893", "--n-theta", "65"], dir.path());
    assert_eq!(code(&o), 6, "{}", stderr(&o));
    let e = stderr(&o);
    assert!(e.contains("theta=1.5707963267948966") && e.contains("segment"), "{e}");
}

#[test]
fn sweep_csv_round_trips_and_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(
        &["sweep", "--grid-theta", "0:3.141592653589793:17", "--grid-m", "0:1:9"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(text.starts_with("theta,gamma_tau,m,chi_wrapped,chi_unwrapped,contrast,defined\n"));
    assert!(!text.contains('\r'));

    let env = envelope(dir.path(), "sweep");
    let r = &env["results"];
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 17 * 9);
    for (k, row) in rows.iter().enumerate() {
        let theta: f64 = row[0].parse().unwrap();
        let chi: f64 = row[3].parse().unwrap();
        let c: f64 = row[5].parse().unwrap();
        assert_eq!(theta, r["theta_grid"][k / 9].as_f64().unwrap());
        assert_eq!(chi, r["chi_wrapped"][k].as_f64().unwrap());
        assert_eq!(c, r["contrast"][k].as_f64().unwrap());
        let m: f64 = row[2].parse().unwrap();
        if m == 1.0 {
            assert!(chi.abs() < 1e-6, "weak edge χ = {chi}");
        }
        if m == 0.0 {
            assert_eq!(&row[1], "inf");
        }
    }
}

#[test]
fn mc_agrees_with_the_analytic_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(
        &[
            "mc",
            "--theta",
            "1.2",
            "--m",
            "0.6",
            "--samples",
            "100000",
            "--seed",
            "42",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = &envelope(dir.path(), "mc")["results"];
    assert_eq!(r["pass"], true);
    assert!(r["z_re"].as_f64().unwrap().abs() <= 3.0);

    let o = geophase(&["mc", "--theta", "0", "--m", "0.6", "--samples", "1000"], dir.path());
    assert_eq!(code(&o), 0);
    let r = &envelope(dir.path(), "mc")["results"];
    assert_eq!(r["z_re"].as_f64(), Some(0.0));
    assert_eq!(r["z_im"].as_f64(), Some(0.0));
}

#[test]
fn surface_degree_on_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    for (m, deg) in [("0.05", 1), ("0.95", 0)] {
        let o = geophase(&["surface", "--m", m], dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(envelope(dir.path(), "surface")["results"]["degree"], deg);
        let text = std::fs::read_to_string(dir.path().join("surface.csv")).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for row in rdr.records().map(Result::unwrap) {
            let v: Vec<f64> = (2..5).map(|i| row[i].parse().unwrap()).collect();
            assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn transition_for_several_sequence_lengths() {
    let dir = tempfile::tempdir().unwrap();
    for (n, m_star, tol) in [("6", 0.4725461893, 1e-4), ("24", 0.8372, 1e-3), ("96", 0.95668, 1e-4)] {
        let o = geophase(&["transition", "--n-meas", n, "--assert-jump", "pi"], dir.path());
        assert_eq!(code(&o), 0, "N={n}: {}{}", stdout(&o), stderr(&o));
        let r = &envelope(dir.path(), "transition")["results"];
        let m = r["m_star"].as_f64().unwrap();
        assert!((m - m_star).abs() < tol, "N={n}: m* = {m}");
        assert_eq!(r["chern_below"], 1);
        assert_eq!(r["chern_above"], 0);
        assert!((r["jump_at_equator"].as_f64().unwrap() - PI).abs() < 0.05);
    }
}

#[test]
fn every_envelope_satisfies_the_schema() {
    let v = schema();
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 6] = [
        ("phase", &["phase", "--theta", "1.1", "--m", "0.4"]),
        ("phase", &["phase", "--theta", "1.1", "--projective"]),
        (
            "sweep",
            &["sweep", "--grid-theta", "0:3.141592653589793:9", "--grid-m", "0:1:5"],
        ),
        ("transition", &["transition"]),
        ("mc", &["mc", "--theta", "0.7", "--m", "0.3", "--samples", "2000"]),
        ("surface", &["surface", "--gamma-tau", "0.2", "--n-theta", "40"]),
    ];
    for (cmd, args) in runs {
        let o = geophase(args, dir.path());
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        let env = envelope(dir.path(), cmd);
        if let Err(e) = v.validate(&env) {
            panic!("{cmd}: {e}");
        }
        assert!(env["timing"]["counters"]
            .as_object()
            .unwrap()
            .values()
            .all(Value::is_u64));
    }
    let mut broken = envelope(dir.path(), "surface");
    broken["results"].as_object_mut().unwrap().remove("degree");
    assert!(!v.is_valid(&broken));
}

#[test]
fn schema_subcommand_prints_the_schema() {
    let o = Command::new(BIN).arg("schema").output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim_end(), geophase_cli::output::SCHEMA.trim_end());
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let o = geophase(
        &[
            "mc",
            "--theta",
            "0.9",
            "--gamma-tau",
            "0.4",
            "--samples",
            "3000",
            "--seed",
            "9",
            "--n-meas",
            "8",
        ],
        &first,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let env = envelope(&first, "mc");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_vec(&env["config"]).unwrap()).unwrap();
    let o = geophase(&["mc", "--config", cfg.to_str().unwrap()], &second);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["mc.json", "mc.csv"] {
        assert_eq!(
            std::fs::read(first.join(f)).unwrap(),
            std::fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"theta": 0.5, "m": 0.2, "format": "json"}"#).unwrap();
    let o = geophase(
        &["phase", "--config", cfg.to_str().unwrap(), "--gamma-tau", "0.1"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let env = envelope(dir.path(), "phase");
    assert_eq!(env["config"]["m"].as_f64(), Some((-0.1f64).exp()));
    assert_eq!(env["config"]["theta"], 0.5);
    assert!(!dir.path().join("phase.csv").exists());
}

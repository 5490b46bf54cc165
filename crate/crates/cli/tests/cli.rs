//! End-to-end tests of the `tracecone` binary: exit codes, stdout format,
//! report files, and the determinism contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tracecone")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(bin())
        .args(args)
        .env(key, value)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should not be signalled")
}

fn read_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).expect("report should exist");
    serde_json::from_str(&text).expect("report should be valid JSON")
}

/// One block of dimension 1 with unit weight; elements are scalars keyed by
/// name with the given role.
fn scalar_instance(dir: &TempDir, elements: &[(&str, &str, f64)]) -> PathBuf {
    let mut elems = serde_json::Map::new();
    for (name, role, value) in elements {
        elems.insert(
            (*name).to_string(),
            serde_json::json!({ "role": role, "blocks": [[[[value, 0.0]]]] }),
        );
    }
    let doc = serde_json::json!({
        "schema": 1,
        "algebra": { "blocks": [{ "dim": 1, "weight": 1.0 }] },
        "elements": elems,
    });
    let path = dir.path().join("instance.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

#[test]
fn distance_prints_scalar_pair() {
    let dir = TempDir::new().unwrap();
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let path = scalar_instance(&dir, &[("a", "point", 1.0), ("b", "point", e2)]);
    let out = run(&["distance", path.to_str().unwrap(), "a", "b"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(
        stdout(&out).lines().next() == Some("2.000000000000"),
        "unexpected stdout: {}",
        stdout(&out)
    );
}

#[test]
fn geodesic_hits_endpoints_and_midpoint() {
    let dir = TempDir::new().unwrap();
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let path = scalar_instance(&dir, &[("a", "point", 1.0), ("b", "point", e2)]);
    for (t, expected) in [("0", 1.0), ("1", e2), ("0.5", std::f64::consts::E)] {
        let report = dir.path().join(format!("geo{t}.json"));
        let out = run(&[
            "geodesic",
            path.to_str().unwrap(),
            "a",
            "b",
            "--t",
            t,
            "--out",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "t={t} stderr: {}", stderr(&out));
        let doc = read_json(&report);
        let value = doc["certificate"]["result"][0][0][0][0]
            .as_f64()
            .expect("scalar result entry");
        assert!(
            (value - expected).abs() <= 1e-12 * expected,
            "t={t}: got {value}, expected {expected}"
        );
    }
}

#[test]
fn circumcenter_of_two_points_is_the_midpoint() {
    let dir = TempDir::new().unwrap();
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let path = scalar_instance(&dir, &[("p", "point", 1.0), ("q", "point", e2)]);
    let report = dir.path().join("ball.json");
    let out = run(&[
        "circumcenter",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = read_json(&report);
    let radius = doc["certificate"]["radius"].as_f64().unwrap();
    let center = doc["certificate"]["center"][0][0][0][0].as_f64().unwrap();
    assert!(
        (radius - 1.0).abs() <= 1e-7,
        "radius {radius} should be d/2 = 1"
    );
    assert!(
        (center - std::f64::consts::E).abs() <= 1e-7,
        "center {center} should be the geometric mean e"
    );
    assert_eq!(doc["certificate"]["converged"], Value::Bool(true));
}

#[test]
fn unnormalized_weights_are_rejected() {
    let dir = TempDir::new().unwrap();
    let doc = serde_json::json!({
        "schema": 1,
        "algebra": { "blocks": [
            { "dim": 1, "weight": 0.5 },
            { "dim": 1, "weight": 0.4 }
        ]},
        "elements": {},
    });
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["circumcenter", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("trace not normalized"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn missing_instance_file_is_invalid_input() {
    let out = run(&["distance", "/nonexistent/path.json", "a", "b"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_json_is_invalid_input() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["distance", path.to_str().unwrap(), "a", "b"]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("malformed instance"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn unknown_schema_is_invalid_input() {
    let dir = TempDir::new().unwrap();
    let doc = serde_json::json!({
        "schema": 99,
        "algebra": { "blocks": [{ "dim": 1, "weight": 1.0 }] },
        "elements": {},
    });
    let path = dir.path().join("future.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["circumcenter", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("schema"), "stderr: {}", stderr(&out));
}

#[test]
fn unbounded_generator_exits_unbounded_without_report() {
    let dir = TempDir::new().unwrap();
    let doc = serde_json::json!({
        "schema": 1,
        "algebra": { "blocks": [{ "dim": 2, "weight": 1.0 }] },
        "elements": {
            "h": {
                "role": "generator",
                "blocks": [[
                    [[2.0, 0.0], [0.0, 0.0]],
                    [[0.0, 0.0], [0.5, 0.0]]
                ]]
            }
        },
    });
    let path = dir.path().join("unbounded.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let report = dir.path().join("report.json");
    let out = run(&[
        "unitarize",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("norm growth detected"),
        "stderr: {}",
        stderr(&out)
    );
    assert!(
        !report.exists(),
        "an unbounded group must never receive a certificate"
    );
}

#[test]
fn unitarize_golden_involution_verifies() {
    let dir = TempDir::new().unwrap();
    let doc = serde_json::json!({
        "schema": 1,
        "algebra": { "blocks": [{ "dim": 2, "weight": 1.0 }] },
        "elements": {
            "h": {
                "role": "generator",
                "blocks": [[
                    [[0.0, 0.0], [-2.0, 0.0]],
                    [[0.5, 0.0], [0.0, 0.0]]
                ]]
            }
        },
    });
    let path = dir.path().join("golden.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let report = dir.path().join("report.json");
    let out = run(&[
        "unitarize",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = read_json(&report);
    assert_eq!(doc["certificate"]["group_order"], Value::from(4));
    assert_eq!(doc["certificate"]["verified"], Value::Bool(true));
}

#[test]
fn unitarize_impossible_tolerance_fails_but_still_reports() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("inst.json");
    let out = run(&[
        "synth",
        "--blocks",
        "2,3",
        "--group",
        "cyclic-6",
        "--cond",
        "3",
        "--seed",
        "11",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = dir.path().join("report.json");
    let out = run(&[
        "unitarize",
        inst.to_str().unwrap(),
        "--tol",
        "1e-16",
        "--method",
        "karcher",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
    let doc = read_json(&report);
    assert_eq!(doc["certificate"]["verified"], Value::Bool(false));
    assert!(
        doc["certificate"]["residual_unitarity"].as_f64().unwrap() > 1e-16,
        "residual should exceed the impossible tolerance"
    );
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let args = |out: &Path| {
        vec![
            "synth".to_string(),
            "--blocks".into(),
            "2,2".into(),
            "--group".into(),
            "dihedral-3".into(),
            "--cond".into(),
            "2".into(),
            "--seed".into(),
            "9".into(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
        ]
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = Command::new(bin()).args(args(path)).output().unwrap();
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed must produce identical instance bytes"
    );
    assert_eq!(
        std::fs::read(a.with_extension("truth.json")).unwrap(),
        std::fs::read(b.with_extension("truth.json")).unwrap(),
        "same seed must produce identical truth bytes"
    );

    let c = dir.path().join("c.json");
    let mut other = args(&c);
    other[8] = "10".into();
    let out = Command::new(bin()).args(other).output().unwrap();
    assert_eq!(code(&out), 0);
    assert_ne!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&c).unwrap(),
        "different seeds should vary the instance"
    );
}

#[test]
fn synth_truth_sidecar_matches_published_generators() {
    use tracecone::{uniform_norm, AlgebraElement};
    use tracecone_cli::instance::{decode_element, InstanceDoc};
    use tracecone_cli::synth::TruthDoc;

    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("inst.json");
    let out = run(&[
        "synth",
        "--blocks",
        "3,2",
        "--group",
        "perm-3",
        "--cond",
        "2.5",
        "--seed",
        "4",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let doc = InstanceDoc::read(&inst).unwrap();
    let algebra = doc.to_algebra().unwrap();
    let truth = TruthDoc::read(&inst.with_extension("truth.json")).unwrap();
    let g = decode_element(&algebra, &truth.conjugator).unwrap();
    let g_inv = decode_element(&algebra, &truth.conjugator_inverse).unwrap();

    assert!(
        truth.conjugator_condition <= 2.5 * 2.5 + 1e-9,
        "published condition {} exceeds the square of --cond",
        truth.conjugator_condition
    );
    let one = AlgebraElement::identity(&algebra);
    let identity_gap = uniform_norm(&(&(&g * &g_inv) - &one));
    assert!(
        identity_gap <= 1e-12,
        "g g^-1 = 1 violated by {identity_gap}"
    );

    for (name, base) in &truth.base_generators {
        let u = decode_element(&algebra, base).unwrap();
        let unitarity = uniform_norm(&(&(&u * &u.adjoint()) - &one));
        assert!(unitarity <= 1e-12, "{name}: base generator not unitary");
        let published = doc.element(&algebra, name).unwrap();
        let expected = &(&g * &u) * &g_inv;
        let gap = uniform_norm(&(&published - &expected));
        assert!(
            gap <= 1e-12 * (1.0 + uniform_norm(&published)),
            "{name}: instance is not the conjugated base ({gap})"
        );
    }
}

#[test]
fn fuzz_reports_are_identical_modulo_timing() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &Path| {
        vec![
            "fuzz".to_string(),
            "--suite".into(),
            "metric".into(),
            "--trials".into(),
            "30".into(),
            "--seed".into(),
            "5".into(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
        ]
    };
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let out = Command::new(bin())
            .args(args(path))
            .env("TRACECONE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let mut da = read_json(&a);
    let mut db = read_json(&b);
    da["timing_ms"] = Value::from(0);
    db["timing_ms"] = Value::from(0);
    assert_eq!(da, db, "thread count must not change report content");
}

#[test]
fn fuzz_single_trial_passes_every_suite() {
    for suite in ["metric", "band", "hull", "circumcenter", "unitarize"] {
        let out = run(&["fuzz", "--suite", suite, "--trials", "1", "--seed", "0"]);
        assert_eq!(code(&out), 0, "suite {suite} stderr: {}", stderr(&out));
        assert!(
            stdout(&out).contains("PASS"),
            "suite {suite} printed no checks"
        );
    }
}

#[test]
fn invalid_threads_env_is_rejected() {
    let out = run_with_env(&["fuzz", "--trials", "1"], "TRACECONE_THREADS", "zebra");
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("TRACECONE_THREADS"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn instance_files_round_trip_bitwise() {
    use tracecone_cli::instance::InstanceDoc;
    use tracecone_cli::synth::{parse_blocks, parse_family, synthesize, SynthParams};

    let dir = TempDir::new().unwrap();
    let (dims, weights) = parse_blocks("2,3").unwrap();
    let params = SynthParams {
        dims,
        weights,
        family: parse_family("cyclic-5").unwrap(),
        cond: 2.0,
        seed: 21,
    };
    let (instance, _truth) = synthesize(&params).unwrap();
    let first = dir.path().join("first.json");
    instance.write(&first).unwrap();
    let reread = InstanceDoc::read(&first).unwrap();
    let second = dir.path().join("second.json");
    reread.write(&second).unwrap();
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "read-then-write must reproduce the file byte for byte"
    );
}

#[test]
fn synth_rejects_bad_family_and_blocks() {
    let out = run(&[
        "synth",
        "--blocks",
        "2",
        "--group",
        "icosahedral-7",
        "--out",
        "/tmp/x.json",
    ]);
    assert_eq!(code(&out), 2);
    let out = run(&[
        "synth",
        "--blocks",
        "0",
        "--group",
        "cyclic-3",
        "--out",
        "/tmp/x.json",
    ]);
    assert_eq!(code(&out), 2);
    let out = run(&[
        "synth",
        "--blocks",
        "1",
        "--group",
        "dihedral-3",
        "--out",
        "/tmp/x.json",
    ]);
    assert_eq!(
        code(&out),
        2,
        "dihedral needs a block of dimension at least 2"
    );
    let out = run(&[
        "synth",
        "--blocks",
        "2",
        "--group",
        "perm-3",
        "--out",
        "/tmp/x.json",
    ]);
    assert_eq!(
        code(&out),
        2,
        "perm-3 needs a block of dimension at least 3"
    );
}

#[test]
fn reports_carry_schema_command_and_options() {
    let dir = TempDir::new().unwrap();
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let path = scalar_instance(&dir, &[("a", "point", 1.0), ("b", "point", e2)]);
    let report = dir.path().join("report.json");
    let out = run(&[
        "distance",
        path.to_str().unwrap(),
        "a",
        "b",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&report);
    assert_eq!(doc["schema"], Value::from(1));
    assert_eq!(doc["command"], Value::from("distance"));
    assert!(doc["options"].is_object());
    assert!(doc["timing_ms"].is_number());
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for check in checks {
        assert!(check["name"].is_string());
        assert!(matches!(
            check["status"].as_str(),
            Some("PASS" | "FAIL" | "WARN")
        ));
    }
}

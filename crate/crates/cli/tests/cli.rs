use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use conevol_cli::{run, EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK};
use serde_json::{json, Value};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn conevol(args: &[&str]) -> Out {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("conevol").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json_of(o: &Out) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn schema_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/conevol.schema.json")
}

/// Validates `v` against `$defs/<def>` of the published schema.
fn assert_schema(def: &str, v: &Value) {
    let file: Value = serde_json::from_str(&fs::read_to_string(schema_path()).unwrap()).unwrap();
    assert!(file["$defs"].get(def).is_some(), "no definition {def}");
    let root = json!({
        "$schema": file["$schema"],
        "$defs": file["$defs"],
        "$ref": format!("#/$defs/{def}"),
    });
    let validator = jsonschema::validator_for(&root).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{def}: {errors:?}");
}

fn cube_file(dir: &Path) -> PathBuf {
    let verts: Vec<Vec<f64>> = (0..8)
        .map(|m| (0..3).map(|k| if m >> k & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect();
    let p = dir.join("cube.json");
    fs::write(&p, json!({"dim": 3, "vertices": verts}).to_string()).unwrap();
    p
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn phi_equal_weights() {
    let o = conevol(&["phi", "--alpha", "1", "--beta", "1", "--n", "3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json_of(&o);
    assert_eq!(v["phi"].as_f64(), Some(6.0));
    assert_eq!(v["rho0"].as_f64(), Some(1.0));
    assert!(o.stdout.contains("6.0000000000000000e0"));
    assert_schema("phi_output", &v);
}

#[test]
fn phi_sweep_is_an_array() {
    let o = conevol(&["phi", "--alpha", "1:3:1", "--beta", "0.5", "--n", "2:4:1"]);
    let v = json_of(&o);
    assert_eq!(v.as_array().unwrap().len(), 9);
    assert_schema("phi_output", &v);
    let c = conevol(&["phi", "--alpha", "1:3:1", "--beta", "0.5", "--n", "2:4:1", "--format", "csv"]);
    assert_eq!(c.stdout.lines().count(), 10);
}

#[test]
fn rho0_outputs() {
    let v = json_of(&conevol(&["rho0", "--gamma", "2", "--n", "3"]));
    assert!((v["rho0"].as_f64().unwrap() - 1.109_606_326_587_143_1).abs() < 1e-15);
    assert_schema("rho0_output", &v);
    let one = json_of(&conevol(&["rho0", "--gamma", "1", "--n", "3"]));
    assert!(one["tau"].is_null());
    assert_schema("rho0_output", &one);
}

#[test]
fn cube_scc_is_all_equality() {
    let dir = tempfile::tempdir().unwrap();
    let cube = cube_file(dir.path());
    let o = conevol(&["check-scc", "--input", cube.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    let v = json_of(&o);
    assert_eq!(v["verdict"], "satisfied");
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r["status"] == "equality_with_complement"));
    assert_schema("scc_check", &v);

    let cv = conevol(&["cone-volume", "--input", cube.to_str().unwrap()]);
    let m = json_of(&cv);
    assert_schema("cone_volume_output", &m);
    // a cone-volume output is a valid measure input
    let path = write(dir.path(), "mu.json", &m);
    let again = json_of(&conevol(&["check-scc", "--input", &path, "--essential"]));
    assert_eq!(again["reports"].as_array().unwrap().len(), 6);
}

#[test]
fn violated_scc_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let s = 0.5f64.sqrt();
    let mu = json!({"dim": 2, "atoms": [
        {"u": [1.0, 0.0], "w": 0.9},
        {"u": [-s, s], "w": 0.05},
        {"u": [-s, -s], "w": 0.05}
    ]});
    let path = write(dir.path(), "mu.json", &mu);
    let o = conevol(&["check-scc", "--input", &path]);
    assert_eq!(o.code, EXIT_NEGATIVE);
    assert_eq!(json_of(&o)["verdict"], "violated");
}

#[test]
fn verify_antipodal_cube() {
    let dir = tempfile::tempdir().unwrap();
    let cube = cube_file(dir.path());
    let all = json_of(&conevol(&["verify-antipodal", "--input", cube.to_str().unwrap()]));
    assert_eq!(all.as_array().unwrap().len(), 3);
    assert_schema("verify_antipodal_output", &all);
    let one = conevol(&["verify-antipodal", "--input", cube.to_str().unwrap(), "--direction", "0,0,-1"]);
    let v = json_of(&one);
    assert_eq!(v["equality"], true);
    assert_schema("verify_antipodal_output", &v);
}

#[test]
fn no_antipodal_pairs_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let simplex = json!({"dim": 2, "vertices": [[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]]});
    let path = write(dir.path(), "t.json", &simplex);
    let o = conevol(&["verify-antipodal", "--input", &path, "--format", "csv"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout.lines().count(), 1);
    assert!(o.stdout.starts_with("direction,alpha,beta,"));
    let j = json_of(&conevol(&["verify-antipodal", "--input", &path]));
    assert_eq!(j, json!([]));
}

#[test]
fn extremal_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pts: Vec<Vec<f64>> = (0..5)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 5.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let base = write(dir.path(), "base.json", &json!({"dim": 2, "vertices": pts}));
    let o = conevol(&["extremal", "--base", &base, "--alpha", "5", "--beta", "1"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json_of(&o);
    assert_schema("body_output", &v);
    assert_eq!(v["report"]["equality"], true);
    assert!(v["report"]["relative_slack"].as_f64().unwrap().abs() < 1e-8);
    let body = write(dir.path(), "body.json", &v);
    let again = json_of(&conevol(&["verify-antipodal", "--input", &body, "--direction", "0,0,1"]));
    assert_eq!(again["equality"], true);
}

#[test]
fn off_centre_base_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let base = write(dir.path(), "b.json", &json!({"dim": 1, "vertices": [[0.0], [1.0]]}));
    let o = conevol(&["extremal", "--base", &base, "--alpha", "1", "--beta", "2"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.stderr.contains("centroid"));
}

#[test]
fn trapezoid_has_area_six() {
    let v = json_of(&conevol(&["trapezoid", "--alpha", "0.6666666666666666", "--beta", "2.6666666666666665"]));
    assert!((v["volume"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert_schema("body_output", &v);
}

#[test]
fn truncated_pyramid_reports_violation_but_succeeds() {
    let o = conevol(&["truncated-pyramid", "--n", "3", "--r", "0.1"]);
    assert_eq!(o.code, EXIT_OK);
    let v = json_of(&o);
    assert_eq!(v["scc"]["verdict"], "violated");
    assert_schema("truncated_pyramid_output", &v);
    let prism = json_of(&conevol(&["truncated-pyramid", "--n", "3", "--r", "1"]));
    assert_eq!(prism["scc"]["verdict"], "satisfied");
}

#[test]
fn pentagon_scan_flips_to_solved() {
    let o = conevol(&["pentagon-scan", "--alpha", "0.49", "--beta", "0.09", "--eps", "0.05:0.5:0.01", "--format", "csv"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mut rd = csv::Reader::from_reader(o.stdout.as_bytes());
    let headers: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(&headers[..6], ["eps", "outcome", "residual", "l1_over_l4", "V_T", "V_complement"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 46);
    assert_ne!(&rows[0][1], "solved");
    assert_eq!(&rows[45][1], "solved");
    let first = rows.iter().position(|r| &r[1] == "solved").unwrap();
    assert!(rows[first..].iter().all(|r| &r[1] == "solved"));

    let j = json_of(&conevol(&["pentagon-scan", "--eps", "0.05:0.3:0.05"]));
    assert_schema("pentagon_scan_output", &j);
}

#[test]
fn sweeps_do_not_depend_on_jobs() {
    let args = |jobs: &'static str| ["pentagon-scan", "--eps", "0.02:0.5:0.02", "--jobs", jobs, "--seed", "9"];
    let a = conevol(&args("1"));
    let b = conevol(&args("4"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn random_body_is_deterministic() {
    let a = conevol(&["random-body", "--n", "3", "--m", "12", "--seed", "5"]);
    let b = conevol(&["random-body", "--n", "3", "--m", "12", "--seed", "5"]);
    let c = conevol(&["random-body", "--n", "3", "--m", "12", "--seed", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_schema("random_body_output", &json_of(&a));
    let s = json_of(&conevol(&["random-body", "--n", "3", "--m", "12", "--slab", "--seed", "5"]));
    assert_schema("random_body_output", &s);
    assert!(s["slab"]["u"].is_array());
    assert_schema("polytope_input", &s);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["phi", "--alpha", "1", "--beta", "1"],
        vec!["phi", "--alpha", "1:0:1", "--beta", "1", "--n", "3"],
        vec!["phi", "--alpha", "-1", "--beta", "1", "--n", "3"],
        vec!["phi", "--alpha", "1", "--beta", "1", "--n", "3", "--format", "xml"],
        vec!["check-scc", "--input", "/nonexistent/file.json"],
        vec!["random-body", "--n", "3", "--m", "6", "--slab", "--symmetric"],
    ] {
        let o = conevol(&args);
        assert_eq!(o.code, EXIT_ERROR, "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\"dim\": 2,").unwrap();
    let o = conevol(&["cone-volume", "--input", p.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.stderr.contains("malformed JSON"));
}

#[test]
fn help_exits_zero() {
    let o = conevol(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("pentagon-scan"));
}

#[test]
fn text_format() {
    let o = conevol(&["phi", "--alpha", "2", "--beta", "1", "--n", "2", "--format", "text"]);
    assert!(o.stdout.lines().any(|l| l.starts_with("phi ") && l.contains("5.82842712474619")));
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conevol"))
}

#[test]
fn binary_reads_stdin_and_sets_exit_codes() {
    let mut child = binary()
        .args(["cone-volume", "--format", "csv"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"dim":2,"vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("u1,u2,w\n"));

    let bad = binary().arg("nonsense").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn log_level_from_environment() {
    let out = binary()
        .args(["pentagon-scan", "--eps", "0.1:0.2:0.1"])
        .env("CONEVOL_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("grid points solved"));
    let quiet = binary().args(["pentagon-scan", "--eps", "0.1:0.2:0.1"]).env_remove("CONEVOL_LOG").output().unwrap();
    assert!(quiet.stderr.is_empty());
}

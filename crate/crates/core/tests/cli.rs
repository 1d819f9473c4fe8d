use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odd-lefschetz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_fixture(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let input = fixture(name);
    let mut args = vec![cmd, "--input", input.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn index_two_points() {
    let v = json(&run_fixture("index", "index_two_points.json", &[]));
    assert_eq!(v["total"].as_f64(), Some(1.0));
}

#[test]
fn index_curved_components() {
    let v = json(&run_fixture("index", "index_curved.json", &[]));
    assert_eq!(v["total"].as_f64(), Some(2.0));
}

#[test]
fn index_validation_errors() {
    let out = run_fixture("index", "index_codim_mismatch.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CodimMod4Mismatch"));
    assert_eq!(run_fixture("index", "index_empty.json", &[]).status.code(), Some(2));
}

#[test]
fn parse_errors_exit_3() {
    assert_eq!(run_fixture("spectral", "spectral_malformed.json", &[]).status.code(), Some(3));
    let missing = run(&["index", "--input", "/nonexistent/input.json"]);
    assert_ne!(missing.status.code(), Some(0));
}

#[test]
fn bad_flags_exit_2() {
    let out = run_fixture("spectral", "spectral_circle_periodic.json", &["--cutoff", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_fixture("jlo", "jlo_circle_k0.json", &["--t-grid", "0.4,-0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectral_matches_index() {
    for name in [
        "spectral_circle_periodic.json",
        "spectral_circle_antiperiodic.json",
        "spectral_torus3.json",
    ] {
        let v = json(&run_fixture("spectral", name, &[]));
        assert_eq!(v["constant"], true, "{name}");
        assert_eq!(v["matches_index"], true, "{name}");
    }
}

#[test]
fn jlo_fixtures() {
    let v = json(&run_fixture("jlo", "jlo_circle_k0.json", &[]));
    assert_eq!(v["pass"], true);
    let v = json(&run_fixture("jlo", "jlo_torus_constant.json", &[]));
    assert_eq!(v["pass"], true);
}

#[test]
fn mehler_runs_and_rejects_poles() {
    let v = json(&run_fixture("mehler", "mehler_grid.json", &[]));
    assert_eq!(v["pass"], true);
    let v = json(&run_fixture("mehler", "mehler_flat.json", &[]));
    assert_eq!(v["pass"], true);
    assert_eq!(run_fixture("mehler", "mehler_pole.json", &[]).status.code(), Some(4));
}

#[test]
fn localize_writes_csv_beside_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("loc.json");
    let out = run_fixture("localize", "localize_circle.json", &["--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["strictly_decreasing"], true);
    let csv = std::fs::read_to_string(dir.path().join("loc.csv")).unwrap();
    assert!(csv.starts_with("t,x,density"));
}

#[test]
fn series_matches_golden_text() {
    let out = run_fixture("series", "series_default.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(fixture("series_n1_m1_cap4.txt")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn output_is_deterministic() {
    for (cmd, name) in [
        ("index", "index_curved.json"),
        ("spectral", "spectral_torus3.json"),
        ("series", "series_default.json"),
        ("mehler", "mehler_grid.json"),
    ] {
        let a = run_fixture(cmd, name, &[]);
        let b = run_fixture(cmd, name, &[]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{cmd} {name}");
    }
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["index", "spectral", "jlo", "mehler", "localize", "series"] {
        assert!(String::from_utf8_lossy(&out.stdout).contains(sub));
    }
}

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::path::Path;
use std::process::{Command, Output};

use bellscope_cli::report::{ReportEnvelope, Results};
use serde_json::Value;

fn bellscope(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bellscope"));
    c.args(args).env_remove("BELLSCOPE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bellscope(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

const PHOTON: &str = r#"{"model": {"kind": "quantum", "label": "phi_plus", "realization": "photon"}}"#;

#[test]
fn chsh_singlet_default_settings() {
    let v = json(&run(&["chsh"]));
    let value = v["results"]["report"]["value"].as_f64().unwrap();
    assert!((value + 2.0 * SQRT_2).abs() < 1e-12);
    assert_eq!(v["results"]["mode"], "evaluate");
}

#[test]
fn chsh_optimize_photon() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "photon.json", PHOTON);
    let v = json(&run(&["chsh", "--config", &cfg, "--optimize", "max"]));
    let value = v["results"]["report"]["value"].as_f64().unwrap();
    assert!((value - 2.0 * SQRT_2).abs() < 1e-6, "{value}");
    assert_eq!(v["config"]["optimizer"]["mode"], "max");
}

#[test]
fn chsh_writes_report_and_correlations() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["chsh", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert_eq!(text.as_bytes(), o.stdout.as_slice());
    let env: ReportEnvelope = serde_json::from_str(&text).unwrap();
    assert_eq!(env.to_json(), text);
    assert!(matches!(env.results, Results::Chsh(_)));
    let csv = std::fs::read_to_string(out.join("correlations.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alice_setting,bob_setting,correlation");
    assert_eq!(lines.len(), 5);
    assert!(!csv.contains('\r'));
    let first: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!((first + FRAC_PI_4.cos()).abs() < 1e-12);
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("malformed.json", "{\"seed\": "),
        ("unknown.json", r#"{"seed": 1, "colour": "blue"}"#),
        ("nested.json", r#"{"optimizer": {"grid": 16}}"#),
        ("grid.json", r#"{"optimizer": {"grid_points": 2}}"#),
    ] {
        let cfg = write(tmp.path(), name, text);
        let o = run(&["chsh", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty());
    }
    assert_eq!(run(&["chsh", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    assert_eq!(run(&["chsh", "--optimize", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn model_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", r#"{"model": {"kind": "generalized_pr", "c": 0.3, "e": 0.3, "replaced_cell": "first"}}"#);
    assert_eq!(run(&["chsh", "--config", &bad]).status.code(), Some(3));
    let pr = write(tmp.path(), "pr.json", r#"{"model": {"kind": "pr"}}"#);
    assert_eq!(run(&["chsh", "--config", &pr, "--optimize", "max"]).status.code(), Some(3));
    let v = json(&run(&["chsh", "--config", &pr]));
    assert_eq!(v["results"]["report"]["value"].as_f64(), Some(4.0));
}

#[test]
fn scan_rows() {
    let o = run(&["scan", "--grid", "9"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("theta,pPP,pPM,pMP,pMM,correlation,conditional_avg_plus\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0], vec![0.0, 0.0, 0.5, 0.5, 0.0, -1.0, -1.0]);

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "photon.json", PHOTON);
    let o = run(&["scan", "--config", &cfg, "--grid", "9"]);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!((rows[1][0] - FRAC_PI_4).abs() < 1e-15);
    assert!(rows[1][5].abs() < 1e-12);
}

#[test]
fn scan_is_byte_identical_on_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(run(&["scan", "--out", a.to_str().unwrap()]).status.success());
    assert!(bellscope(&["scan", "--out", b.to_str().unwrap()]).env("BELLSCOPE_THREADS", "3").status().unwrap().success());
    let x = std::fs::read(a.join("scan.csv")).unwrap();
    assert_eq!(x, std::fs::read(b.join("scan.csv")).unwrap());
    assert_eq!(x.iter().filter(|&&c| c == b'\n').count(), 722);
}

#[test]
fn pr_spectrum_endpoints_and_monotonicity() {
    let o = run(&["pr-spectrum"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("c,e,chsh_first_cell,chsh_fourth_cell,conservation_deviation\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101);
    assert_eq!(&rows[0][..4], &[0.0, 0.5, 2.0, 4.0]);
    assert_eq!(&rows[100][..4], &[0.5, 0.0, 4.0, 2.0]);
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2] && w[1][3] < w[0][3] && w[1][4] > w[0][4]));
    for r in &rows {
        assert!((r[2] - (3.0 + 2.0 * r[0] - 2.0 * r[1])).abs() < 1e-12);
    }
}

#[test]
fn verify_passes_by_default() {
    let o = run(&["verify"]);
    let v = json(&o);
    assert_eq!(v["results"]["passed"], true);
    let b = &v["results"]["bounds"];
    assert_eq!(b["classical"].as_f64(), Some(2.0));
    assert_eq!(b["pr"].as_f64(), Some(4.0));
    assert!((b["quantum"].as_f64().unwrap() - 2.0 * SQRT_2).abs() < 1e-6);
    let names: Vec<&str> = v["results"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for want in ["solver-equivalence", "bound-ordering", "su2-invariance", "no-signaling:lhv", "nprf:quantum"] {
        assert!(names.contains(&want), "{want}");
    }
    assert_eq!(v["results"]["su2_table"].as_array().unwrap().len(), 12);
}

#[test]
fn verify_catches_signaling_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "signaling.json",
        r#"{"model": {"kind": "tabulated",
            "ab": {"pp": 1, "pm": 0, "mp": 0, "mm": 0},
            "ab_prime": {"pp": 0, "pm": 0, "mp": 0, "mm": 1},
            "a_prime_b": {"pp": 0.25, "pm": 0.25, "mp": 0.25, "mm": 0.25},
            "a_prime_b_prime": {"pp": 0.25, "pm": 0.25, "mp": 0.25, "mm": 0.25}}}"#,
    );
    let o = run(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("no-signaling"), "{stderr}");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<&Value> = v["results"]["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0]["name"].as_str().unwrap().starts_with("no-signaling"));
    assert_eq!(failed[0]["deviation"].as_f64(), Some(1.0));
}

fn simulate(dir: &Path, extra: &[&str]) -> ReportEnvelope {
    let mut args = vec!["simulate", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn same_files(a: &Path, b: &Path) {
    for f in ["ensemble.csv", "ensemble.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn simulate_equal_settings_has_no_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "eq.json", r#"{"settings": {"a": 0.4, "a_prime": 1.0, "b": 0.4, "b_prime": 1.0}}"#);
    let env = simulate(&tmp.path().join("out"), &["--config", &cfg, "--n", "20000"]);
    let Results::Simulate(r) = env.results else { panic!("wrong result kind") };
    assert_eq!(r.violating_trials, 0);
    assert_eq!(r.pairs[0].correlation.estimate, -1.0);
    assert!(r.conservation_scan.consistent);
}

#[test]
fn simulate_reproduces_and_config_echo_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let a = simulate(&tmp.path().join("a"), &["--seed", "77", "--n", "3000"]);
    let b = simulate(&tmp.path().join("b"), &["--seed", "77", "--n", "3000"]);
    same_files(&tmp.path().join("a"), &tmp.path().join("b"));
    assert_eq!(a.results, b.results);

    // Feeding the echoed config back reproduces the run.
    let mut echo = a.config.clone();
    echo.output.dir = Some(tmp.path().join("c"));
    let cfg = write(tmp.path(), "echo.json", &serde_json::to_string(&echo).unwrap());
    let o = run(&["simulate", "--config", &cfg]);
    assert!(o.status.success());
    let c: ReportEnvelope = serde_json::from_slice(&o.stdout).unwrap();
    same_files(&tmp.path().join("a"), &tmp.path().join("c"));
    assert_eq!(a.results, c.results);

    let report = std::fs::read_to_string(tmp.path().join("a/report.json")).unwrap();
    let parsed: ReportEnvelope = serde_json::from_str(&report).unwrap();
    assert_eq!(parsed, a);
    assert_eq!(parsed.to_json(), report);
}

#[test]
fn simulate_needs_an_output_directory() {
    assert_eq!(run(&["simulate", "--n", "10"]).status.code(), Some(2));
}

#[test]
fn invalid_thread_override_is_a_config_error() {
    let o = bellscope(&["chsh"]).env("BELLSCOPE_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

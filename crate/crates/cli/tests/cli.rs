use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn degpv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degpv"))
        .args(args)
        .env_remove("DEGPV_LOG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn verify_default_passes() {
    let out = degpv(&["verify", "--cases", "30"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let reports = stdout_json(&out);
    let reports = reports.as_array().unwrap();
    assert!(reports.len() >= 6);
    for r in reports {
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["suite", "n_cases", "max_residual", "pass"]);
        assert!(r["max_residual"].as_f64().unwrap() < 1e-10);
        assert_eq!(r["pass"], Value::Bool(true));
    }
}

#[test]
fn verify_ignores_tolerance() {
    assert_eq!(code(&degpv(&["verify", "--cases", "10", "--tol", "1e-3"])), 0);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "theta0 = [1.0, 0.0]\ntol = \n");
    let out = degpv(&["verify", "--config", &cfg]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("column"), "{err}");
}

#[test]
fn out_of_range_values_are_usage_errors() {
    assert_eq!(code(&degpv(&["verify", "--tol", "0.5"])), 2);
    assert_eq!(code(&degpv(&["integrate", "--t-start", "-1,0", "--t-end", "1,0"])), 2);
    assert_eq!(code(&degpv(&["integrate", "--theta0", "abc"])), 2);
    assert_eq!(code(&degpv(&["no-such-command"])), 2);
    assert_eq!(code(&degpv(&["--help"])), 0);
}

#[test]
fn integrate_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = degpv(&["integrate", "--steps", "20", "--output", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t_re,t_im,q_re,q_im,p_re,p_im,H_re,H_im,residual");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0], "t column is monotone");
    }
    for r in &rows {
        assert!(r[8] < 1e-8);
    }
    // every number carries 17 significant digits
    let field = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(field, "1.0000000000000000e0");
    assert!(String::from_utf8_lossy(&out.stderr).contains("constraint drift"));
}

#[test]
fn integrate_reports_pole() {
    // this real solution has a movable pole near t = 1.599
    let out = degpv(&["integrate", "--q0", "2,0", "--p0", "0.5,0"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("t = 1.599"));
}

#[test]
fn zero_length_path_gives_one_row() {
    let out = degpv(&["integrate", "--t-end", "1,0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "theta0 = [0.3, 0.0]\ntheta1 = [0.6, 0.0]\nsteps = 5\n");
    let out = degpv(&["monodromy", "--config", &cfg, "--theta0", "0.4,0"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(c(&v["theta"][0]), (0.4, 0.0));
    assert_eq!(c(&v["theta"][1]), (0.6, 0.0));
}

#[test]
fn monodromy_report() {
    let out = degpv(&["monodromy", "--theta0", "0.3,0", "--theta1", "0.7,0"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["theta", "t", "invariants", "expected", "drift"]);
    let (re, im) = c(&v["invariants"]["tr_m0"]);
    assert!((re - 2.0 * (0.3 * std::f64::consts::PI).cos()).abs() < 1e-6 && im.abs() < 1e-6);
    assert!(v["drift"].as_f64().unwrap() < 1e-5);
}

#[test]
fn surface_lists_singular_point_and_fiber() {
    let out = degpv(&["surface", "--s0", "3", "--s1", "2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let pts = v["singular_points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!((c(&pts[0]["x1"]), c(&pts[0]["x2"]), c(&pts[0]["x3"])), ((0.0, 0.0), (-1.0, 0.0), (3.0, 0.0)));
    assert_eq!(v["fiber"].as_array().unwrap().len(), 5);
}

#[test]
fn surface_moduli_singular_points() {
    let out = degpv(&["surface", "--theta0", "0", "--theta1", "0"]);
    let v = stdout_json(&out);
    assert_eq!(v["moduli_singular_points"].as_array().unwrap().len(), 3);
}

#[test]
fn backlund_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let traj = format!("{d}/traj.csv");
    let common = ["--theta0", "1,0", "--theta1", "1,0", "--t-end", "1.5,0", "--steps", "20"];
    let run = |extra: &[&str]| degpv(&[&common[..], extra].concat());
    assert_eq!(code(&run(&["integrate", "--output", &traj])), 0);
    for kind in ["negate-t", "flip0", "flip1", "swap", "shift"] {
        let image = format!("{d}/{kind}.csv");
        let out = run(&["backlund", "--kind", kind, "--input", &traj, "--output", &image]);
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(fs::read_to_string(&image).unwrap().lines().count(), 22);
    }
    assert_eq!(code(&run(&["backlund", "--kind", "shift", "--input", &format!("{d}/missing.csv")])), 2);
}

#[test]
fn backlund_rejects_corrupted_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let traj = format!("{d}/traj.csv");
    let common = ["--theta0", "1,0", "--theta1", "1,0", "--t-end", "1.5,0", "--steps", "20"];
    assert_eq!(code(&degpv(&[&common[..], &["integrate", "--output", &traj]].concat())), 0);
    let text = fs::read_to_string(&traj).unwrap();
    let bumped: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i < 2 {
                return l.to_owned();
            }
            let mut f: Vec<String> = l.split(',').map(str::to_owned).collect();
            f[2] = format!("{:.16e}", f[2].parse::<f64>().unwrap() + 1e-3);
            f.join(",")
        })
        .collect();
    fs::write(&traj, bumped.join("\n")).unwrap();
    let out = degpv(&[&common[..], &["backlund", "--kind", "shift", "--input", &traj, "--output", &format!("{d}/x.csv")]].concat());
    assert_eq!(code(&out), 1);
}

#[test]
fn sweep_is_ordered_and_deterministic() {
    let args = ["sweep", "--n0", "3", "--n1", "3", "--steps", "10", "--t-end", "1.3,0", "--seed", "7"];
    let a = degpv(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = degpv(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    for (i, r) in rows.iter().enumerate() {
        assert!(r.starts_with(&format!("{i},")));
        assert!(r.ends_with(",ok"));
    }
}

#[test]
fn sweep_records_failing_points() {
    let out = degpv(&["sweep", "--n0", "1", "--n1", "2", "--q0", "2,0", "--p0", "0.5,0"]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("error:"));
}

#[test]
fn outputs_are_byte_identical() {
    let a = degpv(&["monodromy", "--theta0", "0.3,0.1"]);
    let b = degpv(&["monodromy", "--theta0", "0.3,0.1"]);
    assert_eq!(a.stdout, b.stdout);
}

use std::path::Path;
use std::process::{Command, Output};

fn qcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcal"))
        .args(args)
        .env_remove("QCAL_SEED")
        .output()
        .expect("failed to run qcal")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("x,value_re,value_im,terms,err_estimate,status")
    );
    lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn eval_at_origin() {
    let o = qcal(&["eval", "calE", "--q", "0.5", "--z", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("value: 1.0000000000000000\n"), "{out}");
    assert!(out.contains("status: Converged"));
}

#[test]
fn eval_reports_pole() {
    let o = qcal(&[
        "eval", "calE", "--q", "0.5", "--z", "4", "--method", "product",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pole at z = 4"), "{}", stderr(&o));
}

#[test]
fn eval_outside_series_domain() {
    let o = qcal(&[
        "eval", "calE", "--q", "0.5", "--z", "-5", "--method", "series",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("OutsideDomain"));
}

#[test]
fn eval_duality_prints_identical_values() {
    let a = qcal(&["eval", "calE", "--q", "2", "--z", "1"]);
    let b = qcal(&["eval", "calE", "--q", "0.5", "--z", "1"]);
    let value = |o: &Output| stdout(o).lines().next().unwrap().to_string();
    assert_eq!(value(&a), value(&b));
}

#[test]
fn eval_complex_argument() {
    let o = qcal(&["eval", "calE", "--q", "0.3", "--z", "0,-2.5"]);
    assert!(o.status.success());
    let line = stdout(&o).lines().next().unwrap().to_string();
    assert!(line.contains(" - "), "{line}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        qcal(&["eval", "calE", "--q", "-1", "--z", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcal(&["eval", "exp", "--q", "0.5", "--z", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qcal(&["eval", "calE", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(
        qcal(&["eval", "calE", "--q", "0.5", "--z", "1,2,3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcal(&["eval", "calE", "--q", "0.5", "--z", "1", "--rel-tol", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_cal_cos_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cos.csv");
    let o = qcal(&[
        "sweep",
        "calCos",
        "--q",
        "0.5",
        "--start",
        "0",
        "--stop",
        "10",
        "--steps",
        "101",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 101);
    for row in rows {
        let v: f64 = row[1].parse().unwrap();
        assert!(v.abs() <= 1.0);
        assert_eq!(row[5], "Converged");
    }
}

#[test]
fn sweep_imaginary_axis_stays_on_unit_circle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let o = qcal(&[
        "sweep",
        "calE",
        "--q",
        "0.9",
        "--var",
        "x_imag_axis",
        "--start",
        "-100",
        "--stop",
        "100",
        "--steps",
        "401",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for row in csv_rows(&path) {
        let re: f64 = row[1].parse().unwrap();
        let im: f64 = row[2].parse().unwrap();
        assert!((re * re + im * im - 1.0).abs() <= 1e-11);
    }
}

#[test]
fn sweep_two_steps_gives_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    let o = qcal(&[
        "sweep",
        "calSin",
        "--q",
        "2",
        "--start",
        "-1",
        "--stop",
        "3",
        "--steps",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "-1");
    assert_eq!(rows[1][0], "3");
}

#[test]
fn sweep_is_bit_stable() {
    let args = [
        "sweep", "tan_q", "--q", "0.3", "--start", "-1", "--stop", "1", "--steps", "57", "--out",
        "-",
    ];
    let a = qcal(&args);
    let b = qcal(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn partial_sweep_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let o = qcal(&[
        "sweep",
        "calE",
        "--q",
        "0.5",
        "--start",
        "3",
        "--stop",
        "5",
        "--steps",
        "3",
        "--method",
        "product",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let rows = csv_rows(&path);
    assert_eq!(rows[1], vec!["4", "", "", "0", "", "Pole"]);
}

#[test]
fn sweep_io_failure_exits_4() {
    let o = qcal(&[
        "sweep",
        "calE",
        "--q",
        "0.5",
        "--start",
        "0",
        "--stop",
        "1",
        "--steps",
        "3",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn sweep_bad_grid_is_usage_error() {
    let o = qcal(&[
        "sweep", "calE", "--q", "0.5", "--start", "1", "--stop", "0", "--steps", "3", "--out", "-",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_json_reports_all_passed() {
    let o = qcal(&["check", "--format", "json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), qcal::verify::IdentityId::registry().len());
    for r in reports {
        assert_eq!(r["passed"], true, "{r}");
        for key in [
            "id",
            "samples_evaluated",
            "skipped",
            "max_residual",
            "mean_residual",
        ] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        for key in ["arg_re", "arg_im", "q"] {
            assert!(
                r["worst_point"].get(key).is_some(),
                "missing worst_point.{key}"
            );
        }
    }
}

#[test]
fn check_text_has_one_line_per_identity() {
    let o = qcal(&["check", "--format", "text"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(
        out.lines().count(),
        qcal::verify::IdentityId::registry().len()
    );
    assert!(out.lines().all(|l| l.ends_with("PASS")));
}

#[test]
fn check_with_unattainable_tolerance_fails() {
    let o = qcal(&["check", "--tol", "Pythagorean=1e-16"]);
    assert_ne!(o.status.code(), Some(0));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("Pythagorean "))
        .unwrap()
        .to_string();
    assert!(line.ends_with("FAIL"));
}

#[test]
fn check_unknown_identity_exits_2() {
    assert_eq!(
        qcal(&["check", "--tol", "Nope=1e-3"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_qcal"))
            .args(["check", "--format", "json"])
            .env("QCAL_SEED", seed)
            .output()
            .unwrap()
    };
    let a = run("7");
    let b = run("7");
    let c = run("8");
    assert!(a.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(run("seven").status.code(), Some(2));
}

#[test]
fn radius_values() {
    assert_eq!(stdout(&qcal(&["radius", "--q", "1"])).trim(), "inf");
    assert_eq!(stdout(&qcal(&["radius", "--q", "0.5"])).trim(), "4");
    assert_eq!(stdout(&qcal(&["radius", "--q", "2"])).trim(), "4");
}

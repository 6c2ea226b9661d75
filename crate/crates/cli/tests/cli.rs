use std::path::Path;
use std::process::{Command, Output};

fn usvsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usvsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().last().expect("stderr line");
    serde_json::from_str(line).expect("json error record")
}

fn run_setpoint(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("out");
    let o = usvsim(&[
        "run",
        "setpoint",
        "--controller",
        "bs,abs",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn run_writes_log_summary_and_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_setpoint(tmp.path());
    for label in ["setpoint-bs", "setpoint-abs"] {
        for file in ["log.csv", "summary.json", "scenario.toml"] {
            assert!(out.join(label).join(file).is_file(), "{label}/{file}");
        }
    }
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("setpoint-abs/summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["meta"]["controller"], "abs");
}

#[test]
fn missing_config_fails_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = usvsim(&[
        "run",
        "setpoint",
        "--config",
        "/does/not/exist.toml",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["kind"], "validation");
    assert!(!out.exists());
}

#[test]
fn bad_flag_is_usage_error() {
    let o = usvsim(&["run", "setpoint", "--jobs", "many"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(usvsim(&["--help"]).status.success());
}

#[test]
fn compare_log_with_itself_is_a_tie() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_setpoint(tmp.path());
    let log = out.join("setpoint-bs/log.csv");
    let log = log.to_str().unwrap();
    let report = tmp.path().join("cmp");
    let o = usvsim(&["compare", log, log, "--out", report.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("speed error after"));
    assert!(text.lines().skip(1).all(|l| l.contains(" 0.0%")), "{text}");
    assert!(report.join("comparison.csv").is_file());
    assert!(report.join("comparison.json").is_file());
}

#[test]
fn compare_abs_against_bs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_setpoint(tmp.path());
    let a = out.join("setpoint-abs/log.csv");
    let b = out.join("setpoint-bs/log.csv");
    let o = usvsim(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("abs"));
}

#[test]
fn truncated_log_reports_line() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_setpoint(tmp.path());
    let text = std::fs::read_to_string(out.join("setpoint-bs/log.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().take(50).map(String::from).collect();
    lines[49] = lines[49].split(',').take(3).collect::<Vec<_>>().join(",");
    let broken = tmp.path().join("broken.csv");
    std::fs::write(&broken, lines.join("\n")).unwrap();
    let o = usvsim(&[
        "compare",
        broken.to_str().unwrap(),
        broken.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["line"], 50);
}

#[test]
fn thrust_decay_calibration() {
    let o = usvsim(&["fit", "--model", "thrust-decay"]);
    assert!(o.status.success());
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("a1_total"))
        .map(String::from)
        .unwrap();
    let value: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((value + 36.58).abs() < 0.01, "{value}");
}

#[test]
fn surge_drag_fit_needs_three_points() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one.csv");
    std::fs::write(&one, "1.0,50\n").unwrap();
    let o = usvsim(&["fit", one.to_str().unwrap(), "--model", "surge-drag"]);
    assert_eq!(o.status.code(), Some(1));

    let many = tmp.path().join("many.csv");
    let rows: String = (1..=6)
        .map(|k| {
            let u = 0.5 * k as f64;
            format!("{u},{}\n", -14.0 * u * u + 75.0 * u)
        })
        .collect();
    std::fs::write(&many, rows).unwrap();
    let frag = tmp.path().join("drag.toml");
    let o = usvsim(&[
        "fit",
        many.to_str().unwrap(),
        "--model",
        "surge-drag",
        "--fragment",
        frag.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(frag).unwrap();
    assert!(text.contains("quadratic"), "{text}");
}

#[test]
fn derive_coeffs_tables() {
    let o = usvsim(&["derive-coeffs", "--condition", "lightship"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let x_udot = text.lines().find(|l| l.starts_with("X_udot")).unwrap();
    assert!(x_udot.contains("-16.5000"), "{x_udot}");

    let o = usvsim(&["derive-coeffs", "--condition", "slick", "--format", "json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("150"));

    let o = usvsim(&["derive-coeffs", "--nu", "1.5,0,0", "--format", "csv"]);
    assert!(o.status.success());
    assert!(usvsim(&["derive-coeffs", "--nu", "1.5"]).status.code() == Some(1));

    let o = usvsim(&["derive-coeffs", "--condition", "heavy"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_data_is_tidy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_setpoint(tmp.path());
    let log = out.join("setpoint-abs/log.csv");
    let tidy = tmp.path().join("tidy.csv");
    let o = usvsim(&[
        "plot-data",
        log.to_str().unwrap(),
        "--channels",
        "u,u_d,x_u_hat",
        "--out",
        tidy.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(tidy).unwrap();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("t,channel,value"));
    assert_eq!(lines.filter(|l| l.contains(",x_u_hat,")).count(), 13501);

    let o = usvsim(&["plot-data", log.to_str().unwrap(), "--channels", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scenario_prints_loadable_toml() {
    let tmp = tempfile::tempdir().unwrap();
    let o = usvsim(&["scenario", "variable-drag", "--controller", "abs"]);
    assert!(o.status.success());
    let path = tmp.path().join("drag.toml");
    std::fs::write(&path, stdout(&o)).unwrap();
    let out = tmp.path().join("out");
    let o = usvsim(&[
        "run",
        path.to_str().unwrap(),
        "--controller",
        "abs",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("drag-abs/log.csv").is_file());
}

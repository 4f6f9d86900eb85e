use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_deltashell"));
    cmd.env_remove("DSS_OUT");
    cmd
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(dir: &Path, config: &str, args: &[&str]) -> (Output, PathBuf) {
    let cfg = write_config(dir, config);
    let out = dir.join("out");
    let output = bin()
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    (output, out)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

const KP1: &str =
    r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 200.0}}"#;
const FREE: &str =
    r#"{"lattice": {"alpha": 0.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 20.0}}"#;

#[test]
fn missing_period_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = run(
        dir.path(),
        r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {}}, "r_max": 50.0}}"#,
        &["bands"],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("spec.periodic.a"), "{stderr}");
}

#[test]
fn missing_config_and_bad_flags_exit_2() {
    let out = bin().arg("bands").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["experiment", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = run(
        dir.path(),
        KP1,
        &["eigen", "--radius", "20.5", "--window", "5:1"],
    );
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = run(
        dir.path(),
        KP1,
        &["eigen", "--radius", "300", "--window", "1:5"],
    );
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = run(dir.path(), KP1, &["bands", "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn free_bands_have_no_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run(
        dir.path(),
        FREE,
        &["bands", "--lambda-min", "0", "--lambda-max", "500"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(csv_rows(&path.join("bands.csv")).len(), 1);
}

#[test]
fn bands_report_seven_gaps_below_500() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run(dir.path(), KP1, &["bands", "--lambda-max", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&path.join("bands.csv"));
    assert_eq!(rows.len(), 8);
    let gap_lo: f64 = rows[0][2].parse().unwrap();
    assert!((gap_lo - PI * PI).abs() < 1e-9);
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(path.join("manifest.json")).unwrap())
            .unwrap();
    let names: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["bands.csv", "discriminant.csv"]);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn eigen_free_case() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run(
        dir.path(),
        FREE,
        &["eigen", "--radius", "10", "--window", "0.5:5"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&path.join("eigen.csv"));
    // (n pi / 10)^2 in (0.5, 5) for n = 3..=7
    assert_eq!(rows.len(), 5);
    for (row, n) in rows.iter().zip(3..) {
        let lambda: f64 = row[3].parse().unwrap();
        assert!((lambda - (n as f64 * PI / 10.0).powi(2)).abs() < 1e-8);
        assert_eq!(row[4], (n - 1).to_string());
    }
}

#[test]
fn eigen_settings_from_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"lattice": {"alpha": 0.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 20.0},
                     "eigen": {"l": 0, "radius": 10.0, "window": [0.5, 5.0]}}"#;
    let (out, path) = run(dir.path(), config, &["eigen"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&path.join("eigen.csv")).len(), 5);
    let (out, path) = run(dir.path(), config, &["eigen", "--radius", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&path.join("eigen.csv"));
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == 20.0));
}

#[test]
fn dss_out_sets_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), KP1);
    let target = dir.path().join("env_out");
    let out = bin()
        .args(["bands", "--lambda-max", "50", "--config"])
        .arg(&cfg)
        .env("DSS_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("bands.csv").exists());
}

#[test]
fn experiment_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run(dir.path(), KP1, &["experiment", "asymptote"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(path.join("asymptote_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["verdict"], "PASS");
    assert!(path.join("asymptote.csv").exists());

    let free = r#"{"lattice": {"alpha": 0.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 200.0}}"#;
    let (out, _) = run(dir.path(), free, &["experiment", "gapfill", "--l-max", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn experiment_config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"lattice": {"alpha": 1.0, "spec": {"periodic": {"a": 1.0}}, "r_max": 200.0},
                     "experiment": {"gapfill": {"gapp": 1}}}"#;
    let (out, _) = run(dir.path(), config, &["experiment", "gapfill"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment.gapfill"));
}

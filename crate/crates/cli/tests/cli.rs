use std::path::Path;
use std::process::{Command, Output};

fn gallery(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gallery"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn trace_ray_writes_six_segments() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["trace-ray", "--kappa", "1", "--xd0", "1", "--xip", "1", "--xid0", "0", "--tau0", "1", "--reflections", "5"];
    let out = gallery(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("ray.json"))).unwrap();
    assert_eq!(v["segments"], 6);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["reflections"], "5");
    assert_eq!(data_rows(&read(&dir.path().join("collisions.csv"))).len(), 5);
    assert_eq!(data_rows(&read(&dir.path().join("ray.csv"))).len(), 6 * 65);
}

#[test]
fn trace_ray_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = gallery(dir.path(), &["trace-ray", "--xd0", "1", "--xip", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gallery(dir.path(), &["trace-ray", "--kappa", "1", "--xd0", "-1", "--xip", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xd must be ≥ 0"));
    let out = gallery(dir.path(), &["trace-ray", "--kappa", "1", "--xd0", "1", "--xip", "1", "--tau0", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gallery(dir.path(), &["trace-ray", "--kappa", "1", "--xd0", "1", "--xip", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mode_csv_reports_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = gallery(dir.path(), &["--format", "csv", "mode", "--kappa", "0.5", "--n", "2", "--smax", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = read(&dir.path().join("mode.csv"));
    let res: f64 = csv.lines().find_map(|l| l.strip_prefix("# ode_residual=")).unwrap().parse().unwrap();
    assert!(res <= 1e-8);
    assert!(csv.lines().any(|l| l == "s,B,dB,d2B"));
    assert!(!dir.path().join("mode.json").exists());
}

#[test]
fn identical_runs_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gallery(a.path(), &["packet", "--kappa", "0.5", "--j", "2"]);
    gallery(b.path(), &["--threads", "1", "packet", "--kappa", "0.5", "--j", "2"]);
    for f in ["packet.csv", "packet.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn dispersive_d3_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = gallery(dir.path(), &["dispersive", "--d", "3", "--lambda-min", "100", "--lambda-max", "2000", "--points", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("dispersive.json"))).unwrap();
    let slope = v["fit"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() <= 0.05, "{slope}");
    assert_eq!(data_rows(&read(&dir.path().join("dispersive.csv"))).len(), 6);
}

#[test]
fn ladder_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, "kappa = 0.5\nq = 2\nr = inf\nj_min = 2\nj_max = 4\ntime_samples = 8\n").unwrap();
    let out = gallery(dir.path(), &["ladder", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("ladder.json"))).unwrap();
    let ratio = v["fits"].as_array().unwrap().iter().find(|f| f["name"] == "ratio").unwrap();
    assert_eq!(ratio["fit"]["predicted_slope"], 4.0);
    assert_eq!(ratio["fit"]["pass"], true);
    assert!(read(&dir.path().join("ladder.csv")).contains("# j_max = 4"));
}

#[test]
fn config_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "kappa = 0.5\ncolour = blue\n").unwrap();
    assert_eq!(gallery(dir.path(), &["ladder", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let off = dir.path().join("off.cfg");
    std::fs::write(&off, "q = 2\nr = inf\nj_min = 2\nj_max = 4\n").unwrap();
    assert_eq!(gallery(dir.path(), &["gallery-strichartz", "--config", off.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.cfg");
    assert_eq!(gallery(dir.path(), &["ladder", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
}

// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn gltau() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gltau"));
    cmd.env_remove("GLTAU_OUT");
    cmd
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_dir(out: &Output) -> PathBuf {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    PathBuf::from(String::from_utf8(out.stdout.clone()).unwrap().trim())
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

fn moments_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "moments.json",
        r#"{
            "model": {"lambda": 1.0, "tau": [0.0, 0.0]},
            "sizes": [8],
            "polynomial": "tr(g1 g1)",
            "times": [0.0, 1.0]
        }"#,
    )
}

#[test]
fn moments_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let cfg = moments_config(tmp.path());
    let out = gltau()
        .args(["moments", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    let dir = run_dir(&out);
    let rows = read_csv(&dir.join("moments.csv"));
    assert_eq!(rows.len(), 2);
    let e = (-1.0f64).exp();
    let expected = e * (0.125f64).cosh() - 8.0 * e * (0.125f64).sinh();
    let row = &rows[1];
    assert_eq!(row[0], "8");
    assert_eq!(row[4], "exact-finite");
    let re: f64 = row[2].parse().unwrap();
    let im: f64 = row[3].parse().unwrap();
    assert!((re - expected).abs() < 1e-10, "{re} vs {expected}");
    assert!(im.abs() < 1e-14);
}

#[test]
fn moments_at_time_zero_is_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "zero.json",
        r#"{
            "model": {"lambda": 1.0, "tau": [0.5, 0.3]},
            "sizes": [3, 5],
            "free": true,
            "polynomial": "tr(g1 g1* g1^-1 g1)",
            "times": [0.0]
        }"#,
    );
    let out = gltau()
        .args(["moments", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    let rows = read_csv(&run_dir(&out).join("moments.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][0], "inf");
    for row in rows {
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn rerun_reproduces_tables_and_digests() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "compare.json",
        r#"{
            "model": {"lambda": 1.0, "tau": [0.5, 0.3]},
            "sizes": [3],
            "polynomial": "tr(g1 g1*)",
            "times": [0.5],
            "replicas": 20,
            "dt": 0.05,
            "seed": 11
        }"#,
    );
    let dirs: Vec<PathBuf> = [1, 4]
        .iter()
        .map(|w| {
            let out = gltau()
                .args(["compare", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(tmp.path().join("out"))
                .args(["--workers", &w.to_string()])
                .output()
                .unwrap();
            run_dir(&out)
        })
        .collect();
    assert_ne!(dirs[0], dirs[1]);
    let a = fs::read(dirs[0].join("compare.csv")).unwrap();
    let b = fs::read(dirs[1].join("compare.csv")).unwrap();
    assert_eq!(a, b);

    for dir in &dirs {
        let manifest: Value =
            serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        let files = manifest["files"].as_array().unwrap();
        assert_eq!(files.len(), 1);
        for f in files {
            let bytes = fs::read(dir.join(f["name"].as_str().unwrap())).unwrap();
            assert_eq!(
                f["sha256"].as_str().unwrap(),
                format!("{:x}", Sha256::digest(&bytes))
            );
            assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
        }
        assert_eq!(manifest["kind"], "compare");
        assert_eq!(manifest["config"]["seed"], 11);
        assert_eq!(manifest["seeds"]["base"], 11);
    }
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sim.json",
        r#"{
            "model": {"a": 0.5, "b": 0.5, "theta": 0.0},
            "sizes": [2],
            "replicas": 2,
            "times": [0.2],
            "seed": 1
        }"#,
    );
    let table = |seed: Option<&str>| {
        let mut cmd = gltau();
        cmd.args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path());
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        fs::read(run_dir(&cmd.output().unwrap()).join("simulate.csv")).unwrap()
    };
    let base = table(None);
    assert_eq!(base, table(Some("1")));
    assert_ne!(base, table(Some("2")));
}

#[test]
fn dry_run_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let cfg = moments_config(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = gltau()
        .args(["moments", "--dry-run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let plan: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(plan["basis_dimension"].as_u64().unwrap() >= 2);
    assert!(!out_dir.exists());
}

#[test]
fn dry_run_reports_replicas() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "var.json",
        r#"{
            "model": {"lambda": 1.0, "tau": [1.0, 0.0]},
            "sizes": [8, 16, 32],
            "polynomial": "g1 + g1*",
            "replicas": 1500,
            "dt": 0.1,
            "function": {"kind": "bump", "center": 0.0, "radius": 3.0}
        }"#,
    );
    let out = gltau()
        .args(["variance-scan", "--dry-run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let plan: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(plan["replicas"], 1500);
    assert_eq!(plan["trajectories"], 4500);
    assert_eq!(plan["steps_per_replica"], 10);
}

fn expect_failure(out: &Output, code: i32, reason: &str) -> String {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error={reason} ")), "{err}");
    err
}

#[test]
fn syntax_error_reports_position() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"model": {"lambda": 1.0, "tau": [0.0, 0.0]}, "sizes": [4], "polynomial": "tr(g1 q2)"}"#,
    );
    let out = gltau()
        .args(["moments", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let err = expect_failure(&out, 2, "config");
    assert!(err.contains("line 1, column 7"), "{err}");
    assert!(err.contains("q2"), "{err}");
}

#[test]
fn malformed_json_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "broken.json", "{\n  \"sizes\": [4,\n}");
    let out = gltau()
        .args(["moments", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let err = expect_failure(&out, 2, "config");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn both_parametrisations_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "both.json",
        r#"{"model": {"lambda": 1.0, "tau": [0.0, 0.0], "a": 1.0, "b": 0.0, "theta": 0.0}, "sizes": [4], "polynomial": "tr(g1)"}"#,
    );
    let out = gltau()
        .args(["moments", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    expect_failure(&out, 2, "config");
}

#[test]
fn missing_matrix_file_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "det.json",
        r#"{"model": {"lambda": 1.0, "tau": [0.0, 0.0]}, "sizes": [2], "polynomial": "tr(g1 a1)",
            "deterministic": [{"file": "nope.txt"}]}"#,
    );
    let out = gltau()
        .args(["simulate", "--dry-run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    expect_failure(&out, 2, "config");
}

#[test]
fn oversized_basis_is_a_resource_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "big.json",
        r#"{"model": {"lambda": 1.0, "tau": [0.0, 0.0]}, "sizes": [4], "p": 3, "d": 20, "polynomial": "tr(g1)"}"#,
    );
    let out = gltau()
        .args(["moments", "--dry-run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    expect_failure(&out, 4, "resource");
}

#[test]
fn inadmissible_parameters_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "adm.json",
        r#"{"model": {"lambda": 1.0, "tau": [2.5, 0.0]}, "sizes": [4], "polynomial": "tr(g1)"}"#,
    );
    let out = gltau()
        .args(["moments", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    expect_failure(&out, 2, "config");
}

#[test]
fn gltau_out_sets_default_directory() {
    let tmp = TempDir::new().unwrap();
    let cfg = moments_config(tmp.path());
    let base = tmp.path().join("env-out");
    let out = gltau()
        .env("GLTAU_OUT", &base)
        .args(["moments", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let dir = run_dir(&out);
    assert_eq!(dir.parent().unwrap(), base);
    let name = dir.file_name().unwrap().to_str().unwrap();
    assert!(name.starts_with("moments-"), "{name}");
    assert!(dir.join("manifest.json").exists());

    let flag = tmp.path().join("flag-out");
    let out = gltau()
        .env("GLTAU_OUT", &base)
        .args(["moments", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&flag)
        .output()
        .unwrap();
    assert_eq!(run_dir(&out).parent().unwrap(), flag);
}

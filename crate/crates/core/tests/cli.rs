use std::path::{Path, PathBuf};
use std::process::Command;

use num_complex::Complex64;

use iga_radiation::app::{MmsConfig, PollutionConfig, RunConfig};
use iga_radiation::solver::{matrix_market, SparseComplex};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iga-radiation"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn every_checked_in_config_parses() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(&p).unwrap();
        if name.starts_with("mms_") {
            serde_json::from_str::<MmsConfig>(&text).unwrap().validate().unwrap();
        } else if name.starts_with("pollution") {
            serde_json::from_str::<PollutionConfig>(&text).unwrap();
        } else {
            RunConfig::load(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn full_scale_configs_need_the_flag() {
    let out = bin().args(["run"]).arg(configs().join("full_1mhz.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(9));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("GB"), "{err}");
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let missing = bin().args(["run", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(3));

    let bad = write(dir.path(), "bad.json", r#"{"frequency": -1.0, "a": 0.01, "n": 10, "m": 10}"#);
    assert_eq!(bin().arg("run").arg(&bad).output().unwrap().status.code(), Some(2));

    let garbled = write(dir.path(), "garbled.json", "{ not json");
    assert_eq!(bin().arg("run").arg(&garbled).output().unwrap().status.code(), Some(2));

    // a Krylov budget too small to converge
    let cfg = write(
        dir.path(),
        "tight.json",
        &format!(
            r#"{{"frequency": 7.5e4, "a": 0.03, "order_xi": 3, "order_eta": 3, "n": 20, "m": 16,
                "beta_factor": 50.0, "gmres": {{"restart": 1, "max_outer": 1, "tol": 1e-14}},
                "output": {{"dir": "{}"}}}}"#,
            dir.path().join("tight").display()
        ),
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(7), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn small_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "small.json",
        r#"{"frequency": 7.5e4, "a": 0.03, "order_xi": 3, "order_eta": 3, "n": 24, "m": 20}"#,
    );
    let out_dir = dir.path().join("out");
    let status = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--vtk", "field.vtk", "--export-matrices", "mm", "--compare-direct"])
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["report.json", "field.vtk", "mm/system.mtx", "mm/rhs.mtx", "mm/mass.mtx"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(report["dirichlet_deviation"].as_f64().unwrap() <= 1e-10);

    // the exported system solved through solve-mm agrees with the direct solve
    let x_gmres = dir.path().join("x_gmres.mtx");
    let x_direct = dir.path().join("x_direct.mtx");
    let mm = out_dir.join("mm");
    let beta = report["derived"]["beta"].as_f64().unwrap();
    let status = bin()
        .arg("solve-mm")
        .arg(mm.join("system.mtx"))
        .arg(mm.join("rhs.mtx"))
        .arg("--mass")
        .arg(mm.join("mass.mtx"))
        .args(["--beta", &beta.to_string(), "--tol", "1e-10", "--out"])
        .arg(&x_gmres)
        .status()
        .unwrap();
    assert!(status.success());
    let status =
        bin().arg("solve-mm").arg(mm.join("system.mtx")).arg(mm.join("rhs.mtx")).arg("--direct").arg("--out").arg(&x_direct).status().unwrap();
    assert!(status.success());
    let a = matrix_market::read_vector(&x_gmres).unwrap();
    let b = matrix_market::read_vector(&x_direct).unwrap();
    let diff: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
    assert!(diff <= 1e-8 * norm, "{diff} vs {norm}");
}

#[test]
fn solve_mm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let n = 12;
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, Complex64::new(4.0, 0.5)));
        if i + 1 < n {
            t.push((i, i + 1, Complex64::new(-1.0, 0.0)));
            t.push((i + 1, i, Complex64::new(-1.0, 0.0)));
        }
    }
    let a = SparseComplex::from_triplets(n, n, &t).unwrap();
    let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 / (1.0 + i as f64))).collect();
    let b = a.matvec(&x);
    let ap = dir.path().join("a.mtx");
    let bp = dir.path().join("b.mtx");
    matrix_market::write_matrix(&ap, &a).unwrap();
    matrix_market::write_vector(&bp, &b).unwrap();
    let xp = dir.path().join("x.mtx");
    let status = bin().arg("solve-mm").arg(&ap).arg(&bp).args(["--tol", "1e-13", "--out"]).arg(&xp).status().unwrap();
    assert!(status.success());
    let got = matrix_market::read_vector(&xp).unwrap();
    for (g, w) in got.iter().zip(&x) {
        assert!((g - w).norm() < 1e-10);
    }
    // --mass without --beta is a usage error
    let out = bin().arg("solve-mm").arg(&ap).arg(&bp).arg("--mass").arg(&ap).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quality_map_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("q.csv");
    let out = bin().args(["quality-map", "--res", "20", "--csv"]).arg(&csv).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("min J_r"));
    let lines = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert!(lines >= 400);
}

#[test]
fn mms_converge_reports_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "mms.json", r#"{"k": 4.0, "r": 1.0, "a": 0.5, "order": 3, "base_spans": 4, "levels": 2}"#);
    let json = dir.path().join("t.json");
    let out = bin().arg("mms-converge").arg(&cfg).arg("--json").arg(&json).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(t["rows"].as_array().unwrap().len(), 2);
}

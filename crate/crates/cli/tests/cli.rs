//! The `qrf` binary: outputs, exit codes and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qrf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrf"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

const SMALL: &str = "\
[state.B]
width = 1
[state.C]
center = 0.5
width = 1
[grid.B]
n = 64
[grid.C]
n = 64
[times]
linspace = 0, 4, 9
";

#[test]
fn fig2_is_byte_stable() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = qrf(&["fig2", "--out", dir.path().to_str().unwrap()], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["fig2.csv", "fig2.svg", "fig2_manifest.json"] {
        let x = fs::read(a.path().join(file)).unwrap();
        let y = fs::read(b.path().join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join("fig2_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["time_unit"], "tau");
    assert_eq!(manifest["units"], "si");
    assert!(manifest["derived"]["tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn run_writes_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.ini"), SMALL).unwrap();
    let out = qrf(&["run", "s.ini", "--out", "results"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["gamma_curve.csv", "gamma_curve.svg", "gamma_curve_manifest.json"] {
        assert!(dir.path().join("results").join(file).is_file(), "{file}");
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("dup.ini"), SMALL.replace("width = 1\n[state.C]", "width = 1\nwidth = 2\n[state.C]")).unwrap();
    let out = qrf(&["run", "dup.ini"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("`width`"), "{err}");

    fs::write(dir.path().join("narrow.ini"), SMALL.replace("n = 64\n[grid.C]", "n = 64\np_min = -2\np_max = 2\n[grid.C]")).unwrap();
    assert_eq!(qrf(&["run", "narrow.ini"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    // At t = 100 the controlled boost moves B far outside its position window.
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("linspace = 0, 4, 9", "values = 0, 100") + "[experiment]\nkind = purity_curve\n";
    fs::write(dir.path().join("far.ini"), text).unwrap();
    let out = qrf(&["run", "far.ini"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frames"));
}

#[test]
fn io_failures_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qrf(&["run", "missing.ini"], dir.path()).status.code(), Some(4));
    fs::write(dir.path().join("s.ini"), SMALL).unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    assert_eq!(qrf(&["run", "s.ini", "--out", "blocker"], dir.path()).status.code(), Some(4));
}

//! End-to-end checks of the fraclab binary: subcommands, config overrides,
//! report files and exit codes.

use std::path::Path;
use std::process::Command;

fn fraclab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fraclab"))
}

#[test]
fn catalog_lists_required_fractals() {
    let out = fraclab().arg("catalog").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "cantor3",
        "cantor4",
        "fourcorner",
        "sierpinski",
        "cantor3sq",
        "dust3",
    ] {
        assert!(text.contains(name), "catalog missing {name}:\n{text}");
    }
}

#[test]
fn cover_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cover.csv");
    let status = fraclab()
        .args(["cover", "--fractal", "cantor3", "--r", "4", "--out"])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "r,n,cell_index_0");
    assert!(lines.clone().count() >= 4);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3);
        assert_eq!(cols[0], "4");
        assert_eq!(cols[1], "1");
    }
}

#[test]
fn project_axis_direction() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("proj.csv");
    let status = fraclab()
        .args([
            "project",
            "--fractal",
            "fourcorner",
            "--r",
            "5",
            "--direction",
            "1,0",
            "--out",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("r,n,cell_index_0\n"));
}

#[test]
fn dim_emits_estimate_json() {
    let out = fraclab()
        .args(["dim", "--fractal", "sierpinski", "--window", "6", "14"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!((slope - 1.58496).abs() < 0.05, "slope {slope}");
    assert_eq!(v["mode"], "ls");
}

#[test]
fn toy_verify_writes_reports_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("toy");
    let status = fraclab()
        .args([
            "toy-verify",
            "--l-max",
            "14",
            "--instances",
            "10",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&base)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(Path::new(&base.with_extension("json")).exists());
    assert!(Path::new(&base.with_extension("csv")).exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["kind"], "toy-verify");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{"kind":"marstrand","fractal":"square","directions":64,"seed":1,
            "window":[4,10],"tol":0.1}"#,
    )
    .unwrap();
    let base = dir.path().join("rep");
    // --directions overrides the config's 64
    let status = fraclab()
        .args(["marstrand", "--config"])
        .arg(&cfg_path)
        .args(["--directions", "6", "--out"])
        .arg(&base)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 6);
}

#[test]
fn unknown_fractal_exits_two() {
    let out = fraclab()
        .args(["cover", "--fractal", "nope", "--r", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nope"));
}

#[test]
fn failing_verdict_exits_one() {
    // an impossible tolerance forces the threshold verdict to fail
    let out = fraclab()
        .args([
            "marstrand",
            "--fractal",
            "square",
            "--directions",
            "4",
            "--seed",
            "2",
            "--window",
            "4",
            "10",
            "--tol=-1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ifs_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let ifs_path = dir.path().join("my.json");
    std::fs::write(
        &ifs_path,
        r#"{"maps":[{"ratio":0.5,"translation":[0.0]},
                     {"ratio":0.5,"translation":[0.5]}],
            "open_set_condition":true}"#,
    )
    .unwrap();
    // the attractor is [0, 1]; its cover at r=3 has all 8 interior cells
    let out = fraclab()
        .args(["cover", "--ifs-file"])
        .arg(&ifs_path)
        .args(["--r", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cells: Vec<&str> = text.lines().skip(1).collect();
    for want in 0..8 {
        assert!(cells.iter().any(|l| l.ends_with(&format!(",{want}"))));
    }
}

#[test]
fn recover_subcommand_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("rec");
    let status = fraclab()
        .args([
            "recover",
            "--instances",
            "30",
            "--seed",
            "5",
            "--r",
            "30",
            "--out",
        ])
        .arg(&base)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "seed,n,r,t,error,bound,pass");
    assert_eq!(lines.count(), 30);
}

#[test]
fn dim_point_source_runs() {
    let out = fraclab()
        .args(["dim", "--point-source", "rational", "--seed", "12"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "dim-point");
    assert!(v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x["pass"] == true));
}

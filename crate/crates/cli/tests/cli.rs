use std::path::Path;
use std::process::{Command, Output};

fn mdcurves(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdcurves"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn segment_profile_is_exact() {
    let out = mdcurves(&[
        "profile",
        "--spec",
        r#"{"type":"segment"}"#,
        "--grid",
        "0:1:21",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,mDpu,mDpl,mDmu,mDml,md,md_exists,defect,bilateral_ratio_min\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 21);
    for r in rows {
        assert_eq!(r.len(), 9);
        assert!((num(&r[5]) - 1.0).abs() < 1e-6);
        assert_eq!(r[6], "true");
        assert!(num(&r[7]) < 1e-9);
    }
}

#[test]
fn abs_profile_at_the_corner() {
    let out = mdcurves(&["profile", "--spec", r#"{"type":"abs"}"#, "--grid", "-1:1:3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let corner = &rows[1];
    assert_eq!(num(&corner[0]), 0.0);
    assert_eq!(corner[6], "true");
    assert!((num(&corner[7]) - 1.0).abs() < 1e-9);
    assert!(rows[0][3].is_empty() && rows[2][1].is_empty());
}

#[test]
fn seventeen_significant_digits() {
    let out = mdcurves(&[
        "profile",
        "--spec",
        r#"{"type":"parabola"}"#,
        "--grid",
        "0.1:0.9:3",
    ]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let x = &rows[0][0];
    let mantissa = x.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{x}");
    assert_eq!(num(x), 0.1);
}

#[test]
fn hat_profile_depth_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hat.csv");
    let start = std::time::Instant::now();
    let out = mdcurves(&[
        "profile",
        "--spec",
        r#"{"type":"hat"}"#,
        "--depth",
        "4",
        "--grid",
        "0:1:100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(start.elapsed().as_secs() < 60);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 100);
    for r in rows {
        let md = num(&r[5]);
        assert!((0.9..=1.1).contains(&md), "{r:?}");
    }
}

#[test]
fn profile_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let out = mdcurves(&[
        "profile",
        "--spec",
        r#"{"type":"circle"}"#,
        "--grid",
        "1:2:4",
        "--ladder",
        "0.01:0.5:16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["ladder"]["steps"], 16);
}

#[test]
fn build_writes_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spiral.json");
    std::fs::write(&spec, r#"{"type":"spiral","q":0.9,"alpha":1.0}"#).unwrap();
    let path = dir.path().join("out.json");
    let out = mdcurves(&[
        "build",
        "--spec",
        spec.to_str().unwrap(),
        "--grid",
        "0:1:11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["metadata"]["params"]["b"], 2.3);
    assert_eq!(v["samples"].as_array().unwrap().len(), 11);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 2);
}

fn verify_to(dir: &Path, name: &str, args: &[&str]) -> (Option<i32>, String) {
    let path = dir.join(name);
    let mut all = vec!["verify"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = mdcurves(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    (out.status.code(), text)
}

#[test]
fn verify_spiral_and_box_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = verify_to(dir.path(), "s.json", &["--suite", "spiral"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passed"], true);
    let (code, text) = verify_to(dir.path(), "b.json", &["--suite", "box"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let checks = v["reports"][0]["checks"].as_array().unwrap();
    let ratio = checks.iter().find(|c| c["id"] == "box.pair_ratio").unwrap();
    assert!(ratio["measured"].as_f64().unwrap() <= 1e-12);
    for c in checks {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn mis_normalized_kink_fails_with_the_builder_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = verify_to(
        dir.path(),
        "k.json",
        &[
            "--suite",
            "kink",
            "--spec",
            r#"{"type":"kink","n_max":4,"weights":[0.6,0.6,0.6,0.6]}"#,
        ],
    );
    assert_eq!(code, Some(1));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let check = &v["reports"][0]["checks"][0];
    assert_eq!(check["passed"], false);
    assert!(check["detail"].as_str().unwrap().contains("weights"));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["verify", "--suite", "nope"],
        vec!["verify", "--suite", "box", "--spec", r#"{"type":"abs"}"#],
        vec!["profile", "--spec", r#"{"type":"torus"}"#],
        vec!["profile", "--spec", r#"{"type":"abs"}"#, "--grid", "1:0:3"],
        vec![
            "profile",
            "--spec",
            r#"{"type":"abs"}"#,
            "--ladder",
            "1:2:10",
        ],
        vec!["build", "--spec", "/nonexistent/spec.json"],
        vec!["build", "--spec", r#"{"type":"abs"}"#, "--depth", "3"],
        vec![
            "build",
            "--spec",
            r#"{"type":"spiral","q":0.9,"alpha":1.0,"b":2.1}"#,
        ],
    ] {
        assert_eq!(mdcurves(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = verify_to(
        dir.path(),
        "a.json",
        &["--suite", "porosity", "--seed", "7"],
    );
    let (_, b) = verify_to(
        dir.path(),
        "b.json",
        &["--suite", "porosity", "--seed", "7"],
    );
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let p = |out: &str| {
        mdcurves(&[
            "profile",
            "--spec",
            r#"{"type":"hat","depth":3}"#,
            "--grid",
            "0:2:17",
            "--out",
            out,
        ]);
        std::fs::read(out).unwrap()
    };
    let (x, y) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    assert_eq!(p(x.to_str().unwrap()), p(y.to_str().unwrap()));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scarf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scarf"))
        .args(args)
        .output()
        .expect("spawn scarf")
}

fn json(args: &[&str]) -> Value {
    let out = scarf(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["coeffs", "--p1", "c=1", "--k", "1"][..],
        &["coeffs", "--p1", "c=1", "d=0.5", "--k", "1:0:1"],
        &["coeffs", "--p1", "c=1", "e=0.5", "--k", "1"],
        &["coeffs", "--p1", "c=1", "d=0.5", "--p2", "c=1", "--k", "1"],
        &["poles", "--p1", "c=1", "d=0.5", "--grid", "4x4"],
        &["poles", "--p1", "c=1", "d=0.5", "--region", "1:0:0:1"],
        &["oracle", "--p4", "c=2", "d=5", "--k", "0.01"],
        &[
            "oracle",
            "--p1",
            "c=1",
            "d=0.5",
            "--k",
            "1.5",
            "--fixed-domain",
            "--half-width",
            "3",
        ],
        &["coeffs", "--raw", "A=2", "B=1", "--k", "1", "--format", "xml"],
        &["frobnicate"],
    ] {
        let out = scarf(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
    }
}

#[test]
fn computation_failures_exit_3_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("o.json");
    let t = target.to_str().unwrap();
    // The oracle cannot resolve an amplitude sitting on a spectral singularity.
    let out = scarf(&["oracle", "--p4", "c=2", "d=5", "--k", "2", "--out", t]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!target.exists());
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        0,
        "temporary file left behind"
    );

    let out = scarf(&[
        "coeffs",
        "--raw",
        "A=2",
        "B=1",
        "--k",
        "0.5",
        "--out",
        "/nonexistent/dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!Path::new("/nonexistent/dir/x.json").exists());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        vec![
            "coeffs".to_string(),
            "--p1".into(),
            "c=1".into(),
            "d=0.5".into(),
            "--k".into(),
            "-1.95:1.95:0.3".into(),
            "--compare".into(),
            "closed,oracle".into(),
            "--steps".into(),
            "20000".into(),
            "--out".into(),
            dir.path().join(name).to_str().unwrap().into(),
        ]
    };
    for name in ["a.json", "b.json"] {
        let a = args(name);
        let out = scarf(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    let p1 = scarf(&["poles", "--p3", "c=sqrt(2)", "q=0.6", "--format", "csv"]);
    let p2 = scarf(&["poles", "--p3", "c=sqrt(2)", "q=0.6", "--format", "csv"]);
    assert_eq!(p1.stdout, p2.stdout);
}

#[test]
fn csv_layout_and_infinite_flags() {
    let out = scarf(&["coeffs", "--p4", "c=2", "d=5", "--k", "1.9:2.1:0.1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "k,T,T_infinite,R_left,R_left_infinite,R_right,R_right_infinite,detS,detS_infinite,T_plus_R_left,T_plus_R_right"
    );
    assert_eq!(lines.len(), 4);
    let pole: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(
        &pole[..9],
        &[
            "2.0000000000000000e0",
            "inf",
            "true",
            "inf",
            "true",
            "inf",
            "true",
            "inf",
            "true"
        ]
    );
    let finite: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(finite[2], "false");
    // |det S| = |k + c| / |k - c| for this family.
    let det: f64 = finite[7].parse().unwrap();
    assert!((det - 39.0).abs() < 1e-9, "{det}");

    let v = json(&["coeffs", "--p4", "c=2", "d=5", "--k", "2"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"][0]["T"], "inf");
    assert_eq!(v["rows"][0]["T_infinite"], true);
}

#[test]
fn hermitian_coefficients_are_unitary() {
    let v = json(&[
        "coeffs",
        "--raw",
        "A=2",
        "B=1",
        "--k",
        "0.1:4:0.1",
        "--compare",
        "oracle",
        "--steps",
        "20000",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 40);
    for r in rows {
        assert!((f(&r["T_plus_R_left"]) - 1.0).abs() < 1e-10, "{r}");
        assert!((f(&r["T_plus_R_right"]) - 1.0).abs() < 1e-10);
        assert!((f(&r["detS"]) - 1.0).abs() < 1e-10);
        assert!((f(&r["T_oracle"]) - f(&r["T"])).abs() < 1e-6 * f(&r["T"]).max(1e-3));
    }
}

#[test]
fn hermitian_potential_has_no_real_roots() {
    let v = json(&["poles", "--raw", "A=2", "B=1", "--region", "-3:3:-0.5:3"]);
    for p in v["poles"].as_array().unwrap() {
        let class = p["class"].as_str().unwrap();
        assert!(class != "SS" && class != "SelfDualSSPair", "{p}");
        assert!(f(&p["k_im"]).abs() > 1e-7 || f(&p["k_re"]).abs() < 1e-7, "{p}");
    }
    let z = json(&["zeros", "--raw", "A=2", "B=1"]);
    assert!(z["zeros"].as_array().unwrap().is_empty());
}

#[test]
fn p3_large_q_poles() {
    let v = json(&[
        "poles",
        "--p3",
        "c=sqrt(2)",
        "q=5",
        "--region",
        "-3:3:-0.5:6",
        "--grid",
        "400x400",
    ]);
    let physical: Vec<&Value> = v["poles"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["class"] != "Unphysical")
        .collect();
    assert_eq!(physical.len(), 11);
    assert_eq!(v["counts"]["CCPEMember"], 10);
    assert_eq!(v["counts"]["UnpairedComplex"], 1);
    let lone = physical.iter().find(|p| p["class"] == "UnpairedComplex").unwrap();
    assert!((f(&lone["k_re"]) - 2f64.sqrt()).abs() < 1e-8);
    assert!((f(&lone["k_im"]) - 5.5).abs() < 1e-8);
}

#[test]
fn p4_poles_and_levels() {
    let v = json(&["poles", "--p4", "c=2", "d=5"]);
    assert_eq!(v["counts"]["BoundState"], 5);
    assert_eq!(v["counts"]["SS"], 1);
    let ss = v["poles"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["class"] == "SS")
        .unwrap();
    assert!((f(&ss["k_re"]) - 2.0).abs() < 1e-9);

    let b = json(&["boundstates", "--p4", "c=2", "d=5"]);
    let levels = b["levels"].as_array().unwrap();
    let energies: Vec<f64> = levels.iter().map(|l| f(&l["energy"])).collect();
    for (e, want) in energies.iter().zip([-20.25, -12.25, -6.25, -2.25, -0.25]) {
        assert!((e - want).abs() < 1e-12, "{energies:?}");
    }
    assert!(levels.iter().all(|l| l["verified"] == true));
}

#[test]
fn contour_grid_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    let main = dir.path().join("poles.json");
    let out = scarf(&[
        "poles",
        "--p1",
        "c=1",
        "d=0.5",
        "--grid",
        "16x16",
        "--contours",
        grid.to_str().unwrap(),
        "--out",
        main.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let g: Value = serde_json::from_slice(&std::fs::read(&grid).unwrap()).unwrap();
    assert_eq!(g["schema"], 1);
    let m: Value = serde_json::from_slice(&std::fs::read(&main).unwrap()).unwrap();
    assert_eq!(m["command"], "poles");
}

#[test]
fn negative_k_reads_the_time_reversed_problem() {
    // The left zero of conj V shows up at negative k.
    let v = json(&["zeros", "--p1", "c=1", "d=0.5", "--compare", "closed"]);
    let zeros = v["zeros"].as_array().unwrap();
    let left = zeros.iter().find(|z| z["side"] == "left").unwrap();
    assert!(f(&left["k_z"]) < 0.0);
    assert!(f(&left["R_left"]) < 1e-10);
    let right = zeros.iter().find(|z| z["side"] == "right").unwrap();
    assert!(f(&right["k_z"]) > 0.0);
    assert!(f(&right["R_right"]) < 1e-10);
}

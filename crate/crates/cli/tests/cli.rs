use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

fn glq(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_glq"))
        .args(args)
        .env("RUST_LOG", "error")
        .current_dir(dir)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.display().to_string()
}

fn vortex2d(d: i64, analysis: Value) -> Value {
    json!({
        "manifold": {"id": "circle-S1"},
        "potential": {"kind": "gl-quartic"},
        "dim": 2,
        "domain": {"lower": [-1, -1], "extent": [2, 2], "counts": [32, 32]},
        "eps_schedule": [0.3, 0.2],
        "bc": {"sigma": {"pattern": "points", "points": [[0, 0]]}, "class": {"kind": "degree", "d": d}},
        "solver": {"max_iterations": 20000, "tolerance": 1e-9, "step_rule": {"rule": "conjugate-gradient"}},
        "seed": 3,
        "analysis": analysis
    })
}

fn full_analysis() -> Value {
    json!({
        "log_fit": {},
        "competitor": {},
        "lower_bound": {"radius": 0.5},
        "perturbation": {"count": 4},
        "monotonicity": {"radii": [0.3, 0.4, 0.5, 0.6]},
        "pohozaev": {"radius": 0.5},
        "stationarity": {"tests": [{"kind": "dilation", "center": [0, 0], "radius": 0.6}]},
        "measure": {"radii": [0.2, 0.3, 0.4]},
        "singular_set": {"radius": 0.5},
        "quantization": {"probes": [[0, 0]]}
    })
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn trivial_class_has_zero_energy_and_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &vortex2d(0, json!({})));
    let (code, err) = glq(&["solve", "--config", &cfg, "--out", "out"], dir.path());
    assert_eq!(code, 0, "{err}");
    let report = read_json(&dir.path().join("out/report.json"));
    let solve = report["sections"]["solve"].as_array().unwrap();
    assert_eq!(solve.len(), 2);
    for r in solve {
        assert_eq!(r["verdicts"]["zero_energy"], true);
    }
    // empty toggles: solve section only
    assert_eq!(report["sections"].as_object().unwrap().len(), 1);
    let summary = fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("[solve]") && !summary.contains("[identities]"));
    assert!(!dir.path().join("out/analysis.json").exists());
}

#[test]
fn full_bundle_reports_six_sections_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &vortex2d(1, full_analysis()));
    let (code, err) = glq(&["solve", "--config", &cfg, "--out", "a", "--threads", "2"], dir.path());
    assert!(code == 0 || code == 1, "{err}");
    let summary = fs::read_to_string(dir.path().join("a/summary.txt")).unwrap();
    for s in ["[solve]", "[monotonicity]", "[identities]", "[measure]", "[singular-set]", "[quantization]"] {
        assert!(summary.contains(s), "missing {s}:\n{summary}");
    }
    for f in ["profiles/monotonicity_run0.csv", "profiles/density_run1.csv", "traces/run0.csv", "fields/run1.bin"] {
        assert!(dir.path().join("a").join(f).is_file(), "{f}");
    }
    let report = fs::read(dir.path().join("a/report.json")).unwrap();
    let analysis = fs::read(dir.path().join("a/analysis.json")).unwrap();

    // identical config and seed, same thread count
    let (code2, _) = glq(&["solve", "--config", &cfg, "--out", "b", "--threads", "2"], dir.path());
    assert_eq!(code, code2);
    assert_eq!(report, fs::read(dir.path().join("b/report.json")).unwrap());

    // analyze from the bundle equals the inline analysis
    let (code3, _) = glq(&["analyze", "--out", "a"], dir.path());
    assert_eq!(code, code3);
    assert_eq!(analysis, fs::read(dir.path().join("a/analysis.json")).unwrap());
    assert_eq!(report, fs::read(dir.path().join("a/report.json")).unwrap());
}

#[test]
fn resolution_and_geometry_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut coarse = vortex2d(1, json!({}));
    coarse["domain"]["counts"] = json!([16, 16]);
    coarse["eps_schedule"] = json!([0.2, 0.1]);
    let cfg = write_config(dir.path(), "c.json", &coarse);
    let (code, err) = glq(&["solve", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(code, 2);
    assert!(err.contains("resolution"), "{err}");

    let big = vortex2d(1, json!({"pohozaev": {"radius": 1.5}}));
    let cfg = write_config(dir.path(), "g.json", &big);
    let (code, err) = glq(&["solve", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(code, 4, "{err}");

    let cfg = write_config(dir.path(), "s.json", &json!({"manifold": {"id": "circle-S1"}, "oops": 1}));
    assert_eq!(glq(&["solve", "--config", &cfg, "--out", "o"], dir.path()).0, 2);
}

#[test]
fn damaged_bundles_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &vortex2d(1, json!({})));
    assert_eq!(glq(&["solve", "--config", &cfg, "--out", "o"], dir.path()).0, 0);
    let bin = dir.path().join("o/fields/run0.bin");
    let bytes = fs::read(&bin).unwrap();
    fs::write(&bin, &bytes[..bytes.len() / 2]).unwrap();
    let (code, err) = glq(&["report", "--out", "o"], dir.path());
    assert_eq!(code, 5);
    assert!(err.contains("size"), "{err}");
    fs::remove_file(&bin).unwrap();
    fs::remove_file(dir.path().join("o/traces/run1.csv")).unwrap();
    let (code, err) = glq(&["report", "--out", "o"], dir.path());
    assert_eq!(code, 5);
    assert!(err.contains("fields/run0.bin") && err.contains("traces/run1.csv"), "{err}");
}

#[test]
fn three_dimensional_run_has_fit_density_and_quantization() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "manifold": {"id": "circle-S1"},
        "potential": {"kind": "gl-quartic"},
        "dim": 3,
        "domain": {"lower": [-1, -1, -1], "extent": [2, 2, 2], "counts": [20, 20, 20]},
        "eps_schedule": [0.4, 0.3],
        "bc": {"sigma": {"pattern": "axis", "axis": 2}, "class": {"kind": "degree", "d": 1}},
        "solver": {"max_iterations": 20000, "tolerance": 1e-8, "step_rule": {"rule": "conjugate-gradient"}},
        "analysis": {
            "log_fit": {},
            "measure": {"radii": [0.3, 0.4]},
            "quantization": {"probes": [[0, 0, 0]], "radius": 0.3}
        }
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let (code, err) = glq(&["solve", "--config", &path, "--out", "o"], dir.path());
    assert!(code == 0 || code == 1, "{err}");
    let report = read_json(&dir.path().join("o/report.json"));
    let names: Vec<&str> = report["sections"]
        .as_object()
        .unwrap()
        .values()
        .flat_map(|v| v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()))
        .collect();
    for n in ["log-fit", "measure/run1", "quantization/run0", "quantization-trend"] {
        assert!(names.contains(&n), "{n} not in {names:?}");
    }
    // slope target is the length of the axis times π
    assert!((report["slope_target"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn homotopy_command_tables_and_norms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.json",
        &json!({"group": "Q8", "emin": {"group_ref": "Q8", "values": [0, 0.1, 1, 1, 1]}}),
    );
    assert_eq!(glq(&["homotopy", "--config", &cfg, "--out", "o"], dir.path()).0, 0);
    let v = read_json(&dir.path().join("o/homotopy.json"));
    assert_eq!(v["classes"].as_array().unwrap().len(), 5);
    assert_eq!(v["norms"]["norms"], json!([0.0, 0.1, 1.0, 1.0, 1.0]));

    let cfg = write_config(dir.path(), "p.json", &json!({"group": "Z2", "manifold": {"id": "projective-RP2-qtensor"}}));
    assert_eq!(glq(&["homotopy", "--config", &cfg, "--out", "p"], dir.path()).0, 0);
    let v = read_json(&dir.path().join("p/homotopy.json"));
    let norm = v["norms"]["norms"][1].as_f64().unwrap();
    assert!((norm - std::f64::consts::FRAC_PI_4).abs() < 1e-2, "{norm}");

    // Z4 with two entries of row 1 altered: still has identity and inverses
    let mut mul: Vec<usize> = (0..16).map(|i| (i / 4 + i % 4) % 4).collect();
    mul[5] = 1;
    mul[6] = 0;
    let cfg = write_config(dir.path(), "bad.json", &json!({"group": {"order": 4, "mul": mul}}));
    let (code, err) = glq(&["homotopy", "--config", &cfg, "--out", "b"], dir.path());
    assert_eq!(code, 1, "{err}");
    let v = read_json(&dir.path().join("b/homotopy.json"));
    assert!(v["sum_properties"]["table_associativity"].is_array(), "{v}");
}

#[test]
fn geodesic_command_relaxes_projective_loop() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        &json!({
            "manifold": {"id": "projective-RP2-qtensor"},
            "class": {"kind": "projective", "nontrivial": true},
            "samples": 128,
            "steps": 50000,
            "noise": 0.02,
            "seed": 5
        }),
    );
    let (code, err) = glq(&["geodesic", "--config", &cfg, "--out", "o", "--seed", "9"], dir.path());
    assert_eq!(code, 0, "{err}");
    let v = read_json(&dir.path().join("o/geodesic.json"));
    assert!((v["energy"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-2, "{v}");
    assert_eq!(v["class_conserved"], true);
    assert!(dir.path().join("o/loop_relaxed.csv").is_file());
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn affsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affsel"))
        .args(args)
        .env_remove("SVF_EPS")
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

// (fixture, validate, check-cond2, solve-affine)
const EXPECTED: &[(&str, i32, i32, i32)] = &[
    ("sadowska", 0, 0, 2),
    ("triangle_sandwich", 0, 0, 0),
    ("halfstrip_fixed", 0, 0, 0),
    ("tetra_convex", 0, 0, 0),
    ("identity_fixed", 0, 0, 0),
    ("infeasible_sandwich", 0, 2, 2),
    ("square_prism", 0, 0, 0),
    ("singleton_violation", 0, 2, 2),
    ("reject_unbounded", 1, 1, 1),
    ("reject_open", 1, 1, 1),
];

#[test]
fn exit_codes_on_every_fixture() {
    for &(name, validate, cond2, affine) in EXPECTED {
        let path = fixture(name);
        for (cmd, want) in [("validate", validate), ("check-cond2", cond2), ("solve-affine", affine)] {
            let out = affsel(&[cmd, &path]);
            assert_eq!(out.status.code(), Some(want), "{cmd} {name}: {}", String::from_utf8_lossy(&out.stdout));
            let r = report(&out);
            assert_eq!(r["command"], cmd);
            assert_eq!(r["instance"], path.as_str());
        }
        let v = affsel(&["verify", name]);
        assert_eq!(v.status.code(), Some(0), "verify {name}: {}", String::from_utf8_lossy(&v.stdout));
    }
}

#[test]
fn reports_are_deterministic() {
    for &(name, ..) in EXPECTED {
        for cmd in ["validate", "check-convex", "check-cond2", "solve-affine"] {
            let a = affsel(&[cmd, &fixture(name)]);
            let b = affsel(&[cmd, &fixture(name)]);
            assert_eq!(a.stdout, b.stdout, "{cmd} {name}");
            assert_eq!(a.status.code(), b.status.code());
        }
    }
}

#[test]
fn sadowska_report() {
    let out = affsel(&["verify", "sadowska"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["uniqueness"]["unique"], true);
    assert_eq!(r["details"]["with_f4"], "infeasible");
    let c: Vec<f64> = serde_json::from_value(r["map"]["c"].clone()).unwrap();
    let d: Vec<f64> = serde_json::from_value(r["map"]["d"].clone()).unwrap();
    for (got, want) in c.iter().chain(&d).zip([-2.0, 1.0, 1.0, -1.0]) {
        assert!((got - want).abs() <= 1e-9);
    }
}

#[test]
fn sandwich_and_singleton_examples() {
    let out = affsel(&["solve-sandwich", &fixture("triangle_sandwich")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "found");
    assert_eq!(r["details"]["alpha"], 0.0);
    assert_eq!(r["details"]["beta"], 1.0);

    let out = affsel(&["check-cond2", &fixture("singleton_violation"), "--combos"]);
    assert_eq!(out.status.code(), Some(2));
    let w = &report(&out)["witness"];
    assert_eq!((w["x"].as_f64(), w["y"].as_f64(), w["t"].as_f64()), (Some(0.0), Some(2.0), Some(0.5)));

    let out = affsel(&["solve-sandwich", &fixture("infeasible_sandwich")]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "infeasible");
    assert_eq!(r["witness"]["failure"], "first inequality");
    assert_eq!(r["certificate"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_one() {
    for args in [&["frobnicate"][..], &["validate", "sadowska", "--bogus"], &["check-cond2"]] {
        let out = affsel(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
    let out = affsel(&["validate", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "invalid");
    assert_eq!(affsel(&["--help"]).status.code(), Some(0));

    let r = report(&affsel(&["validate", &fixture("reject_open")]));
    let vs: Vec<String> = serde_json::from_value(r["violations"].clone()).unwrap();
    assert!(vs.contains(&"domain: domain must be a compact interval".to_string()), "{vs:?}");
    assert!(vs.contains(&"fiber_bounds: fibers must be compact".to_string()), "{vs:?}");
}

#[test]
fn eps_from_environment_and_flag() {
    let env = Command::new(env!("CARGO_BIN_EXE_affsel"))
        .args(["validate", "sadowska"])
        .env("SVF_EPS", "1e-6")
        .output()
        .unwrap();
    assert_eq!(report(&env)["tolerances"]["eps"], 1e-6);
    let both = Command::new(env!("CARGO_BIN_EXE_affsel"))
        .args(["validate", "sadowska", "--eps", "1e-8"])
        .env("SVF_EPS", "1e-6")
        .output()
        .unwrap();
    assert_eq!(report(&both)["tolerances"]["eps"], 1e-8);
    assert_eq!(affsel(&["validate", "sadowska", "--eps", "-1"]).status.code(), Some(1));
}

#[test]
fn out_file_and_timings() {
    let dir = std::env::temp_dir().join(format!("affsel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = affsel(&["check-cond2", "sadowska", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    assert!(report(&out).get("duration_ms").is_none());
    let timed = affsel(&["check-cond2", "sadowska", "--timings"]);
    assert!(report(&timed)["duration_ms"].as_f64().is_some());
    std::fs::remove_dir_all(&dir).unwrap();
}

fn csv_rows(bytes: &[u8]) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn plot_data() {
    let out = affsel(&["emit-plot", &fixture("triangle_sandwich")]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(header, ["x", "lower", "upper", "h"]);
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert!(r[1] <= r[3] && r[3] <= r[2], "{r:?}");
    }

    let out = affsel(&["emit-plot", &fixture("halfstrip_fixed")]);
    let (_, rows) = csv_rows(&out.stdout);
    for r in &rows {
        assert!((r[3] - (0.5 * r[0] + 0.25)).abs() <= 1e-12, "{r:?}");
    }

    let dir = std::env::temp_dir().join(format!("affsel-plot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (csv_path, svg_path) = (dir.join("p.csv"), dir.join("p.svg"));
    let out = affsel(&[
        "emit-plot",
        &fixture("triangle_sandwich"),
        "--no-map",
        "--out",
        csv_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["command"], "emit-plot");
    let (header, rows) = csv_rows(&std::fs::read(&csv_path).unwrap());
    assert_eq!(header, ["x", "lower", "upper"]);
    assert_eq!(rows.len(), 101);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 2);
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(affsel(&["emit-plot", "sadowska"]).status.code(), Some(1));
}

#[test]
fn fixed_point_and_transversal_commands() {
    let r = report(&affsel(&["fixed-point", &fixture("halfstrip_fixed")]));
    assert_eq!(r["details"]["x_star"], 0.5);
    let out = affsel(&["transversal", "sadowska", "--at", "0,1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["uniqueness"]["unique"], true);
    assert_eq!(affsel(&["transversal", "sadowska", "--at", "0,1,2,3,4"]).status.code(), Some(2));
    assert_eq!(affsel(&["transversal", "sadowska", "--at", "0.5"]).status.code(), Some(1));
    assert_eq!(affsel(&["transversal", "triangle_sandwich"]).status.code(), Some(1));
}

#[test]
fn corpora_pass_for_several_seeds() {
    for seed in ["0", "1", "99"] {
        for corpus in ["sandwich-corpus", "convex-corpus"] {
            let out = affsel(&["verify", corpus, "--seed", seed]);
            assert_eq!(out.status.code(), Some(0), "{corpus} seed {seed}: {}", String::from_utf8_lossy(&out.stdout));
        }
    }
}

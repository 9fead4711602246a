use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qrpat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrpat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plot_tiny_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.pgm");
    let o = qrpat(&["plot", "--modulus", "4", "--width", "16", "--height", "16", "--half", "false", "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(&out).unwrap();
    assert!(bytes.starts_with(b"P5\n16 16\n255\n"));
    let black = bytes[13..].iter().filter(|&&b| b == 0).count();
    assert_eq!(black, 4);
}

#[test]
fn plot_missing_modulus() {
    assert_eq!(qrpat(&["plot", "--out", "x.pgm"]).status.code(), Some(2));
}

#[test]
fn plot_unwritable_path_is_io_error() {
    let o = qrpat(&["plot", "--modulus", "101", "--out", "/nonexistent-dir/p.pgm"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn grid_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.pgm");
    let o = qrpat(&["grid", "--modulus", "2", "--size", "2", "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), b"P5\n2 2\n255\n\x00\xff\xff\x00");
    let o = qrpat(&["grid", "--modulus", "2", "--size", "1", "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn predict_one_third() {
    let o = qrpat(&["predict", "--modulus", "20171", "--fraction", "1/3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["r0"], 8965);
    assert_eq!(v["beta"], 4);
    assert_eq!(v["alpha"], -1);
    assert_eq!(v["x0"], 6724);
    assert_eq!(v["fraction"]["b"], 3);
    let mut multiples: Vec<i64> = v["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|vx| {
            assert_eq!(vx["y_den"], 9);
            assert_eq!(vx["x"], "20171/3");
            vx["y_num"].as_i64().unwrap() / 20171
        })
        .collect();
    multiples.sort_unstable();
    assert_eq!(multiples, [1, 4, 7]);
    let coeffs = v["coefficients"].as_array().unwrap();
    let zero = coeffs.iter().find(|c| c["i"] == 0).unwrap();
    assert_eq!((zero["A"].as_i64(), zero["B"].as_i64(), zero["C"].as_i64()), (Some(9), Some(2), Some(8965)));
}

#[test]
fn predict_one_quarter_of_415() {
    let v = json(&qrpat(&["predict", "--modulus", "415", "--fraction", "1/4", "--json"]));
    assert_eq!(v["beta"], 1);
    assert_eq!(v["r0"], 26);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 2);
}

#[test]
fn predict_guard_and_batch() {
    assert_eq!(qrpat(&["predict", "--modulus", "10", "--fraction", "1/7"]).status.code(), Some(2));
    let o = qrpat(&["predict", "--modulus", "1000", "--max-denominator", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 11);
    let text = qrpat(&["predict", "--modulus", "20171", "--fraction", "1/3"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("r0=8965"));
}

#[test]
fn verify_passes() {
    let o = qrpat(&["verify", "--modulus", "20171", "--max-denominator", "9", "--window", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["ok"], true);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);

    let o = qrpat(&["verify", "--modulus", "101", "--max-denominator", "9"]);
    assert_eq!(o.status.code(), Some(0));

    let o = qrpat(&["verify", "--modulus", "101", "--max-denominator", "9", "--checks", "prop1,coverage"]);
    let names: Vec<_> = json(&o)["checks"].as_array().unwrap().iter().map(|c| c["name"].clone()).collect();
    assert_eq!(names, ["prop1", "coverage"]);
}

#[test]
fn verify_guard() {
    assert_eq!(qrpat(&["verify", "--modulus", "81", "--max-denominator", "9"]).status.code(), Some(2));
}

#[test]
fn equiv_verdicts() {
    let v = json(&qrpat(&["equiv", "--m1", "20179", "--m2", "25219"]));
    assert_eq!(v["equivalent"], true);
    assert_eq!(v["lambda"], 5040);
    assert!(v["witness"].is_null());

    let o = qrpat(&["equiv", "--m1", "20179", "--m2", "20180"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["equivalent"], false);
    assert_eq!(v["witness"]["b"], 2);

    assert_eq!(qrpat(&["equiv", "--m1", "20179", "--m2", "25219", "--lambda-n", "1"]).status.code(), Some(2));
}

#[test]
fn bundle_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fig3a.svg");
    let o = qrpat(&["bundle", "--modulus", "20179", "--out", arg(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["s"], 19);
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.contains("<polyline") && doc.contains("<circle"));

    let v = json(&qrpat(&["bundle", "--modulus", "25200"]));
    assert_eq!(v["s"], 0);

    let o = qrpat(&["bundle", "--modulus", "20179", "--max-denominator", "11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: denominator 11"));
    assert_eq!(json(&o)["skipped"], serde_json::json!([11]));
}

#[test]
fn thread_cap_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_qrpat"))
        .args(["verify", "--modulus", "1009", "--max-denominator", "5"])
        .env("QRPAT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_qrpat"))
        .args(["verify", "--modulus", "1009", "--max-denominator", "5"])
        .env("QRPAT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

use std::process::{Command, Output};

use serde_json::Value;

fn hdx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdx")).args(args).output().expect("hdx runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("one JSON document on stdout")
}

#[test]
fn free_plane_spectrum_over_z4() {
    let out = hdx(&["pfr", "spectrum", "--ring", "zmod:2^2"]);
    assert!(out.status.success());
    let r = json(&out);
    let mut values: Vec<f64> = r["results"]["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value_float"].as_f64().unwrap())
        .collect();
    values.sort_by(f64::total_cmp);
    let expected = [-6.0, -8f64.sqrt(), -2.0, 2.0, 8f64.sqrt(), 6.0];
    assert_eq!(values.len(), expected.len());
    for (a, b) in values.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(r["command"], "pfr spectrum --ring zmod:2^2");
}

#[test]
fn composite_padic_ring_is_rejected() {
    let out = hdx(&["pfr", "spectrum", "--ring", "zmod:4^1"]);
    assert!(!out.status.success());
    assert!(json(&out)["error"].as_str().unwrap().contains("not a prime"));
}

#[test]
fn unknown_flag_is_rejected() {
    assert!(!hdx(&["pfr", "spectrum", "--ring", "zmod:2^1", "--frobnicate"]).status.success());
}

#[test]
fn randomized_commands_need_a_seed() {
    let out = hdx(&["walk", "gvr", "-p", "2", "-r", "1", "--radius", "3"]);
    assert!(!out.status.success());
    let out = hdx(&["verify-all", "--quick", "--only", "9"]);
    assert!(!out.status.success());
}

#[test]
fn generators_for_p5() {
    let r = json(&hdx(&["cayley", "gen", "-p", "5"]));
    assert_eq!(r["results"]["count"], 31);
    let first = &r["results"]["generators"][0];
    assert_eq!(first.as_array().unwrap().len(), 9);
}

#[test]
fn ball_census_and_paths() {
    let out = hdx(&["ball", "census", "-p", "2", "-r", "2"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["results"]["vertices"], 1 + 14 + 98);
    let out = hdx(&["ball", "paths", "--laurent", "2", "-r", "2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"]["disagreements"], 0);
}

#[test]
fn sphere_export_is_csv() {
    let dir = std::env::temp_dir().join(format!("hdx-cli-sphere-{}", std::process::id()));
    let out = hdx(&["sphere", "-p", "2", "-r", "3", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["results"]["half_sphere_cut"]["exact_match"], true);
    let csv = std::fs::read_to_string(dir.join("sphere-3.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("u,v"));
    let edges = csv.lines().count() - 1;
    assert!(edges > 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn isomorphism_of_r1_pair() {
    let out = hdx(&["pfr", "iso", "--ring", "zmod:2^1", "--other", "ff:2^1"]);
    assert_eq!(json(&out)["results"]["verdict"]["verdict"], "isomorphic");
}

#[test]
fn seeded_verify_is_repeatable() {
    let a = json(&hdx(&["verify-all", "--quick", "--only", "9,10", "--seed", "7"]));
    let b = json(&hdx(&["verify-all", "--quick", "--only", "9,10", "--seed", "7", "--threads", "1"]));
    assert_eq!(a["results"]["passed"], true);
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn pretty_table_for_verify() {
    let out = hdx(&["verify-all", "--quick", "--only", "9", "--seed", "1", "--pretty"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Hall-Littlewood"));
}

//! The `swsc` binary: outputs, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn swsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swsc")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).display().to_string()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("swsc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses `quantity,bits` rows of `mi` output.
fn mi_value(text: &str, key: &str) -> f64 {
    text.lines().find_map(|l| l.strip_prefix(&format!("{key},"))).unwrap().parse().unwrap()
}

#[test]
fn snd_corners_match_mi() {
    let ch = config("symmetric_8db.json");
    let mi = stdout(&swsc(&["mi", "--channel", &ch]));
    let out = swsc(&["region", "--channel", &ch, "--scheme", "snd"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    assert!(csv.starts_with("R1_bits,R2_bits,source_label\n"));
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    // At R1 = 0 the SND boundary is I(W;Y2|X); at the far end R1 = I(X;Y1|W).
    assert!((rows[0].1 - mi_value(&mi, "I(W;Y2|X)")).abs() < 1e-9);
    let r1_max = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    assert!((r1_max - mi_value(&mi, "I(X;Y1|W)")).abs() < 1e-9);
}

#[test]
fn ian_without_interference_is_a_rectangle() {
    let out = swsc(&["region", "--channel", &config("zero_interference.json"), "--scheme", "ian"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let r2: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    // Constant height up to the R1 edge.
    assert!(r2[..r2.len() - 1].iter().all(|v| (v - r2[0]).abs() < 1e-12));
}

#[test]
fn missing_config_exits_two_naming_the_path() {
    let out = swsc(&["region", "--channel", "/nonexistent/ch.json", "--scheme", "ian"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/ch.json"));
}

#[test]
fn infeasible_order_exits_three() {
    let out = swsc(&[
        "region", "--channel", &config("corpus/discrete_0.json"), "--scheme", "swsc", "--split", "2-1", "--order",
        "d1=m1@0>m2@0;d2=m1@-1>m2@-1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_scheme_and_suite_exit_two() {
    assert_eq!(swsc(&["region", "--channel", &config("symmetric_8db.json"), "--scheme", "nope"]).status.code(), Some(2));
    assert_eq!(swsc(&["verify", "lemma9"]).status.code(), Some(2));
}

#[test]
fn region_json_has_constraints() {
    let path = tmp("sd.json");
    let out = swsc(&[
        "region", "--channel", &config("corpus/discrete_1.json"), "--scheme", "sd", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let c = &v["conjunctions"][0]["constraints"];
    assert!(c.as_array().unwrap().iter().all(|h| h["coeffs"].is_array() && h["rhs"].is_number()));
}

#[test]
fn two_one_schedule_rows() {
    let out = swsc(&["schedule", "--split", "2-1", "--blocks", "4"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[1], "X1\t1\tm1(1)\tm1(2)\tm1(3)");
    assert_eq!(rows[2], "X2\tm1(1)\tm1(2)\tm1(3)\t1");
    assert_eq!(rows[3], "W\tm2(1)\tm2(2)\tm2(3)\tm2(4)");
}

#[test]
fn verify_suites_pass() {
    for s in ["lemma1", "eq5", "fm"] {
        let out = swsc(&["verify", s]);
        assert!(out.status.success(), "{s}: {}", stdout(&out));
        assert!(stdout(&out).contains("max residual"));
    }
}

#[test]
fn curve_ratio_increases() {
    let out = swsc(&["curve", "--inr", "6,8,10"]);
    assert!(out.status.success());
    let ratios: Vec<f64> =
        stdout(&out).lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn seeded_simulations_write_identical_files() {
    let run = |name: &str, jobs: &str| {
        let p = tmp(name);
        let out = swsc(&[
            "--jobs", jobs, "simulate", "--seed", "7", "--set", "trials=4", "--set", "n=256", "--set", "b=5",
            "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(&p).unwrap(), std::fs::read(p.with_extension("json")).unwrap())
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "3");
    assert_eq!(a, b);
    let csv = String::from_utf8(a.0).unwrap();
    assert!(csv.starts_with("inr_db,rate_bits,bler_stream1,bler_stream2,scheme\n"));
    assert!(!csv.contains('\r'));
}

#[test]
fn bad_override_exits_two() {
    assert_eq!(swsc(&["simulate", "--set", "n=-5"]).status.code(), Some(2));
    assert_eq!(swsc(&["simulate", "--set", "bogus=1"]).status.code(), Some(2));
}

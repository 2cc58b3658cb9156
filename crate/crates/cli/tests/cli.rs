use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freewick"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (value, out.status.code().unwrap())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn moments_exact_and_mc() {
    let (v, code) = json(&[
        "moments", "--word", "X1^4", "--N", "64", "--mc", "500", "--seed", "7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["exact_rational"], "8193/4096");
    assert!((f(&v["exact"]) - (2.0 + 1.0 / 4096.0)).abs() < 1e-15);
    assert!((f(&v["mc_mean"]) - f(&v["exact"])).abs() < 5.0 * f(&v["mc_stderr"]));

    let (v, _) = json(&["moments", "--word", "X1^2", "--N", "10"]);
    assert_eq!(f(&v["exact"]), 1.0);
    assert_eq!(f(&v["free_trace"]), 1.0);

    let (v, _) = json(&["moments", "--word", "X1X2X1X2"]);
    assert_eq!(f(&v["free_trace"]), 0.0);
    assert_eq!(v["coefficients"], serde_json::json!([0.0, 1.0, 0.0]));
}

#[test]
fn configs_counts() {
    let (v, code) = json(&["configs", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 8);
    assert_eq!(v["max_cK"], 6);
    assert_eq!(json(&["configs", "--n", "2"]).0["count"], 2);
    let (v, _) = json(&["configs", "--n", "5", "--check-remark"]);
    assert_eq!(v["remark_cK"], 14);
    assert_eq!(v["remark_attains"], true);
}

#[test]
fn wick_examples() {
    let (v, code) = json(&[
        "wick-verify",
        "--words",
        "X1,X1",
        "--kappa",
        "[[1,0.5],[0.5,1]]",
    ]);
    assert_eq!(code, 0);
    assert!((f(&v["lhs"]) - 0.5).abs() < 1e-12 && (f(&v["rhs"]) - 0.5).abs() < 1e-12);

    let (v, _) = json(&[
        "wick-verify",
        "--words",
        "X1X1,X1X1",
        "--kappa",
        "[[1,c],[c,1]]",
        "--c",
        "0.3",
    ]);
    assert!((f(&v["lhs"]) - 1.09).abs() < 1e-12);
    assert!((f(&v["rhs"]) - 1.09).abs() < 1e-10);
    assert!(!v["terms"].as_array().unwrap().is_empty());

    let (v, code) = json(&[
        "wick-verify",
        "--random",
        "--n",
        "3",
        "--maxdeg",
        "3",
        "--trials",
        "20",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn masterineq_example() {
    let (v, code) = json(&["masterineq", "--polys", "X1*X2,X2", "--sigma", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert!(f(&v["lhs"]) <= f(&v["rhs"]));
}

#[test]
fn mc_and_strongconv_tables() {
    let (v, code) = json(&[
        "mc",
        "--poly",
        "X1",
        "--N",
        "32,64",
        "--k",
        "4",
        "--samples",
        "300",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["N"], 64);
    assert!((f(&rows[1]["mc_mean"]) - 14f64.powf(0.125)).abs() < 0.01);

    let (v, code) = json(&[
        "strongconv",
        "--poly",
        "X1 + Y1",
        "--Y",
        "diag(1,-1)",
        "--N",
        "16,32",
        "--samples",
        "20",
    ]);
    assert_eq!(code, 0);
    assert!((f(&v["free_norm"]) - 3.0).abs() < 1e-3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn repeat_runs_are_byte_identical() {
    let args = [
        "--format",
        "json",
        "mc",
        "--poly",
        "X1*X2 + X2",
        "--N",
        "16",
        "--k",
        "2",
        "--samples",
        "200",
        "--seed",
        "5",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let one = Command::new(env!("CARGO_BIN_EXE_freewick"))
        .args(args)
        .env("FREEWICK_THREADS", "1")
        .output()
        .unwrap();
    let three = Command::new(env!("CARGO_BIN_EXE_freewick"))
        .args(args)
        .env("FREEWICK_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(a.stdout, one.stdout);
}

#[test]
fn output_formats() {
    let csv = String::from_utf8(
        run(&[
            "--format",
            "csv",
            "mc",
            "--poly",
            "X1",
            "--N",
            "8,16",
            "--samples",
            "50",
        ])
        .stdout,
    )
    .unwrap();
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(lines[0].contains("mc_mean"));
    assert_eq!(lines.len(), 3);
    let table = String::from_utf8(run(&["configs", "--n", "3"]).stdout).unwrap();
    assert!(table.contains("count") && table.contains('8'));
}

#[test]
fn exit_codes() {
    let out = run(&["moments", "--word", "X1 +* X2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["configs", "--n", "9"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let (v, code) = json(&["wick-verify", "--words", "X1,X1", "--tol=-1"]);
    assert_eq!(code, 1);
    assert_eq!(v["pass"], false);
}

use std::process::{Command, Output};

use serde_json::Value;

fn floatfloat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floatfloat"))
        .args(args)
        .env_remove("FLOATFLOAT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn accuracy_json_record() {
    let o = floatfloat(&[
        "accuracy",
        "--op",
        "mul22",
        "--samples",
        "20000",
        "--seed",
        "42",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["op"], "mul22");
    assert_eq!(v["seed"], 42);
    assert_eq!(v["samples"], 20000);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["bound_bits"], -44.0);
    assert!(v["max_error_bits"].as_f64().unwrap() <= -44.0);
    assert_eq!(v["worst_case"].as_array().unwrap().len(), 4);
    assert!(v["worst_case"][0]["decimal"].is_string());
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &[
            "accuracy",
            "--op",
            "add22",
            "--samples",
            "5000",
            "--seed",
            "7",
            "--json",
        ][..],
        &[
            "probe",
            "--format",
            "p=24,round=rz,guard=inf",
            "--samples",
            "5000",
            "--seed",
            "7",
            "--csv",
        ][..],
    ] {
        let a = floatfloat(args);
        let b = floatfloat(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn seed_from_environment() {
    let by_flag = floatfloat(&[
        "accuracy",
        "--op",
        "add12",
        "--samples",
        "100",
        "--seed",
        "0x2a",
        "--json",
    ]);
    let by_env = Command::new(env!("CARGO_BIN_EXE_floatfloat"))
        .args(["accuracy", "--op", "add12", "--samples", "100", "--json"])
        .env("FLOATFLOAT_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(by_flag.stdout, by_env.stdout);
    assert_eq!(json(&by_env)["seed"], 42);
}

#[test]
fn probe_prints_a_table() {
    let o = floatfloat(&[
        "probe",
        "--backend",
        "sim",
        "--format",
        "p=24,round=rz,guard=inf",
        "--samples",
        "4000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for label in ["Addition", "Subtraction", "Multiplication", "Division"] {
        assert!(text.contains(label), "{text}");
    }
    assert!(text.contains("round=rz"));
}

#[test]
fn selftest_exit_codes() {
    let ok = floatfloat(&["selftest", "--samples", "3000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).ends_with("PASS\n"));
    let bad = floatfloat(&[
        "selftest",
        "--format",
        "guard=0",
        "--samples",
        "3000",
        "--json",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let v = json(&bad);
    assert_eq!(v["passed"], false);
    let sterbenz = &v["checks"][0];
    assert_eq!(sterbenz["name"], "sterbenz");
    assert!(sterbenz["violations"].as_u64().unwrap() > 0);
    assert_eq!(sterbenz["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn accuracy_violation_exits_one() {
    let o = floatfloat(&[
        "accuracy",
        "--op",
        "add12",
        "--format",
        "guard=0",
        "--samples",
        "4000",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_single_size_is_its_own_baseline() {
    let o = floatfloat(&["bench", "--sizes", "4096", "--reps", "3", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0], "size,op,median_ns,ratio");
    assert!(rows[1].starts_with("4096,add,") && rows[1].ends_with(",1.0000"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["accuracy", "--op", "div22"][..],
        &["accuracy"][..],
        &["probe", "--format", "p=99"][..],
        &["probe", "--seed", "banana"][..],
        &["bench", "--backend", "sim"][..],
        &["bench", "--sizes", "8192,4096"][..],
        &["bench", "--reps", "1"][..],
        &["probe", "--json", "--csv"][..],
        &["probe", "--samples", "0"][..],
    ] {
        let o = floatfloat(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn out_writes_a_file() {
    let path = std::env::temp_dir().join(format!("floatfloat-cli-{}.json", std::process::id()));
    let o = floatfloat(&[
        "accuracy",
        "--op",
        "split",
        "--samples",
        "500",
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["op"], "split");
    std::fs::remove_file(path).unwrap();
}

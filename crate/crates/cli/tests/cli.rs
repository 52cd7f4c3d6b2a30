use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-ds")).args(args).env_remove("PADIC_DS_CAP").output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[test]
fn theorem2_quarter_table() {
    let csv = stdout(&["construct", "--p", "2", "--rule", "theorem2", "--x", "1/4", "--cap", "200"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,psi_num,psi_den,rule_part"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let ns: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(&ns[..3], &[5, 13, 29]);
    // Exactly the primes q = 5 mod 8 below the cap, with psi(q) = q/8.
    let expected: Vec<u64> = (1..=200).filter(|&q| is_prime(q) && q % 8 == 5).collect();
    assert_eq!(ns, expected);
    for r in &rows {
        assert_eq!((r[1], r[2]), (r[0], "8"));
    }
    assert!(!csv.contains('\r'));
}

#[test]
fn theorem1_table() {
    let csv = stdout(&["construct", "--p", "2", "--rule", "theorem1", "--digits", "10", "--cap", "50"]);
    let ns: Vec<u64> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    let odd_primes: Vec<u64> = (3..=50).filter(|&q| is_prime(q)).collect();
    assert_eq!(ns, odd_primes);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",2,shell k=0")));
}

#[test]
fn zero_rule_has_empty_support() {
    let csv = stdout(&["construct", "--p", "5", "--rule", "zero"]);
    assert_eq!(csv, "n,psi_num,psi_den,rule_part\n");
    let rows = json(&["construct", "--p", "5", "--rule", "zero", "--format", "json"]);
    assert_eq!(rows, Value::Array(vec![]));
}

#[test]
fn measure_examples() {
    let m = json(&["measure", "--p", "2", "--family", "fa", "--rule", "theorem2", "--x", "1/4", "--range", "1:200"]);
    assert_eq!(m["measure"], "1/4");
    let m =
        json(&["measure", "--p", "3", "--family", "c", "--rule", "theorem1", "--digits", "101", "--range", "1:500"]);
    assert_eq!(m["measure"], "20/27");
    assert_eq!(m["shells"][0]["measure"], "2/3");
    assert_eq!(m["shells"][1]["measure"], "0/1");
    assert_eq!(m["shells"][2]["measure"], "2/27");
    let m = json(&["measure", "--family", "c", "--rule", "zero"]);
    assert_eq!(m["measure"], "0/1");
    assert_eq!(m["stages"], 0);
}

#[test]
fn measure_real_line() {
    let m =
        json(&["measure", "--p", "inf", "--family", "fa", "--rule", "real-prime", "--x", "1/2", "--range", "10:60"]);
    // x + 1/q0 with q0 = 11.
    assert_eq!(m["measure"], "13/22");
    assert!(m.get("shells").is_none());
}

#[test]
fn measure_classes_and_approx() {
    let m = json(&[
        "measure",
        "--p",
        "2",
        "--family",
        "fa",
        "--rule",
        "theorem2",
        "--x",
        "1/4",
        "--range",
        "1:200",
        "--classes",
        "--approx",
    ]);
    assert_eq!(m["approx"]["measure"], "0.250000000000");
    assert!(m["classes"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn parallel_does_not_change_output() {
    let base = ["measure", "--p", "3", "--family", "c", "--rule", "theorem1", "--digits", "011", "--range", "1:400"];
    let one = stdout(&[&base[..], &["--parallel", "1"]].concat());
    for threads in ["2", "3", "8"] {
        assert_eq!(stdout(&[&base[..], &["--parallel", threads]].concat()), one);
    }
}

#[test]
fn outputs_are_reproducible() {
    let args = ["construct", "--p", "13", "--rule", "theorem2", "--x", "4/13", "--cap", "400"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["verify", "--check", "iota", "--seed", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn verify_single_lemma() {
    let v = json(&["verify", "--check", "lemma-haynes", "--p", "3", "--n", "5", "--psi", "21/5"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["name"], "lemma-haynes");
}

#[test]
fn verify_moebius_count() {
    let v = json(&["verify", "--check", "moebius-count", "--max-n", "500"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_all() {
    let v = json(&["verify", "--check", "all", "--parallel", "4"]);
    assert_eq!(v["passed"], true, "{v:#}");
    let names: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    // The tau check reports under two names; group by check.
    let group = |n: &str| if n.starts_with("tau") { "tau".to_string() } else { n.to_string() };
    let mut sorted = names.clone();
    sorted.sort_by_key(|n| group(n));
    assert_eq!(names, sorted);
}

#[test]
fn spectrum_queries() {
    let s = json(&["spectrum", "--p", "3", "--x", "20/27"]);
    assert_eq!(s["member"], true);
    let s = json(&["spectrum", "--p", "3", "--digits", "101"]);
    assert_eq!(s["value"], "20/27");
}

#[test]
fn exit_codes() {
    // Precondition failure of the lemma is an error, not a verdict.
    assert_eq!(
        run(&["verify", "--check", "lemma-haynes", "--p", "3", "--n", "5", "--psi", "1/5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["measure", "--range", "5:1"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "--p", "4"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "--p", "3", "--rule", "theorem1"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "--p", "3", "--rule", "theorem1", "--digits", "12"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--check", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "--p", "3"]).status.code(), Some(0));
}

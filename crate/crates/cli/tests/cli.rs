use std::path::Path;
use std::process::{Command, Output};

fn asymq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymq")).args(args).env_remove("ASYMQ_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn example(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{name}.json")).to_string_lossy().into_owned();
    let mut args = vec!["example", name, "--out", &path];
    args.extend_from_slice(extra);
    let o = asymq(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn analyze_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let bell = example(dir.path(), "bell", &[]);
    let o = asymq(&["analyze", &bell, "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["format"], "asymq-report/1");
    assert_eq!(v["kind"], "analyze");
    assert!((v["g_upper"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["bracket"]["s_lower"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["verdict"], "lu_swapable");
}

#[test]
fn analyze_mix01_bell_reports_positive_g() {
    let dir = tempfile::tempdir().unwrap();
    let s = example(dir.path(), "mix01-bell", &["--p", "0.5"]);
    let o = asymq(&["analyze", &s, "--json", "--restarts", "4"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["g_upper"].as_f64().unwrap() > 0.4);
    assert!(v["wootters"]["concurrence"].as_f64().unwrap() > 0.0);
    assert!(v["lu"]["status"].is_string());
}

#[test]
fn malformed_and_invalid_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("t.json");
    std::fs::write(&truncated, "{\"format\": \"asymq-state/1\", \"dA\": 2").unwrap();
    assert_eq!(code(&asymq(&["analyze", truncated.to_str().unwrap()])), 2);
    assert_eq!(code(&asymq(&["swapcheck", dir.path().join("missing.json").to_str().unwrap()])), 2);

    // trace 2: a state invariant failure
    let bad = dir.path().join("b.json");
    let entries: Vec<String> =
        (0..16).map(|i| if i == 0 || i == 5 { "[1,0]".to_string() } else { "[0,0]".to_string() }).collect();
    let text = format!(r#"{{"format":"asymq-state/1","dA":2,"dB":2,"kind":"mixed","data":[{}]}}"#, entries.join(","));
    std::fs::write(&bad, text).unwrap();
    let o = asymq(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invariant"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&asymq(&["verify", "lemma2"])), 0);
    assert_eq!(code(&asymq(&["verify", "lemma7"])), 2);
    let o = asymq(&["verify", "lemma1", "--samples", "0", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["kind"], "campaign");
    assert_eq!(code(&asymq(&["verify", "lemma1", "--dim", "5"])), 2);
}

#[test]
fn example_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = example(dir.path(), "mix01-bell", &["--p", "0.5"]);
    let again = asymq(&["example", "mix01-bell", "--p", "0.5", "--json"]);
    assert_eq!(std::fs::read(&s).unwrap(), again.stdout);
    let o = asymq(&["swapcheck", &s]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&asymq(&["example", "ghz"])), 2);
    assert_eq!(code(&asymq(&["example", "mix01-bell", "--p", "1.5"])), 2);
    let bell = example(dir.path(), "bell", &[]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(bell).unwrap()).unwrap();
    assert_eq!(v["kind"], "pure");
}

#[test]
fn swapcheck_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let m = example(dir.path(), "mix-2x4", &[]);
    let o = asymq(&["swapcheck", &m, "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"], "Theorem 1 inapplicable / LOCC-swapable");

    let p = example(dir.path(), "product", &[]);
    let o = asymq(&["swapcheck", &p, "--json", "--ansatz", "pum:2"]);
    assert_eq!(json(&o)["lu"]["status"], "lu_swapable");
    assert!(json(&o)["asymmetry"]["value"].as_f64().unwrap() < 1e-9);

    let s = example(dir.path(), "mix01-bell", &[]);
    let v = json(&asymq(&["swapcheck", &s, "--json", "--restarts", "4"]));
    assert!(v["residual"].is_number());
    assert_eq!(code(&asymq(&["swapcheck", &s, "--ansatz", "two_way"])), 2);
}

#[test]
fn identical_seeds_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let s = example(dir.path(), "mix01-bell", &["--p", "0.3"]);
    let run = |seed: &str| asymq(&["analyze", &s, "--json", "--seed", seed, "--restarts", "2"]).stdout;
    assert_eq!(run("7"), run("7"));
    let campaign = |extra: &[&str]| {
        let mut args = vec!["verify", "theorem2", "--samples", "6", "--json"];
        args.extend_from_slice(extra);
        asymq(&args).stdout
    };
    assert_eq!(campaign(&["--seed", "3"]), campaign(&["--seed", "3", "--threads", "1"]));
    let env = Command::new(env!("CARGO_BIN_EXE_asymq"))
        .args(["verify", "lemma1", "--samples", "5", "--json"])
        .env("ASYMQ_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 11);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = asymq(&["verify", "lemma2", "--samples", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["samples"], 10);
}

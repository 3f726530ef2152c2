use std::process::{Command, Output};

use serde_json::Value;

fn feynkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_feynkit")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = feynkit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

/// Rebuilds a command line from a report's echoed inputs.
fn argv_from_inputs(v: &Value) -> Vec<String> {
    let mut argv = vec![v["subcommand"].as_str().unwrap().to_string()];
    for (key, val) in v["inputs"].as_object().unwrap() {
        let flag = format!("--{}", key.replace('_', "-"));
        match val {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => argv.push(flag),
            Value::Array(items) => {
                if !items.is_empty() {
                    argv.push(flag);
                    argv.push(items.iter().map(|x| x.to_string().trim_matches('"').to_string()).collect::<Vec<_>>().join(","));
                }
            }
            Value::String(s) => {
                argv.push(flag);
                argv.push(s.clone());
            }
            other => {
                argv.push(flag);
                argv.push(other.to_string());
            }
        }
    }
    argv
}

const MATRIX: &str = r#"{"dim": 2, "entries": [[2, 1], [1, 3]]}"#;

#[test]
fn wick_prints_exact_rational() {
    let r = report(&["wick", "--matrix", MATRIX, "--indices", "1,1,2,2"]);
    assert_eq!(r["subcommand"], "wick");
    assert_eq!(r["result"]["value"], "8/25");
    assert_eq!(r["result"]["recursion_agrees"], true);
}

#[test]
fn reports_replay_from_echoed_inputs() {
    let runs: [&[&str]; 4] = [
        &["lk", "--link", "hopf", "--samples", "20000", "--seed", "3", "--deterministic"],
        &["slk", "--link", "circle-twist:1", "--samples", "20000", "--deterministic"],
        &["wick", "--matrix", MATRIX, "--indices", "1,2", "--samples", "5000", "--seed", "9"],
        &["jacobi", "--degree", "2", "--circles", "1", "--one-term"],
    ];
    for args in runs {
        let first = report(args);
        let argv = argv_from_inputs(&first);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let replay = report(&argv);
        assert_eq!(without_time(first), without_time(replay), "replay of {args:?} via {argv:?}");
    }
}

#[test]
fn deterministic_mode_ignores_thread_count() {
    let base = ["lk", "--link", "hopf", "--samples", "30000", "--deterministic"];
    let a = report(&[&base[..], &["--threads", "1"]].concat());
    let b = report(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn exit_codes() {
    assert_eq!(feynkit(&["nonsense"]).status.code(), Some(1));
    assert_eq!(feynkit(&["--help"]).status.code(), Some(0));
    let not_pd = r#"{"dim": 2, "entries": [[1, 2], [2, 1]]}"#;
    assert_eq!(feynkit(&["wick", "--matrix", not_pd, "--indices", "1,2"]).status.code(), Some(1));
    let long: Vec<String> = vec!["1".to_string(); 40];
    let long = long.join(",");
    let out = feynkit(&["wick", "--matrix", MATRIX, "--indices", &long]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn selftest_passes_on_a_small_budget() {
    let out = Command::new(env!("CARGO_BIN_EXE_feynkit"))
        .arg("selftest")
        .env("FEYNKIT_SELFTEST_BUDGET", "50000")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["result"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

// Copyright 2026 The nonadditive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_nonadditive")).args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let v = if out.stdout.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&out.stdout).unwrap()
    };
    (code, v)
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("nonadditive-cli-{}-{name}", std::process::id()))
}

#[test]
fn params_examples() {
    let (code, v) = run(&["params", "--m", "1", "--a", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "nonadditive.report/1");
    let p = &v["payload"];
    assert_eq!((p["N"].as_u64(), p["K"].as_str()), (Some(41), Some("3*2^32")));
    assert_eq!((p["stabilizer_k"].as_u64(), p["hamming_s"].as_u64()), (Some(33), Some(7)));
    let (_, v) = run(&["params", "--m", "1", "--a", "1"]);
    assert_eq!((v["payload"]["N"].as_u64(), v["payload"]["K"].as_str()), (Some(42), Some("3*2^33")));
    let (_, v) = run(&["params", "--m", "0", "--a", "0"]);
    assert_eq!((v["payload"]["N"].as_u64(), v["payload"]["K_value"].as_str()), (Some(9), Some("12")));
    assert!(v["sidecar"]["elapsed_ms"].is_u64());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["params", "--m", "1", "--a", "2"]).0, 2);
    assert_eq!(run(&["params", "--m", "x", "--a", "0"]).0, 2);
    assert_eq!(run(&["lpbound", "--n", "40", "--mode", "theorem"]).0, 2);
    assert_eq!(run(&["lpbound", "--n", "41", "--mode", "lp"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--threads", "0", "params", "--m", "1", "--a", "0"]).0, 2);
    assert_eq!(run(&["export", "gottesman", "--r", "1", "--out", "/nonexistent/dir/x.json"]).0, 2);
}

#[test]
fn violations_exit_1() {
    // the 9-qubit code cannot detect every weight-3 error
    let (code, v) = run(&["verify", "small9", "--distance", "4"]);
    assert_eq!(code, 1);
    assert_eq!(v["outcome"], "fail");
    assert!(v["counters"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn verify_examples() {
    let (code, v) = run(&["verify", "small9"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["dimension"], "12");
    assert_eq!(v["counters"]["errors_checked"], 351);
    let (code, v) = run(&["verify", "gottesman", "--r", "1", "--purity"]);
    assert_eq!(code, 0);
    assert_eq!((v["payload"]["n"].as_u64(), v["payload"]["k"].as_u64()), (Some(32), Some(25)));
    assert_eq!(v["counters"], serde_json::json!({"errors_checked": 4560, "violations": 0}));
}

#[test]
fn lpbound_examples() {
    let (code, v) = run(&["lpbound", "--n", "41", "--mode", "theorem"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["s_tested"], 8);
    let (_, v) = run(&["lpbound", "--n", "41", "--mode", "lp", "--s", "7"]);
    assert_eq!(v["payload"]["verdict"], "infeasible");
    let cert = &v["payload"]["certificate"];
    assert_eq!(cert["kind"], "farkas");
    assert_eq!(cert["multipliers"].as_array().unwrap().len(), 5);
    assert!(!cert["combined_rhs"].as_str().unwrap().starts_with('-'));
    let (_, v) = run(&["lpbound", "--n", "41", "--mode", "lp", "--s", "8"]);
    assert_eq!(v["payload"]["verdict"], "feasible");
    assert_eq!(v["payload"]["certificate"]["A"].as_array().unwrap().len(), 42);
}

#[test]
fn exports() {
    let out = tmp("gottesman.json");
    let (code, v) = run(&["export", "gottesman", "--r", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["generators"].as_array().unwrap().len(), 7);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, v["payload"]);
    std::fs::remove_file(&out).unwrap();

    let (_, v) = run(&["export", "pasted", "--m", "1", "--a", "0"]);
    let p = &v["payload"];
    assert_eq!(p["observables"].as_array().unwrap().len(), 8);
    assert_eq!((p["N"].as_u64(), p["K_num"].as_str()), (Some(41), Some("3*2^32")));
    assert_eq!(p["observables"][7][1]["named"], "A0");

    let report = tmp("small10-report.json");
    let (_, v) = run(&["--json", report.to_str().unwrap(), "export", "small10"]);
    assert_eq!(v["payload"]["observables"].as_array().unwrap().len(), 6);
    assert_eq!(v["payload"]["codewords"].as_array().unwrap().len(), 24);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved, v);
    std::fs::remove_file(&report).unwrap();
}

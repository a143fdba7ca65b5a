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


//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use nonadditive::dense::{kl_check, projector_from_involutions, DenseOperator};
use nonadditive::gottesman::{self, StabilizerCode};
use nonadditive::graph::{is_automorphism, seed_symmetries};
use nonadditive::lp_bound::{self, LpOutcome};
use nonadditive::pasting::{self, TraceEngine};
use nonadditive::pauli::PauliOperator;
use nonadditive::small_codes::{self, VTag};
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= budget, || format!("{what} took {t:?}, budget {budget:?}"))
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn small9() -> Check {
    let start = Instant::now();
    let code = small_codes::build_code9().map_err(s)?;
    ensure(code.projector.dimension() == 12.into(), || format!("trace {}", code.projector.dimension()))?;
    let a0 = code.factor(VTag::A0).map_err(s)?.trace();
    ensure(a0.to_string() == "256", || format!("Tr(A_0) = {a0}"))?;
    let r = kl_check(&code.projector, &code.distance_errors()).map_err(s)?;
    ensure(r.errors_checked == 351, || format!("{} errors", r.errors_checked))?;
    ensure(r.all_pass && r.pure, || format!("{} errors with P E P != 0", r.violations().count()))?;
    within(start, Duration::from_secs(30), "verification")?;
    Ok(format!("K = 12, Tr(A_0) = 256, 351/351 errors give P E P = 0 ({:?})", start.elapsed()))
}

fn small10() -> Check {
    let start = Instant::now();
    let rec = small_codes::recover_graph10(true).map_err(s)?;
    within(start, Duration::from_secs(30 * 60), "recovery")?;
    ensure(!rec.solutions.is_empty(), || "no invariant graph".into())?;
    let g = rec.first().expect("nonempty");
    let (pi, tau) = seed_symmetries();
    ensure(
        is_automorphism(&g, &pi).map_err(s)? && is_automorphism(&g, &tau).map_err(s)?,
        || "recovered graph is not fixed by pi and tau".into(),
    )?;
    let frozen = small_codes::frozen_graph10().map_err(s)?;
    ensure(frozen == g, || "frozen graph differs from the recovered one".into())?;
    let t = Instant::now();
    // construction checks the trace, Tr(B_0) and that all 24 codewords are stabilized
    let code = small_codes::build_code10(&g).map_err(s)?;
    ensure(code.projector.dimension() == 24.into(), || format!("trace {}", code.projector.dimension()))?;
    let b0 = code.factor(VTag::B0).map_err(s)?.trace();
    ensure(b0.to_string() == "512", || format!("Tr(B_0) = {b0}"))?;
    ensure(code.codewords.len() == 24, || format!("{} codewords", code.codewords.len()))?;
    let r = kl_check(&code.projector, &code.distance_errors()).map_err(s)?;
    ensure(r.errors_checked == 435, || format!("{} errors", r.errors_checked))?;
    ensure(r.all_pass && r.pure, || format!("{} errors with P E P != 0", r.violations().count()))?;
    within(t, Duration::from_secs(60), "verification")?;
    Ok(format!(
        "{} invariant graph(s) of {}, K = 24, Tr(B_0) = 512, 24 codewords stabilized, 435/435 pure",
        rec.solutions.len(),
        rec.candidates
    ))
}

fn gottesman_family() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (r, expected) in [(1usize, 4560usize), (2, 73536)] {
        let code = gottesman::generators(r).map_err(s)?;
        let g = code.generators.len();
        ensure(g == 2 * r + 5, || format!("r = {r}: {g} generators"))?;
        ensure(code.anticommuting_pair().map_err(s)?.is_none(), || format!("r = {r}: generators anticommute"))?;
        ensure(code.symplectic_rank() == g, || format!("r = {r}: rank {}", code.symplectic_rank()))?;
        let rep = gottesman::verify_pure_distance3(&code).map_err(s)?;
        ensure(rep.errors_checked == expected, || format!("r = {r}: {} errors", rep.errors_checked))?;
        ensure(rep.passed(), || format!("r = {r}: {} zero-syndrome errors", rep.violations.len()))?;
        notes.push(format!("r = {r}: {g} generators, {expected} errors, 0 zero-syndrome"));
    }
    within(start, Duration::from_secs(60), "sweep")?;
    Ok(notes.join("; "))
}

fn pasted_m1() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (a, k, errors) in [(0usize, "12884901888", 7503usize), (1, "25769803776", 7875)] {
        let code = pasting::assemble(1, a).map_err(s)?;
        let dim = pasting::code_dimension(&code).map_err(s)?;
        ensure(dim.to_string() == k, || format!("a = {a}: K = {dim}, expected {k}"))?;
        let rep = pasting::verify_distance3_pure(&code, 2).map_err(s)?;
        ensure(rep.errors_checked == errors, || format!("a = {a}: {} errors", rep.errors_checked))?;
        let line = format!(
            "D_(1,{a}): K = {}, {} errors, {} violations ({} KL failures)",
            pasting::format_power_of_two(&dim.to_integer()),
            rep.errors_checked,
            rep.violations.len(),
            rep.kl_failures.len()
        );
        if rep.passed() {
            notes.push(line);
        } else {
            let sample: Vec<&str> = rep.violations.iter().take(3).map(String::as_str).collect();
            failures.push(format!("{line}, e.g. {sample:?}"));
        }
    }
    within(start, Duration::from_secs(15 * 60), "sweep")?;
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(notes.into_iter().chain(failures).collect::<Vec<_>>().join("; "))
    }
}

fn engine_oracle() -> Check {
    let code = pasting::toy_code().map_err(s)?;
    ensure(code.num_qubits() <= 12, || format!("{} qubits", code.num_qubits()))?;
    let engine = TraceEngine::new(&code).map_err(s)?;
    let p = code.dense_projector().map_err(s)?;
    let op = p.operator();
    ensure(engine.trace_projector() == *p.trace(), || "Tr(P) differs".into())?;
    let table = engine.trace_table(2).map_err(s)?;
    let mut nonzero = 0;
    for (e, v) in &table {
        let dense = op.trace_conjugated_product(e, op).map_err(s)?;
        ensure(*v == dense, || format!("{e}: engine {v}, dense {dense}"))?;
        nonzero += usize::from(!v.is_zero());
    }
    Ok(format!(
        "{} qubits in 2 blocks, {} errors agree exactly ({} nonzero)",
        code.num_qubits(),
        table.len(),
        nonzero
    ))
}

fn lp() -> Check {
    let start = Instant::now();
    for (n, want) in [(41, 8), (42, 8), (9, 6), (10, 6)] {
        let got = lp_bound::theorem_lower_bound(n).map_err(s)?.min_s;
        ensure(got == want, || format!("theorem bound for n = {n} is {got}, expected {want}"))?;
    }
    for n in [41, 42] {
        let inst = lp_bound::restricted_constraints(n, 7).map_err(s)?;
        match lp_bound::lp_feasible(&inst).map_err(s)? {
            LpOutcome::Infeasible { certificate } => {
                ensure(certificate.verify(&inst), || format!("n = {n}: certificate does not verify"))?
            }
            LpOutcome::Feasible { .. } => return Err(format!("n = {n}, s = 7 reported feasible")),
        }
        ensure(lp_bound::hamming_bound(n) == 7, || format!("hamming_bound({n}) = {}", lp_bound::hamming_bound(n)))?;
    }
    let inst = lp_bound::restricted_constraints(41, 8).map_err(s)?;
    ensure(lp_bound::lp_feasible(&inst).map_err(s)?.is_feasible(), || "n = 41, s = 8 infeasible".into())?;
    within(start, Duration::from_secs(10), "bounds")?;
    Ok("theorem 8/8/6/6, s = 7 infeasible with verified certificates, (41, 8) feasible, Hamming 7".into())
}

fn five_qubit() -> StabilizerCode {
    let generators = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
        .iter()
        .map(|g| format!("i^0 {g}").parse::<PauliOperator>().expect("valid Pauli"))
        .collect();
    StabilizerCode { n: 5, generators }
}

fn enumerators() -> Check {
    let mut notes = Vec::new();
    let g = small_codes::frozen_graph10().map_err(s)?;
    for code in [small_codes::build_code9().map_err(s)?, small_codes::build_code10(&g).map_err(s)?] {
        let k = num_rational::BigRational::from_integer(code.projector.dimension());
        let w = lp_bound::weight_distribution(code.projector.operator(), &k).map_err(s)?;
        let total = w.total();
        let expected = num_rational::BigRational::new((1u32 << code.num_qubits()).into(), k.to_integer());
        ensure(w.values[0].to_string() == "1", || format!("{}: A_0 = {}", code.label(), w.values[0]))?;
        ensure(
            w.values[1].to_string() == "0" && w.values[2].to_string() == "0",
            || format!("{}: A_1 = {}, A_2 = {}", code.label(), w.values[1], w.values[2]),
        )?;
        ensure(total == expected, || format!("{}: sum {total}, expected {expected}", code.label()))?;
        notes.push(format!("{} sum {total}", code.label()));
    }
    let code = five_qubit();
    let ops: Vec<DenseOperator> = code
        .generators
        .iter()
        .map(DenseOperator::from_pauli)
        .collect::<Result<_, _>>()
        .map_err(s)?;
    let p = projector_from_involutions(&ops).map_err(s)?;
    let k = num_rational::BigRational::from_integer(p.dimension());
    let w = lp_bound::weight_distribution(p.operator(), &k).map_err(s)?;
    let inst = lp_bound::restricted_constraints(5, 4).map_err(s)?;
    ensure(inst.is_satisfied_by(&w.values), || format!("[[5,1,3]] enumerator {:?} violates the constraints", w.values))?;
    notes.push("[[5,1,3]] satisfies the s = 4 constraints".into());
    Ok(notes.join("; "))
}

fn run_cli(threads: usize, args: &[&str]) -> Result<(Option<i32>, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nonadditive"))
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(s)?;
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    v.as_object_mut()
        .ok_or_else(|| format!("{args:?}: report is not an object"))?
        .remove("sidecar");
    Ok((out.status.code(), v))
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("nonadditive-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(s)?;
    let graph_out = dir.join("g1.json");
    let graph_out = graph_out.to_str().expect("utf-8 path");
    let commands: Vec<Vec<&str>> = vec![
        vec!["params", "--m", "1", "--a", "0"],
        vec!["params", "--m", "1", "--a", "1"],
        vec!["verify", "small9"],
        vec!["verify", "small10"],
        vec!["verify", "gottesman", "--r", "1"],
        vec!["verify", "pasted", "--m", "1", "--a", "0"],
        vec!["verify", "pasted", "--m", "1", "--a", "1"],
        vec!["lpbound", "--n", "41", "--mode", "theorem"],
        vec!["lpbound", "--n", "42", "--mode", "lp", "--s", "7"],
        vec!["lpbound", "--n", "41", "--mode", "lp", "--s", "8"],
        vec!["recover-graph10", "--out", graph_out],
        vec!["export", "small10"],
        vec!["export", "gottesman", "--r", "1"],
        vec!["export", "pasted", "--m", "1", "--a", "0"],
    ];
    for args in &commands {
        let first = run_cli(1, args)?;
        let second = run_cli(2, args)?;
        let third = run_cli(1, args)?;
        ensure(first == second && first == third, || format!("{args:?} differs between runs"))?;
    }
    let written = std::fs::read(graph_out).map_err(s)?;
    let frozen = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/g1.json")).map_err(s)?;
    ensure(written == frozen, || "recovered graph file is not byte-identical to data/g1.json".into())?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands identical over 3 runs with 1 and 2 threads", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("((9,12,3)) reproduction", small9),
        ("((10,24,3)) recovery and reproduction", small10),
        ("Gottesman family r = 1, 2", gottesman_family),
        ("pasted codes m = 1", pasted_m1),
        ("trace engine vs dense oracle", engine_oracle),
        ("LP bound", lp),
        ("enumerator identities", enumerators),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} [{:.1?}]", i + 1, start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg} [{:.1?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

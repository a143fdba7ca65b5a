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


//! Command-line driver: builds, verifies and exports the codes and bounds.
//!
//! Every run prints one JSON report on standard output. The `payload` is
//! canonical; timing lives in `sidecar` only. Human-readable notes go to
//! standard error. Exit codes: 0 pass, 1 violation, 2 usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonadditive::dense::kl_check;
use nonadditive::error::Error;
use nonadditive::graph::{Graph, GraphJson};
use nonadditive::lp_bound::{self, LpOutcome};
use nonadditive::pasting::{self, format_power_of_two};
use nonadditive::small_codes::{self, SmallCode, VTag};
use nonadditive::gottesman;
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "nonadditive.report/1";

#[derive(Parser)]
#[command(name = "nonadditive", version, about = "Exact construction and verification of the D_(m,a) nonadditive codes")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Length, dimension and comparison parameters of D_(m,a).
    Params {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: usize,
    },
    /// Full validation of a code: commutation, dimension and distance sweep.
    Verify {
        #[command(subcommand)]
        target: Target,
        /// Designed distance; every error of weight below it is checked.
        #[arg(long, default_value_t = 3, global = true)]
        distance: usize,
        /// Count impure (degenerate) errors as violations, not only KL failures.
        #[arg(long, global = true)]
        purity: bool,
    },
    /// Lower bounds on the redundancy n - k of distance-3 codes.
    Lpbound {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Redundancy to test in lp mode.
        #[arg(long)]
        s: Option<usize>,
    },
    /// Search the symmetric graphs for the 10-qubit seed.
    RecoverGraph10 {
        #[arg(long, default_value = "data/g1.json")]
        out: PathBuf,
        /// Enumerate every solution instead of stopping at the first.
        #[arg(long)]
        all: bool,
    },
    /// Write the JSON description of a code.
    Export {
        #[command(subcommand)]
        target: Target,
        #[arg(long, global = true, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Clone)]
enum Target {
    /// The ((9,12,3)) code.
    Small9,
    /// The ((10,24,3)) code.
    Small10(GraphArg),
    /// The [[2^(2r+3), 2^(2r+3)-2r-5, 3]] stabilizer code.
    Gottesman {
        #[arg(long)]
        r: usize,
    },
    /// The pasted code D_(m,a).
    Pasted {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: usize,
    },
}

#[derive(Args, Clone)]
struct GraphArg {
    /// Graph JSON to use instead of the frozen one.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Mode {
    Theorem,
    Lp,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Outcome {
    inputs: Value,
    passed: bool,
    counters: Value,
    payload: Value,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    tool_version: &'static str,
    command: &'a str,
    inputs: Value,
    outcome: &'static str,
    counters: Value,
    payload: Value,
    sidecar: Sidecar,
}

#[derive(Serialize)]
struct Sidecar {
    elapsed_ms: u128,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn load_graph(arg: &GraphArg) -> Result<Graph, Failure> {
    match &arg.graph {
        None => Ok(small_codes::frozen_graph10()?),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            let j: GraphJson = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            Ok(Graph::from_json(&j)?)
        }
    }
}

fn seed(target: &Target) -> Result<Option<SmallCode>, Failure> {
    Ok(match target {
        Target::Small9 => Some(small_codes::build_code9()?),
        Target::Small10(g) => Some(small_codes::build_code10(&load_graph(g)?)?),
        _ => None,
    })
}

fn cmd_params(m: usize, a: usize) -> Result<Outcome, Failure> {
    let p = pasting::params(m, a)?;
    let hamming = lp_bound::hamming_bound(p.n);
    eprintln!(
        "(({}, {}, 3)): stabilizer optimum k = {}, Hamming redundancy {}",
        p.n,
        p.dimension_string(),
        p.optimal_stabilizer_k,
        hamming
    );
    Ok(Outcome {
        inputs: json!({"m": m, "a": a}),
        passed: true,
        counters: json!({}),
        payload: json!({
            "N": p.n,
            "K": p.dimension_string(),
            "K_value": p.dimension().to_string(),
            "stabilizer_k": p.optimal_stabilizer_k,
            "hamming_s": hamming,
            "seed": if m == 0 { Some(if a == 0 { "((9,12,3))" } else { "((10,24,3))" }) } else { None },
        }),
    })
}

fn cmd_verify(target: &Target, distance: usize, purity: bool) -> Result<Outcome, Failure> {
    if distance < 2 {
        return Err(Failure::Usage(format!("distance must be at least 2, got {distance}")));
    }
    let max_weight = distance - 1;
    let flags = json!({"distance": distance, "purity": purity});
    if let Some(code) = seed(target)? {
        let errors = nonadditive::pauli::enumerate_errors(code.num_qubits(), max_weight)?;
        let report = kl_check(&code.projector, &errors)?;
        let violations: Vec<String> = report
            .entries
            .iter()
            .filter(|e| !e.pass || (purity && !(e.coefficient.re == "0" && e.coefficient.im == "0")))
            .map(|e| e.error.clone())
            .collect();
        let zero_tag = match target {
            Target::Small9 => VTag::A0,
            _ => VTag::B0,
        };
        let zero_trace = code.factor(zero_tag)?.trace();
        eprintln!(
            "{}: dimension {}, {} errors, {} violations",
            code.label(),
            code.projector.dimension(),
            report.errors_checked,
            violations.len()
        );
        let mut inputs = flags;
        inputs["target"] = json!(match target {
            Target::Small9 => "small9",
            _ => "small10",
        });
        return Ok(Outcome {
            inputs,
            passed: violations.is_empty(),
            counters: json!({"errors_checked": report.errors_checked, "violations": violations.len()}),
            payload: json!({
                "code": code.label(),
                "dimension": code.projector.dimension().to_string(),
                "zero_observable": zero_tag.name(),
                "zero_observable_trace": zero_trace.to_string(),
                "codewords_checked": code.codewords.len(),
                "pure": report.pure,
                "violations": violations,
            }),
        });
    }
    match *target {
        Target::Gottesman { r } => {
            if max_weight != 2 {
                return Err(Failure::Usage("the stabilizer sweep supports distance 3 only".into()));
            }
            let code = gottesman::generators(r)?;
            let rank = code.symplectic_rank();
            let independent = rank == code.generators.len();
            let report = gottesman::verify_pure_distance3(&code)?;
            let k = code.logical_qubits();
            eprintln!(
                "[[{}, {k}, 3]]: {} generators, rank {rank}, {} errors, {} violations",
                code.n,
                code.generators.len(),
                report.errors_checked,
                report.violations.len()
            );
            Ok(Outcome {
                inputs: json!({"target": "gottesman", "r": r, "distance": distance, "purity": purity}),
                passed: report.passed() && independent,
                counters: json!({"errors_checked": report.errors_checked, "violations": report.violations.len()}),
                payload: json!({
                    "n": code.n,
                    "k": k,
                    "generators": code.generators.len(),
                    "symplectic_rank": rank,
                    "saturates_hamming": gottesman::saturates_hamming(r),
                    "violations": report.violations,
                }),
            })
        }
        Target::Pasted { m, a } => {
            let code = pasting::assemble(m, a)?;
            let dim = pasting::check_dimension(&code)?;
            let report = pasting::verify_distance3_pure(&code, max_weight)?;
            let violations = if purity { &report.violations } else { &report.kl_failures };
            eprintln!(
                "D_({m},{a}): N = {}, K = {}, {} errors, {} impure, {} KL failures",
                report.n,
                format_power_of_two(&dim),
                report.errors_checked,
                report.violations.len(),
                report.kl_failures.len()
            );
            Ok(Outcome {
                inputs: json!({"target": "pasted", "m": m, "a": a, "distance": distance, "purity": purity}),
                passed: violations.is_empty(),
                counters: json!({
                    "errors_checked": report.errors_checked,
                    "violations": violations.len(),
                    "impure": report.violations.len(),
                    "kl_failures": report.kl_failures.len(),
                }),
                payload: json!({
                    "N": report.n,
                    "K": format_power_of_two(&dim),
                    "impure": report.violations,
                    "kl_failures": report.kl_failures,
                }),
            })
        }
        Target::Small9 | Target::Small10(_) => unreachable!("handled above"),
    }
}

fn cmd_lpbound(n: usize, mode: Mode, s: Option<usize>) -> Result<Outcome, Failure> {
    match mode {
        Mode::Theorem => {
            let replay = lp_bound::theorem_lower_bound(n)?;
            for step in &replay.steps {
                eprintln!("  {}: {}", if step.holds { "ok" } else { "FAILS" }, step.claim);
            }
            Ok(Outcome {
                inputs: json!({"n": n, "mode": "theorem"}),
                passed: true,
                counters: json!({"steps": replay.steps.len()}),
                payload: json!({
                    "n": n,
                    "s_tested": replay.min_s,
                    "verdict": format!("n - k >= {}", replay.min_s),
                    "certificate": to_value(&replay),
                }),
            })
        }
        Mode::Lp => {
            let s = s.ok_or_else(|| Failure::Usage("lp mode needs --s".into()))?;
            let inst = lp_bound::restricted_constraints(n, s)?;
            let outcome = lp_bound::lp_feasible(&inst)?;
            let labels: Vec<&str> = inst.constraints.iter().map(|c| c.label.as_str()).collect();
            let (verdict, certificate) = match &outcome {
                LpOutcome::Infeasible { certificate } => {
                    let combined: Vec<String> = certificate.combined(&inst).iter().map(|v| v.to_string()).collect();
                    (
                        "infeasible",
                        json!({
                            "kind": "farkas",
                            "constraints": labels,
                            "multipliers": certificate.multipliers.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                            "combined_coefficients": combined,
                            "combined_rhs": certificate.combined_rhs(&inst).to_string(),
                        }),
                    )
                }
                LpOutcome::Feasible { point } => (
                    "feasible",
                    json!({
                        "kind": "point",
                        "A": point.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    }),
                ),
            };
            eprintln!("n = {n}, s = {s}: {verdict} ({} constraints)", inst.constraint_count());
            Ok(Outcome {
                inputs: json!({"n": n, "mode": "lp", "s": s}),
                passed: true,
                counters: json!({"constraints": inst.constraint_count()}),
                payload: json!({"n": n, "s_tested": s, "verdict": verdict, "certificate": certificate}),
            })
        }
    }
}

fn cmd_recover(out: &PathBuf, all: bool) -> Result<Outcome, Failure> {
    let base = small_codes::Code10Base::new()?;
    let rec = match small_codes::recover_graph10_with(&base, all) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return Ok(Outcome {
                inputs: json!({"all": all}),
                passed: false,
                counters: json!({"solutions": 0}),
                payload: json!({"solutions": []}),
            });
        }
    };
    let graphs: Vec<Graph> = rec.solutions.iter().map(|&c| rec.graph(c)).collect();
    let mut dims = Vec::new();
    for g in &graphs {
        dims.push(small_codes::build_code10_with(&base, g)?.projector.dimension().to_string());
    }
    let text = serde_json::to_string(&graphs[0].to_json()).expect("graph serializes");
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(out, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    eprintln!(
        "{} of {} candidates searched, {} solution(s); wrote {}",
        if all { rec.candidates } else { rec.solutions[0] + 1 },
        rec.candidates,
        graphs.len(),
        out.display()
    );
    Ok(Outcome {
        inputs: json!({"all": all}),
        passed: true,
        counters: json!({"candidates": rec.candidates, "solutions": graphs.len()}),
        payload: json!({
            "edge_orbits": rec.orbits.len(),
            "solutions": graphs.iter().map(|g| to_value(&g.to_json())).collect::<Vec<_>>(),
            "dimensions": dims,
        }),
    })
}

fn cmd_export(target: &Target, out: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let (inputs, payload) = match target {
        Target::Small9 | Target::Small10(_) => {
            let code = seed(target)?.expect("seed target");
            (json!({"target": code.label()}), to_value(&code.to_json()))
        }
        Target::Gottesman { r } => (
            json!({"target": "gottesman", "r": r}),
            to_value(&gottesman::generators(*r)?.to_json()),
        ),
        Target::Pasted { m, a } => {
            let code = pasting::assemble(*m, *a)?;
            let dim = pasting::params(*m, *a)?.dimension();
            (json!({"target": "pasted", "m": m, "a": a}), to_value(&code.to_json(&dim)))
        }
    };
    if let Some(p) = out {
        let text = serde_json::to_string_pretty(&payload).expect("export serializes");
        std::fs::write(p, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
        eprintln!("wrote {}", p.display());
    }
    Ok(Outcome {
        inputs,
        passed: true,
        counters: json!({}),
        payload,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Params { m, a } => cmd_params(*m, *a),
        Command::Verify { target, distance, purity } => cmd_verify(target, *distance, *purity),
        Command::Lpbound { n, mode, s } => cmd_lpbound(*n, *mode, *s),
        Command::RecoverGraph10 { out, all } => cmd_recover(out, *all),
        Command::Export { target, out } => cmd_export(target, out.as_ref()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Params { .. } => "params",
        Command::Verify { .. } => "verify",
        Command::Lpbound { .. } => "lpbound",
        Command::RecoverGraph10 { .. } => "recover-graph10",
        Command::Export { .. } => "export",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("--threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command),
        inputs: outcome.inputs,
        outcome: if outcome.passed { "pass" } else { "fail" },
        counters: outcome.counters,
        payload: outcome.payload,
        sidecar: Sidecar {
            elapsed_ms: start.elapsed().as_millis(),
        },
    };
    let text = serde_json::to_string(&report).expect("report serializes");
    if let Some(p) = &cli.json {
        if let Err(e) = std::fs::write(p, format!("{text}\n")) {
            eprintln!("error: {}: {e}", p.display());
            return ExitCode::from(2);
        }
    }
    println!("{text}");
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

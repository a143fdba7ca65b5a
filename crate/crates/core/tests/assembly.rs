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


use nonadditive::dense::kl_check;
use nonadditive::gottesman;
use nonadditive::pasting::{assemble, assemble_with, BlockFactor, TraceEngine};
use nonadditive::pauli::{enumerate_errors, PauliOperator};
use nonadditive::small_codes::build_code9;

fn pauli(f: &BlockFactor) -> &PauliOperator {
    match f {
        BlockFactor::Pauli(p) => p,
        other => panic!("expected a Pauli factor, got {other:?}"),
    }
}

#[test]
fn d10_rows() {
    let code = assemble(1, 0).unwrap();
    assert_eq!(code.num_qubits(), 41);
    assert_eq!(code.rows(), 8);
    let g = gottesman::generators(1).unwrap();
    let obs = code.observables();
    assert_eq!(pauli(&obs[0].factors[0]), &g.generators[0]);
    assert_eq!(obs[0].factors[1], BlockFactor::Identity);
    assert_eq!(pauli(&obs[1].factors[0]), &g.generators[1]);
    for k in 1..=5 {
        assert_eq!(pauli(&obs[k + 1].factors[0]), gottesman::s_generator(&g, k), "row {}", k + 2);
    }
    let names: Vec<_> = obs[2..].iter().map(|o| o.factors[1].clone()).collect();
    let want = ["alpha1", "alpha2", "alpha3", "A1", "A2", "A0"];
    for (f, w) in names.iter().zip(want) {
        match f {
            BlockFactor::Dense(n) => assert_eq!(n, w),
            other => panic!("expected {w}, got {other:?}"),
        }
    }
    assert_eq!(obs[7].factors[0], BlockFactor::Identity);
    assert!(obs.iter().all(|o| o.sign == 1));
}

#[test]
fn d21_layout() {
    let code = assemble(2, 1).unwrap();
    let sizes: Vec<_> = code.layout().blocks().iter().map(|b| (b.name.clone(), b.offset, b.size)).collect();
    assert_eq!(
        sizes,
        vec![("U_2".into(), 0, 128), ("U_1".into(), 128, 32), ("V_1".into(), 160, 10)]
    );
    assert_eq!(code.rows(), 10);
    let obs = code.observables();
    let x = pauli(&obs[0].factors[0]);
    assert_eq!((x.n(), x.x_mask().weight(), x.z_mask().weight()), (128, 128, 0));
    assert_eq!(obs[0].factors[1..], [BlockFactor::Identity, BlockFactor::Identity]);
    // U_1 enters at rows 3 and 4 and carries S^1_k on row k + 4 (1-based)
    let g1 = gottesman::generators(1).unwrap();
    assert_eq!(obs[1].factors[1], BlockFactor::Identity);
    assert_eq!(pauli(&obs[2].factors[1]), &g1.generators[0]);
    assert_eq!(pauli(&obs[3].factors[1]), &g1.generators[1]);
    for k in 1..=5 {
        assert_eq!(pauli(&obs[k + 3].factors[1]), gottesman::s_generator(&g1, k));
    }
    let g2 = gottesman::generators(2).unwrap();
    assert_eq!(pauli(&obs[8].factors[0]), gottesman::s_generator(&g2, 7));
    assert_eq!(obs[9].factors[..2], [BlockFactor::Identity, BlockFactor::Identity]);
}

#[test]
fn assembly_needs_positive_m() {
    let seed = build_code9().unwrap();
    assert!(assemble_with(0, &seed).is_err());
    assert!(assemble(1, 2).is_err());
}

#[test]
fn u_only_errors_follow_gottesman_syndromes() {
    let code = assemble(1, 0).unwrap();
    let engine = TraceEngine::new(&code).unwrap();
    let g = gottesman::generators(1).unwrap();
    let id_v = PauliOperator::identity(9);
    for e in enumerate_errors(32, 2).unwrap().iter().step_by(11) {
        let detected = g.generators.iter().any(|s| s.symplectic(e).unwrap());
        let full = e.tensor(&id_v);
        assert_eq!(engine.trace_pep(&full).unwrap().is_zero(), detected, "{e}");
    }
}

#[test]
fn v_only_errors_match_seed_for_a0() {
    let seed = build_code9().unwrap();
    let code = assemble_with(1, &seed).unwrap();
    let engine = TraceEngine::new(&code).unwrap();
    let errors = enumerate_errors(9, 2).unwrap();
    let report = kl_check(&seed.projector, &errors).unwrap();
    let id_u = PauliOperator::identity(32);
    for (e, entry) in errors.iter().zip(&report.entries) {
        let pure = entry.coefficient.re == "0" && entry.coefficient.im == "0";
        assert!(pure && entry.pass, "{e}");
        assert!(engine.trace_pep(&id_u.tensor(e)).unwrap().is_zero(), "{e}");
    }
}

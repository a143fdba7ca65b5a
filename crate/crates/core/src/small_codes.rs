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

//! The seed nonadditive codes `((9,12,3))` and `((10,24,3))`.
//!
//! Both codes are joint `+1` eigenspaces of six commuting Hermitian
//! involutions. The 10-qubit code needs the graph `G_1`; it is recovered by an
//! exhaustive search over graphs fixed by `π` and `τ` and then frozen in
//! `data/g1.json`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{
    build_t_controlled, build_ug, build_v, graph_phase_negative, projector_from_involutions,
    walsh_hadamard, DenseOperator, DyadicComplex, Ket, Projector, Wide,
};
use crate::error::{Error, Result};
use crate::graph::{
    cycle_graph, edge_orbits, is_automorphism, seed_symmetries, Graph, GraphJson, Label,
};
use crate::pauli::{enumerate_errors, PauliOperator};

const FROZEN_G1: &str = include_str!("../../../data/g1.json");

/// Names of the dense factors a seed code contributes to the pasted codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VTag {
    Alpha1,
    Alpha2,
    Alpha3,
    A1,
    A2,
    A3,
    A0,
    Beta1,
    Beta2,
    Beta3,
    B0,
    B1,
    B2,
}

impl VTag {
    pub fn name(self) -> &'static str {
        match self {
            VTag::Alpha1 => "alpha1",
            VTag::Alpha2 => "alpha2",
            VTag::Alpha3 => "alpha3",
            VTag::A1 => "A1",
            VTag::A2 => "A2",
            VTag::A3 => "A3",
            VTag::A0 => "A0",
            VTag::Beta1 => "beta1",
            VTag::Beta2 => "beta2",
            VTag::Beta3 => "beta3",
            VTag::B0 => "B0",
            VTag::B1 => "B1",
            VTag::B2 => "B2",
        }
    }
}

/// `conjugator · X_{x_support} V_{v_pair} · conjugator†`.
#[derive(Clone, Debug, Serialize)]
pub struct ObservableSpec {
    pub tag: VTag,
    pub conjugator: &'static str,
    pub x_support: Vec<Label>,
    pub v_pair: Option<[Label; 2]>,
}

const CODE9_SPECS: [(VTag, &[Label], Option<[Label; 2]>); 6] = [
    (VTag::Alpha1, &[3, 8], None),
    (VTag::Alpha2, &[6, 2], None),
    (VTag::Alpha3, &[9, 5], None),
    (VTag::A1, &[4, 7, 3, 6, 9], Some([6, 9])),
    (VTag::A2, &[1, 7, 3, 6], Some([3, 9])),
    (VTag::A3, &[1, 4, 3, 9], Some([3, 6])),
];

const CODE10_SPECS: [(VTag, &[Label], Option<[Label; 2]>); 6] = [
    (VTag::Beta1, &[2, 3, 7], None),
    (VTag::Beta2, &[6, 7, 8], None),
    (VTag::Beta3, &[3, 4, 6, 9], None),
    (VTag::B0, &[6], Some([6, 7])),
    (VTag::B1, &[1, 2], Some([3, 7])),
    (VTag::B2, &[4], Some([3, 6])),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeedKind {
    Code9,
    Code10,
}

#[derive(Clone, Debug)]
pub struct SmallCode {
    pub kind: SeedKind,
    pub graph: Graph,
    /// The six defining observables in their printed order.
    pub observables: Vec<(VTag, DenseOperator)>,
    /// Every named factor, including the product `A0` / `B0`.
    pub factors: BTreeMap<VTag, DenseOperator>,
    pub projector: Projector,
    pub declared_dimension: u64,
    pub specs: Vec<ObservableSpec>,
    /// Codeword subsets for the 10-qubit code; empty for the 9-qubit code.
    pub codewords: Vec<BTreeSet<Label>>,
}

impl SmallCode {
    pub fn num_qubits(&self) -> usize {
        self.graph.len()
    }

    pub fn factor(&self, tag: VTag) -> Result<&DenseOperator> {
        self.factors
            .get(&tag)
            .ok_or_else(|| Error::InvalidArgument(format!("seed code has no factor {}", tag.name())))
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            SeedKind::Code9 => "((9,12,3))",
            SeedKind::Code10 => "((10,24,3))",
        }
    }

    /// All weight-1 and weight-2 errors on the block.
    pub fn distance_errors(&self) -> Vec<PauliOperator> {
        enumerate_errors(self.num_qubits(), 2).expect("block has at least 2 qubits")
    }

    pub fn to_json(&self) -> SmallCodeJson {
        SmallCodeJson {
            code: self.label().to_string(),
            graph: self.graph.to_json(),
            dimension: self.declared_dimension,
            observables: self.specs.clone(),
            codewords: self
                .codewords
                .iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallCodeJson {
    pub code: String,
    pub graph: GraphJson,
    pub dimension: u64,
    pub observables: Vec<ObservableSpec>,
    pub codewords: Vec<Vec<Label>>,
}

fn core_operator(
    g: &Graph,
    x_support: &[Label],
    v_pair: Option<[Label; 2]>,
) -> Result<DenseOperator> {
    let n = g.len();
    let idx: Vec<usize> = x_support
        .iter()
        .map(|&v| g.index_of(v))
        .collect::<Result<_>>()?;
    let x = DenseOperator::from_pauli(&PauliOperator::x_on(n, &idx)?)?;
    match v_pair {
        None => Ok(x),
        Some([a, b]) => x.mul(&build_v(g.index_of(a)?, g.index_of(b)?, n)?),
    }
}

fn graph_signs(g: &Graph) -> Vec<bool> {
    (0..1usize << g.len()).map(|b| graph_phase_negative(g, b)).collect()
}

fn specs(table: &[(VTag, &[Label], Option<[Label; 2]>)], conjugator: &'static str) -> Vec<ObservableSpec> {
    table
        .iter()
        .map(|&(tag, xs, v)| ObservableSpec {
            tag,
            conjugator,
            x_support: xs.to_vec(),
            v_pair: v,
        })
        .collect()
}

fn check_trace(name: &str, got: &DyadicComplex, expected: i64) -> Result<()> {
    if *got != DyadicComplex::from_int(expected) {
        return Err(Error::Construction(format!(
            "Tr({name}) = {got}, expected {expected}"
        )));
    }
    Ok(())
}

/// `((9,12,3))` on the 9-cycle with labels `1..=9`.
pub fn build_code9() -> Result<SmallCode> {
    let g = cycle_graph(9)?;
    let signs = graph_signs(&g);
    let mut observables = Vec::with_capacity(6);
    for &(tag, xs, v) in &CODE9_SPECS {
        let op = core_operator(&g, xs, v)?.conjugate_by_signs(&signs);
        observables.push((tag, op));
    }
    let ops: Vec<DenseOperator> = observables.iter().map(|(_, o)| o.clone()).collect();
    let projector = projector_from_involutions(&ops)?;
    check_trace("P", projector.trace(), 12)?;
    let a0 = ops[3].mul(&ops[4])?.mul(&ops[5])?;
    check_trace("A0", &a0.trace(), 1 << 8)?;
    let mut factors: BTreeMap<VTag, DenseOperator> = observables.iter().cloned().collect();
    factors.insert(VTag::A0, a0);
    Ok(SmallCode {
        kind: SeedKind::Code9,
        graph: g,
        observables,
        factors,
        projector,
        declared_dimension: 12,
        specs: specs(&CODE9_SPECS, "U_G0"),
        codewords: Vec::new(),
    })
}

/// The 24 subsets `π^μ∘τ^ν(C_i) △ νB △ μτ^ν(A)`, ordered by `i`, then `μ`, then `ν`.
pub fn codeword_subsets() -> Vec<BTreeSet<Label>> {
    let (pi, tau) = seed_symmetries();
    let set = |v: &[Label]| v.iter().copied().collect::<BTreeSet<Label>>();
    let a = set(&[0, 2, 3]);
    let b = set(&[5, 1, 2]);
    let bases: [&[Label]; 6] = [
        &[],
        &[1, 2, 3, 9],
        &[1, 2, 7, 8],
        &[1, 2, 6, 7, 9],
        &[1, 3, 7, 8, 9],
        &[1, 3, 4, 6, 7, 9],
    ];
    let sym = |x: &BTreeSet<Label>, y: &BTreeSet<Label>| -> BTreeSet<Label> {
        x.symmetric_difference(y).copied().collect()
    };
    let mut out = Vec::with_capacity(24);
    for c in bases {
        let c = set(c);
        for mu in 0..2 {
            for nu in 0..2 {
                let t = |s: &BTreeSet<Label>| if nu == 1 { tau.apply_set(s) } else { s.clone() };
                let p = |s: &BTreeSet<Label>| if mu == 1 { pi.apply_set(s) } else { s.clone() };
                let mut s = p(&t(&c));
                if nu == 1 {
                    s = sym(&s, &b);
                }
                if mu == 1 {
                    s = sym(&s, &t(&a));
                }
                out.push(s);
            }
        }
    }
    out
}

/// Graph-independent part of the 10-qubit construction.
///
/// With `W = T_τ T_π Z_2` the encoder is `U_enc = D W`, where `D = Z_2 U_G` is
/// diagonal with `±1` entries. Every observable is `D (W O W†) D`.
pub struct Code10Base {
    inner: Vec<DenseOperator>,
    projector: Projector,
    /// `Tr(P0 X^x Z^z P0 (X^x Z^z)†)` for every `z`, keyed by X-masks of weight <= 2.
    purity: BTreeMap<usize, Vec<bool>>,
    /// `(x, z)` masks of every weight-1/2 error.
    errors: Vec<(usize, usize)>,
}

impl Code10Base {
    pub fn new() -> Result<Self> {
        let n = 10;
        let (pi, tau) = seed_symmetries();
        let empty = Graph::edgeless((0..10).collect())?;
        let z2 = DenseOperator::from_pauli(&PauliOperator::z_on(n, &[2])?)?;
        let w = build_t_controlled(5, &tau, n)?
            .mul(&build_t_controlled(0, &pi, n)?)?
            .mul(&z2)?;
        let wd = w.adjoint();
        let inner = CODE10_SPECS
            .iter()
            .map(|&(_, xs, v)| w.mul(&core_operator(&empty, xs, v)?)?.mul(&wd))
            .collect::<Result<Vec<_>>>()?;
        let projector = projector_from_involutions(&inner)?;
        let purity = purity_table(projector.operator(), 2);
        let errors = enumerate_errors(n, 2)?
            .iter()
            .map(|e| {
                let w = |v: &crate::pauli::BinaryVector| v.iter_ones().fold(0usize, |a, i| a | 1 << i);
                (w(e.x_mask()), w(e.z_mask()))
            })
            .collect();
        Ok(Self {
            inner,
            projector,
            purity,
            errors,
        })
    }

    pub fn base_projector(&self) -> &Projector {
        &self.projector
    }

    /// True iff `D P0 D` annihilates every weight-1/2 error sandwich for graph adjacency `adj`.
    pub fn is_pure_for(&self, adj: &[usize]) -> bool {
        self.errors.iter().all(|&(x, z)| {
            let gx = (0..adj.len())
                .filter(|&v| x >> v & 1 == 1)
                .fold(0, |acc, v| acc ^ adj[v]);
            self.purity[&x][z ^ gx]
        })
    }
}

/// `zero[x][z]` records `Tr(P E P E†) == 0` for `E = X^x Z^z`, all `z`, X-masks of weight <= `max_x`.
fn purity_table(p: &DenseOperator, max_x: u32) -> BTreeMap<usize, Vec<bool>> {
    let d = p.dim();
    let rows = p.sparse_rows();
    let xs: Vec<usize> = (0..d).filter(|x| x.count_ones() <= max_x).collect();
    xs.par_iter()
        .map(|&x| {
            // g(w) = sum_i P[i][i^w] P[i^w^x][i^x]; the transform over w gives every z
            let mut g = vec![Wide::default(); d];
            for (i, row) in rows.iter().enumerate() {
                for &(j, a) in row {
                    let j = j as usize;
                    g[i ^ j].mul_acc(a, p.numerator(j ^ x, i ^ x));
                }
            }
            walsh_hadamard(&mut g);
            (x, g.iter().map(|v| v.re == 0 && v.im == 0).collect())
        })
        .collect()
}

fn adjacency_words(g: &Graph) -> Vec<usize> {
    g.vertices()
        .iter()
        .map(|&v| g.neighbor_mask(v).expect("vertex").iter_ones().fold(0, |a, i| a | 1 << i))
        .collect()
}

/// `((10,24,3))` on the graph `g` with labels `0..=9`.
pub fn build_code10(g: &Graph) -> Result<SmallCode> {
    build_code10_with(&Code10Base::new()?, g)
}

pub fn build_code10_with(base: &Code10Base, g: &Graph) -> Result<SmallCode> {
    if g.vertices() != (0..10).collect::<Vec<Label>>().as_slice() {
        return Err(Error::InvalidGraph("expected vertices 0..=9 in order".into()));
    }
    let (pi, tau) = seed_symmetries();
    if !is_automorphism(g, &pi)? || !is_automorphism(g, &tau)? {
        return Err(Error::InvalidGraph("graph is not fixed by pi and tau".into()));
    }
    // D = Z_2 U_G
    let signs: Vec<bool> = graph_signs(g)
        .into_iter()
        .enumerate()
        .map(|(b, s)| s ^ (b >> 2 & 1 == 1))
        .collect();
    let observables: Vec<(VTag, DenseOperator)> = CODE10_SPECS
        .iter()
        .zip(&base.inner)
        .map(|(&(tag, _, _), op)| (tag, op.conjugate_by_signs(&signs)))
        .collect();
    let ops: Vec<DenseOperator> = observables.iter().map(|(_, o)| o.clone()).collect();
    let projector = projector_from_involutions(&ops)?;
    check_trace("P_1", projector.trace(), 24)?;
    check_trace("B0", &ops[3].trace(), 1 << 9)?;

    let codewords = codeword_subsets();
    let ug = build_ug(g)?;
    let graph_state = ug.apply(&Ket::plus(10)?)?;
    for (ci, c) in codewords.iter().enumerate() {
        let idx: Vec<usize> = c.iter().map(|&v| v as usize).collect();
        let ket = DenseOperator::from_pauli(&PauliOperator::z_on(10, &idx)?)?.apply(&graph_state)?;
        for (tag, op) in &observables {
            if op.apply(&ket)? != ket {
                return Err(Error::Construction(format!(
                    "codeword {ci} {c:?} is not stabilized by {}",
                    tag.name()
                )));
            }
        }
    }
    let factors = observables.iter().cloned().collect();
    Ok(SmallCode {
        kind: SeedKind::Code10,
        graph: g.clone(),
        observables,
        factors,
        projector,
        declared_dimension: 24,
        specs: specs(&CODE10_SPECS, "U_enc"),
        codewords,
    })
}

#[derive(Clone, Debug)]
pub struct Recovery {
    pub orbits: Vec<Vec<(Label, Label)>>,
    pub candidates: u64,
    /// Candidate indices (bit `j` selects orbit `j`) that give a pure distance-3 code, ascending.
    pub solutions: Vec<u64>,
}

impl Recovery {
    pub fn graph(&self, candidate: u64) -> Graph {
        graph_from_orbits(&self.orbits, candidate)
    }

    pub fn first(&self) -> Option<Graph> {
        self.solutions.first().map(|&c| self.graph(c))
    }
}

fn graph_from_orbits(orbits: &[Vec<(Label, Label)>], candidate: u64) -> Graph {
    let mut g = Graph::edgeless((0..10).collect()).expect("labels");
    for (j, orb) in orbits.iter().enumerate() {
        if candidate >> j & 1 == 1 {
            for &(a, b) in orb {
                g.add_edge(a, b).expect("orbit pair");
            }
        }
    }
    g
}

/// Exhaustive search over graphs on `0..=9` fixed by `π` and `τ`.
///
/// Commutation, the trace and codeword stabilization do not depend on the
/// graph, so candidates are filtered by the weight-2 purity table alone; with
/// `all = false` the search stops at the smallest successful index.
pub fn recover_graph10(all: bool) -> Result<Recovery> {
    let base = Code10Base::new()?;
    recover_graph10_with(&base, all)
}

pub fn recover_graph10_with(base: &Code10Base, all: bool) -> Result<Recovery> {
    let (pi, tau) = seed_symmetries();
    let vertices: Vec<Label> = (0..10).collect();
    let orbits = edge_orbits(&vertices, &[pi, tau]);
    let candidates = 1u64 << orbits.len();
    let orbit_masks: Vec<Vec<usize>> = orbits
        .iter()
        .map(|orb| {
            let mut adj = vec![0usize; 10];
            for &(a, b) in orb {
                adj[a as usize] |= 1 << b;
                adj[b as usize] |= 1 << a;
            }
            adj
        })
        .collect();
    let test = |c: u64| {
        let mut adj = [0usize; 10];
        for (j, m) in orbit_masks.iter().enumerate() {
            if c >> j & 1 == 1 {
                for v in 0..10 {
                    adj[v] ^= m[v];
                }
            }
        }
        base.is_pure_for(&adj)
    };
    let solutions: Vec<u64> = if all {
        (0..candidates).into_par_iter().filter(|&c| test(c)).collect()
    } else {
        (0..candidates)
            .into_par_iter()
            .find_first(|&c| test(c))
            .into_iter()
            .collect()
    };
    if solutions.is_empty() {
        return Err(Error::Construction(
            "no graph fixed by pi and tau yields a pure distance-3 code".into(),
        ));
    }
    Ok(Recovery {
        orbits,
        candidates,
        solutions,
    })
}

/// The frozen recovered graph from `data/g1.json`.
pub fn frozen_graph10() -> Result<Graph> {
    let j: GraphJson =
        serde_json::from_str(FROZEN_G1).map_err(|e| Error::Parse(e.to_string()))?;
    Graph::from_json(&j)
}

/// Adjacency words match the ones the purity filter uses.
pub fn graph_is_pure(base: &Code10Base, g: &Graph) -> bool {
    base.is_pure_for(&adjacency_words(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code9_reproduces() {
        let c = build_code9().unwrap();
        assert_eq!(c.projector.dimension(), 12.into());
        assert_eq!(c.factor(VTag::A0).unwrap().trace(), DyadicComplex::from_int(256));
        let alphas: Vec<_> = c.observables[..3].iter().map(|(_, o)| o).collect();
        for a in &alphas {
            for b in &alphas {
                assert!(a.commutes_with(b).unwrap());
            }
        }
        let r = crate::dense::kl_check(&c.projector, &c.distance_errors()).unwrap();
        assert_eq!(r.errors_checked, 351);
        assert!(r.all_pass && r.pure);
    }

    #[test]
    fn codeword_subsets_match_construction() {
        let cw = codeword_subsets();
        assert_eq!(cw.len(), 24);
        assert!(cw[0].is_empty());
        assert_eq!(cw[4], [1, 2, 3, 9].into_iter().collect());
        let distinct: BTreeSet<_> = cw.iter().collect();
        assert_eq!(distinct.len(), 24);
    }
}

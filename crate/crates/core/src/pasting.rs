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

//! Pasted codes on `U_m ∪ … ∪ U_1 ∪ V_a` and their exact trace engine.
//!
//! Every observable is a tensor product of one factor per block. Factors on
//! the `U` blocks are Pauli operators; factors on the last block are dense.
//! Writing `O_T` for the ordered product of the rows in `T`,
//!
//! ```text
//! Tr(P E P E†) = 4^{-R} Σ_{T,T'} Tr_U(u_T E u_T' E†) · Tr_V(v_T E v_T' E†)
//! ```
//!
//! and the `U` trace vanishes unless `u_T` and `u_T'` have equal masks, i.e.
//! `T ⊕ T'` lies in the kernel of the map from row subsets to `U` masks. The
//! sign picked up by conjugating `u_T'` is a character of `T'`, so each error
//! reduces to a table lookup after one Walsh–Hadamard transform per `V` part.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{
    pauli_words, projector_from_involutions, DenseOperator, DyadicComplex, Projector,
    SparseOperator, MAX_QUBITS,
};
use crate::error::{Error, Result};
use crate::gottesman;
use crate::pauli::{
    enumerate_errors, gf2_dependencies, BinaryVector, CompactPauli, Letter, PauliOperator,
};
use crate::small_codes::{self, SeedKind, SmallCode, VTag};

/// Length, dimension and the matching optimal stabilizer parameters of `D_(m,a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub m: usize,
    pub a: usize,
    pub n: usize,
    /// `K = 3 · 2^k_exp`.
    pub k_exp: usize,
    pub optimal_stabilizer_k: usize,
}

impl Params {
    pub fn dimension(&self) -> BigInt {
        BigInt::from(3u8) << self.k_exp
    }

    pub fn dimension_string(&self) -> String {
        format!("3*2^{}", self.k_exp)
    }
}

pub fn params(m: usize, a: usize) -> Result<Params> {
    if a > 1 {
        return Err(Error::InvalidArgument(format!("a must be 0 or 1, got {a}")));
    }
    if 2 * m + 5 >= 127 {
        return Err(Error::InvalidArgument(format!("m = {m} is too large")));
    }
    let p = 1u128 << (2 * m + 5);
    if (p - 5) % 3 != 0 {
        return Err(Error::Construction(format!("3 does not divide 2^{} - 5", 2 * m + 5)));
    }
    let n = usize::try_from((p - 5) / 3).map_err(|_| Error::Overflow)? + a;
    Ok(Params {
        m,
        a,
        n,
        k_exp: n - 2 * m - 7,
        optimal_stabilizer_k: n - 2 * m - 6,
    })
}

/// Formats a positive integer as `c*2^e` with `c` odd.
pub fn format_power_of_two(v: &BigInt) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let e = v.trailing_zeros().unwrap_or(0);
    format!("{}*2^{}", v >> e, e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: String,
    pub offset: usize,
    pub size: usize,
}

/// Contiguous qubit blocks; every block but the last carries Pauli factors,
/// the last one carries dense factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    blocks: Vec<Block>,
}

impl BlockLayout {
    pub fn new(blocks: &[(&str, usize)]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("layout needs at least one block".into()));
        }
        let mut offset = 0;
        let blocks = blocks
            .iter()
            .map(|&(name, size)| {
                let b = Block {
                    name: name.to_string(),
                    offset,
                    size,
                };
                offset += size;
                b
            })
            .collect();
        Ok(Self { blocks })
    }

    /// `U_m, …, U_1` with `|U_k| = 2^(2k+3)`, then `V_a` with `9 + a` qubits.
    pub fn for_code(m: usize, a: usize) -> Result<Self> {
        let names: Vec<(String, usize)> = (1..=m)
            .rev()
            .map(|k| (format!("U_{k}"), 1usize << (2 * k + 3)))
            .chain(std::iter::once((format!("V_{a}"), 9 + a)))
            .collect();
        let refs: Vec<(&str, usize)> = names.iter().map(|(s, n)| (s.as_str(), *n)).collect();
        Self::new(&refs)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn total_qubits(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Number of qubits on the Pauli blocks.
    pub fn pauli_qubits(&self) -> usize {
        self.dense_block().offset
    }

    pub fn dense_block(&self) -> &Block {
        self.blocks.last().expect("nonempty layout")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockFactor {
    Identity,
    Pauli(PauliOperator),
    /// Key into the code's dense factor table.
    Dense(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockObservable {
    pub factors: Vec<BlockFactor>,
    /// `+1` or `-1`.
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorJson {
    Pauli(CompactPauli),
    Named(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct PastedJson {
    pub m: Option<usize>,
    pub a: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K_num")]
    pub k_num: String,
    pub blocks: Vec<Block>,
    pub observables: Vec<Vec<FactorJson>>,
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug)]
pub struct PastedCode {
    pub m: Option<usize>,
    pub a: Option<usize>,
    layout: BlockLayout,
    observables: Vec<BlockObservable>,
    dense: BTreeMap<String, DenseOperator>,
}

impl PastedCode {
    /// Checks shapes, involutions and pairwise commutation.
    pub fn new(
        layout: BlockLayout,
        observables: Vec<BlockObservable>,
        dense: BTreeMap<String, DenseOperator>,
    ) -> Result<Self> {
        let nb = layout.blocks().len();
        let v = layout.dense_block();
        if observables.len() > 63 {
            return Err(Error::InvalidArgument(format!(
                "{} observables exceed the 63-row limit",
                observables.len()
            )));
        }
        for (name, op) in &dense {
            if op.num_qubits() != v.size {
                return Err(Error::DimensionMismatch {
                    expected: v.size,
                    got: op.num_qubits(),
                });
            }
            if !op.is_hermitian_involution()? {
                return Err(Error::Construction(format!(
                    "dense factor {name} is not a Hermitian involution"
                )));
            }
        }
        for (i, o) in observables.iter().enumerate() {
            if o.factors.len() != nb {
                return Err(Error::DimensionMismatch {
                    expected: nb,
                    got: o.factors.len(),
                });
            }
            if o.sign != 1 && o.sign != -1 {
                return Err(Error::InvalidArgument(format!("row {} has sign {}", i + 1, o.sign)));
            }
            for (b, f) in o.factors.iter().enumerate() {
                let block = &layout.blocks()[b];
                let last = b + 1 == nb;
                match f {
                    BlockFactor::Identity => {}
                    BlockFactor::Pauli(p) if !last => {
                        if p.n() != block.size {
                            return Err(Error::DimensionMismatch {
                                expected: block.size,
                                got: p.n(),
                            });
                        }
                        if !p.is_hermitian() || !p.multiply(p)?.is_identity() {
                            return Err(Error::Construction(format!(
                                "row {} is not an involution on block {}",
                                i + 1,
                                block.name
                            )));
                        }
                    }
                    BlockFactor::Dense(name) if last => {
                        if !dense.contains_key(name) {
                            return Err(Error::InvalidArgument(format!(
                                "unknown dense factor {name}"
                            )));
                        }
                    }
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "row {} has a factor of the wrong kind on block {}",
                            i + 1,
                            block.name
                        )))
                    }
                }
            }
        }
        let code = Self {
            m: None,
            a: None,
            layout,
            observables,
            dense,
        };
        code.check_commutation()?;
        Ok(code)
    }

    fn check_commutation(&self) -> Result<()> {
        let mut dense_cache: HashMap<(String, String), bool> = HashMap::new();
        for i in 0..self.observables.len() {
            for j in i + 1..self.observables.len() {
                let mut anti = Vec::new();
                for (b, (fi, fj)) in self.observables[i]
                    .factors
                    .iter()
                    .zip(&self.observables[j].factors)
                    .enumerate()
                {
                    let commute = match (fi, fj) {
                        (BlockFactor::Pauli(p), BlockFactor::Pauli(q)) => p.commutes(q)?,
                        (BlockFactor::Dense(p), BlockFactor::Dense(q)) => {
                            let key = (p.clone(), q.clone());
                            match dense_cache.get(&key) {
                                Some(&c) => c,
                                None => {
                                    let c = self.dense[p].commutation(&self.dense[q])?.ok_or_else(
                                        || {
                                            Error::Construction(format!(
                                                "rows {} and {} neither commute nor anticommute on block {}",
                                                i + 1,
                                                j + 1,
                                                self.layout.blocks()[b].name
                                            ))
                                        },
                                    )?;
                                    dense_cache.insert(key, c);
                                    c
                                }
                            }
                        }
                        _ => true,
                    };
                    if !commute {
                        anti.push(self.layout.blocks()[b].name.clone());
                    }
                }
                if anti.len() % 2 == 1 {
                    return Err(Error::Construction(format!(
                        "rows {} and {} anticommute (anticommuting blocks: {})",
                        i + 1,
                        j + 1,
                        anti.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn observables(&self) -> &[BlockObservable] {
        &self.observables
    }

    pub fn dense_factor(&self, name: &str) -> Result<&DenseOperator> {
        self.dense
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown dense factor {name}")))
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn rows(&self) -> usize {
        self.observables.len()
    }

    fn factor_trace(&self, b: usize, f: &BlockFactor) -> DyadicComplex {
        let size = self.layout.blocks()[b].size as i64;
        match f {
            BlockFactor::Identity => DyadicComplex::pow2(size),
            BlockFactor::Pauli(p) if p.is_scalar() => DyadicComplex::pow2(size).mul_i_pow(p.phase_exp()),
            BlockFactor::Pauli(_) => DyadicComplex::zero(),
            BlockFactor::Dense(name) => self.dense[name].trace(),
        }
    }

    /// Exact `Tr(O_i)` for the 0-based row `i`.
    pub fn row_trace(&self, i: usize) -> DyadicComplex {
        let o = &self.observables[i];
        let t = o
            .factors
            .iter()
            .enumerate()
            .fold(DyadicComplex::one(), |acc, (b, f)| acc.mul(&self.factor_trace(b, f)));
        if o.sign < 0 {
            t.neg()
        } else {
            t
        }
    }

    /// Each row as a dense operator on all qubits; only for small layouts.
    pub fn dense_observables(&self) -> Result<Vec<DenseOperator>> {
        let n = self.num_qubits();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { got: n, max: MAX_QUBITS });
        }
        self.observables
            .iter()
            .map(|o| {
                let mut acc: Option<DenseOperator> = None;
                for (b, f) in o.factors.iter().enumerate() {
                    let size = self.layout.blocks()[b].size;
                    let d = match f {
                        BlockFactor::Identity => DenseOperator::identity(size)?,
                        BlockFactor::Pauli(p) => DenseOperator::from_pauli(p)?,
                        BlockFactor::Dense(name) => self.dense[name].clone(),
                    };
                    acc = Some(match acc {
                        None => d,
                        Some(a) => a.tensor(&d)?,
                    });
                }
                let op = acc.expect("nonempty layout");
                Ok(if o.sign < 0 { op.neg() } else { op })
            })
            .collect()
    }

    pub fn dense_projector(&self) -> Result<Projector> {
        projector_from_involutions(&self.dense_observables()?)
    }

    pub fn to_json(&self, dimension: &BigInt) -> PastedJson {
        PastedJson {
            m: self.m,
            a: self.a,
            n: self.num_qubits(),
            k_num: format_power_of_two(dimension),
            blocks: self.layout.blocks().to_vec(),
            observables: self
                .observables
                .iter()
                .map(|o| {
                    o.factors
                        .iter()
                        .map(|f| match f {
                            BlockFactor::Identity => FactorJson::Named("identity".into()),
                            BlockFactor::Pauli(p) => FactorJson::Pauli(p.to_compact()),
                            BlockFactor::Dense(name) => FactorJson::Named(name.clone()),
                        })
                        .collect()
                })
                .collect(),
            signs: self.observables.iter().map(|o| o.sign).collect(),
        }
    }
}

fn seed_tags(kind: SeedKind) -> [VTag; 6] {
    match kind {
        SeedKind::Code9 => [VTag::Alpha1, VTag::Alpha2, VTag::Alpha3, VTag::A1, VTag::A2, VTag::A0],
        SeedKind::Code10 => [VTag::Beta1, VTag::Beta2, VTag::Beta3, VTag::B1, VTag::B2, VTag::B0],
    }
}

/// Builds the `2m+6` observables of `D_(m,a)` over the given seed code.
pub fn assemble_with(m: usize, seed: &SmallCode) -> Result<PastedCode> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be >= 1; m = 0 is the seed code".into()));
    }
    let a = match seed.kind {
        SeedKind::Code9 => 0,
        SeedKind::Code10 => 1,
    };
    let layout = BlockLayout::for_code(m, a)?;
    let rows = 2 * m + 6;
    let mut obs: Vec<BlockObservable> = (0..rows)
        .map(|_| BlockObservable {
            factors: vec![BlockFactor::Identity; m + 1],
            sign: 1,
        })
        .collect();
    for r in (1..=m).rev() {
        let col = m - r;
        let g = gottesman::generators(r)?;
        let first = 2 * (m - r) + 1;
        obs[first - 1].factors[col] = BlockFactor::Pauli(g.generators[0].clone());
        obs[first].factors[col] = BlockFactor::Pauli(g.generators[1].clone());
        for j in first + 2..=2 * m + 5 {
            let k = j - 2 * (m - r) - 2;
            let s = gottesman::s_generator(&g, k).clone();
            obs[j - 1].factors[col] = BlockFactor::Pauli(s);
        }
    }
    let mut dense = BTreeMap::new();
    for (i, tag) in seed_tags(seed.kind).into_iter().enumerate() {
        obs[2 * m + i].factors[m] = BlockFactor::Dense(tag.name().to_string());
        dense.insert(tag.name().to_string(), seed.factor(tag)?.clone());
    }
    let mut code = PastedCode::new(layout, obs, dense)?;
    code.m = Some(m);
    code.a = Some(a);
    Ok(code)
}

/// Builds `D_(m,a)`, constructing the seed code on the way.
pub fn assemble(m: usize, a: usize) -> Result<PastedCode> {
    let seed = match a {
        0 => small_codes::build_code9()?,
        1 => small_codes::build_code10(&small_codes::frozen_graph10()?)?,
        _ => return Err(Error::InvalidArgument(format!("a must be 0 or 1, got {a}"))),
    };
    assemble_with(m, &seed)
}

/// Weight-≤2 error given by its support and letters, in enumeration order.
#[derive(Clone, Copy, Debug)]
struct ErrorSpec {
    qubits: [usize; 2],
    letters: [Letter; 2],
    weight: usize,
}

impl ErrorSpec {
    fn to_pauli(self, n: usize) -> Result<PauliOperator> {
        let mut p = PauliOperator::identity(n);
        for w in 0..self.weight {
            p = p.multiply(&PauliOperator::single(n, self.qubits[w], self.letters[w])?)?;
        }
        Ok(p.with_phase(0))
    }
}

fn letter_bits(l: Letter) -> (bool, bool) {
    match l {
        Letter::I => (false, false),
        Letter::X => (true, false),
        Letter::Y => (true, true),
        Letter::Z => (false, true),
    }
}

fn error_specs(n: usize, max_weight: usize) -> Vec<ErrorSpec> {
    const L: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
    let mut out = Vec::new();
    if max_weight >= 1 {
        for q in 0..n {
            for l in L {
                out.push(ErrorSpec {
                    qubits: [q, 0],
                    letters: [l, Letter::I],
                    weight: 1,
                });
            }
        }
    }
    if max_weight >= 2 {
        for q1 in 0..n {
            for q2 in q1 + 1..n {
                for l1 in L {
                    for l2 in L {
                        out.push(ErrorSpec {
                            qubits: [q1, q2],
                            letters: [l1, l2],
                            weight: 2,
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PastedReport {
    pub n: usize,
    pub max_weight: usize,
    pub errors_checked: usize,
    /// Errors with `Tr(P E P E†) ≠ 0`.
    pub violations: Vec<String>,
    /// The subset of `violations` for which `P E P` is not a multiple of `P` either.
    pub kl_failures: Vec<String>,
}

impl PastedReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Precomputed subset products shared by every trace evaluation.
pub struct TraceEngine<'a> {
    code: &'a PastedCode,
    rows: usize,
    n_u: usize,
    n_v: usize,
    u_rows: Vec<PauliOperator>,
    /// Per Pauli-block qubit: rows with an X (resp. Z) component there.
    x_rows: Vec<u64>,
    z_rows: Vec<u64>,
    /// Subset `T` of rows to index of the dense product `v_T`.
    v_index: Vec<usize>,
    v_products: Vec<SparseOperator>,
    v_traces: Vec<DyadicComplex>,
    /// Row subsets whose Pauli parts multiply to a scalar.
    kernel: Vec<usize>,
    /// `u_T` phase and sign for `T` in the kernel: `s_T · i^p`.
    kernel_phase: Vec<u8>,
    /// For each `T'` and kernel element `k`: (`i`-power, pair index) of `T = T' ⊕ k`.
    terms: Vec<Vec<(u8, usize)>>,
    /// Distinct `(v_T, v_T')` pairs needed.
    pairs: Vec<(usize, usize)>,
    /// `u_T` for every row subset.
    u_products: Vec<PauliOperator>,
}

impl<'a> TraceEngine<'a> {
    pub fn new(code: &'a PastedCode) -> Result<Self> {
        let layout = code.layout();
        let rows = code.rows();
        let n_u = layout.pauli_qubits();
        let n_v = layout.dense_block().size;
        let nb = layout.blocks().len();
        let u_rows: Vec<PauliOperator> = code
            .observables()
            .iter()
            .map(|o| {
                o.factors[..nb - 1]
                    .iter()
                    .enumerate()
                    .fold(PauliOperator::identity(0), |acc, (b, f)| match f {
                        BlockFactor::Pauli(p) => acc.tensor(p),
                        _ => acc.tensor(&PauliOperator::identity(layout.blocks()[b].size)),
                    })
            })
            .collect();
        let mut x_rows = vec![0u64; n_u];
        let mut z_rows = vec![0u64; n_u];
        for (i, u) in u_rows.iter().enumerate() {
            for q in u.x_mask().iter_ones() {
                x_rows[q] |= 1 << i;
            }
            for q in u.z_mask().iter_ones() {
                z_rows[q] |= 1 << i;
            }
        }
        let signs: Vec<bool> = code.observables().iter().map(|o| o.sign < 0).collect();
        let sign_of = |t: usize| (0..rows).filter(|&i| t >> i & 1 == 1 && signs[i]).count() % 2 == 1;

        // dense products over rows with a dense factor
        let v_rows: Vec<usize> = (0..rows)
            .filter(|&i| matches!(code.observables()[i].factors[nb - 1], BlockFactor::Dense(_)))
            .collect();
        let v_index: Vec<usize> = (0..1usize << rows)
            .map(|t| {
                v_rows
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| t >> r & 1 == 1)
                    .fold(0, |acc, (bit, _)| acc | 1 << bit)
            })
            .collect();
        let mut dense_products = vec![DenseOperator::identity(n_v)?];
        for &r in &v_rows {
            let f = match &code.observables()[r].factors[nb - 1] {
                BlockFactor::Dense(name) => code.dense_factor(name)?,
                _ => unreachable!("filtered above"),
            };
            let next: Vec<DenseOperator> = dense_products
                .par_iter()
                .map(|p| p.mul(f))
                .collect::<Result<_>>()?;
            dense_products.extend(next);
        }
        let v_traces = dense_products.iter().map(DenseOperator::trace).collect();
        let v_products = dense_products.iter().map(DenseOperator::to_sparse).collect();
        drop(dense_products);

        // kernel of T -> masks of u_T
        let vecs: Vec<BinaryVector> = u_rows.iter().map(|u| u.x_mask().concat(u.z_mask())).collect();
        let basis: Vec<usize> = gf2_dependencies(&vecs)
            .iter()
            .map(|d| d.iter_ones().fold(0usize, |acc, i| acc | 1 << i))
            .collect();
        let mut kernel = vec![0usize];
        for b in basis {
            let more: Vec<usize> = kernel.iter().map(|k| k ^ b).collect();
            kernel.extend(more);
        }
        kernel.sort_unstable();

        let mut u_products = vec![PauliOperator::identity(n_u)];
        for t in 1..1usize << rows {
            let top = usize::BITS as usize - 1 - t.leading_zeros() as usize;
            let p = u_products[t ^ (1 << top)].multiply(&u_rows[top])?;
            u_products.push(p);
        }
        let kernel_phase = kernel
            .iter()
            .map(|&k| {
                let u = &u_products[k];
                debug_assert!(u.is_scalar());
                (u.phase_exp() + if sign_of(k) { 2 } else { 0 }) % 4
            })
            .collect();

        let mut pair_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = Vec::new();
        let mut terms = Vec::with_capacity(1 << rows);
        for tp in 0..1usize << rows {
            let mut row = Vec::with_capacity(kernel.len());
            for &k in &kernel {
                let t = tp ^ k;
                let prod = u_products[t].multiply(&u_products[tp])?;
                if !prod.is_scalar() {
                    return Err(Error::Construction("kernel element with nonscalar product".into()));
                }
                let power = (prod.phase_exp() + if sign_of(t) != sign_of(tp) { 2 } else { 0 }) % 4;
                let key = (v_index[t], v_index[tp]);
                let id = *pair_ids.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    pairs.len() - 1
                });
                row.push((power, id));
            }
            terms.push(row);
        }
        Ok(Self {
            code,
            rows,
            n_u,
            n_v,
            u_rows,
            x_rows,
            z_rows,
            v_index,
            v_products,
            v_traces,
            kernel,
            kernel_phase,
            terms,
            pairs,
            u_products,
        })
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel.len()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// `Tr(P)` from the kernel terms only.
    pub fn trace_projector(&self) -> DyadicComplex {
        let mut acc = DyadicComplex::zero();
        for (&k, &ph) in self.kernel.iter().zip(&self.kernel_phase) {
            acc = acc.add(&self.v_traces[self.v_index[k]].mul_i_pow(ph));
        }
        acc.mul(&DyadicComplex::pow2(self.n_u as i64 - self.rows as i64))
    }

    /// `Tr(P)` summed over every row subset, without the kernel shortcut.
    pub fn trace_projector_unpruned(&self) -> Result<DyadicComplex> {
        let mut acc = DyadicComplex::zero();
        let u = &self.u_products;
        let obs = self.code.observables();
        for (t, ut) in u.iter().enumerate() {
            if !ut.is_scalar() {
                continue;
            }
            let neg = (0..self.rows).filter(|&i| t >> i & 1 == 1 && obs[i].sign < 0).count() % 2;
            let v = self.v_traces[self.v_index[t]].mul_i_pow(ut.phase_exp() + 2 * neg as u8);
            acc = acc.add(&v);
        }
        Ok(acc.mul(&DyadicComplex::pow2(self.n_u as i64 - self.rows as i64)))
    }

    /// `W[e][p] = Tr(v_t E v_t' E†)` for every `V` part `e` and every needed pair `p`.
    fn v_pair_traces(&self, parts: &[(usize, usize)]) -> Vec<Vec<DyadicComplex>> {
        let mut by_x: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (e, &(x, z)) in parts.iter().enumerate() {
            by_x.entry(x).or_default().push((e, z));
        }
        let mut by_second: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (p, &(_, t2)) in self.pairs.iter().enumerate() {
            by_second.entry(t2).or_default().push(p);
        }
        let groups: Vec<(usize, Vec<usize>)> = by_second.into_iter().collect();
        let cells: Vec<Vec<(usize, usize, DyadicComplex)>> = groups
            .par_iter()
            .map(|(t2, ps)| {
                let bt = self.v_products[*t2].to_dense_transpose();
                let mut out = Vec::new();
                for &p in ps {
                    let a = &self.v_products[self.pairs[p].0];
                    for (&x, zs) in &by_x {
                        let spec = a.conjugated_trace_spectrum(x, &bt);
                        for &(e, z) in zs {
                            out.push((e, p, spec.get(z)));
                        }
                    }
                }
                out
            })
            .collect();
        let mut w = vec![vec![DyadicComplex::zero(); self.pairs.len()]; parts.len()];
        for (e, p, v) in cells.into_iter().flatten() {
            w[e][p] = v;
        }
        w
    }

    /// `Φ(χ)` for every row character `χ`, given the pair traces of one `V` part.
    fn character_table(&self, w: &[DyadicComplex]) -> Vec<DyadicComplex> {
        let mut f: Vec<DyadicComplex> = self
            .terms
            .iter()
            .map(|row| {
                row.iter()
                    .fold(DyadicComplex::zero(), |acc, &(ph, p)| acc.add(&w[p].mul_i_pow(ph)))
            })
            .collect();
        let n = f.len();
        let mut h = 1;
        while h < n {
            for i in (0..n).step_by(2 * h) {
                for j in i..i + h {
                    let (a, b) = (f[j].clone(), f[j + h].clone());
                    f[j] = a.add(&b);
                    f[j + h] = a.sub(&b);
                }
            }
            h *= 2;
        }
        f
    }

    fn scale(&self) -> DyadicComplex {
        DyadicComplex::pow2(self.n_u as i64 - 2 * self.rows as i64)
    }

    fn split(&self, e: &PauliOperator) -> Result<(usize, (usize, usize))> {
        if e.n() != self.n_u + self.n_v {
            return Err(Error::DimensionMismatch {
                expected: self.n_u + self.n_v,
                got: e.n(),
            });
        }
        let eu = e.restrict(0, self.n_u);
        let mut chi = 0usize;
        for (i, u) in self.u_rows.iter().enumerate() {
            if eu.symplectic(u)? {
                chi |= 1 << i;
            }
        }
        Ok((chi, pauli_words(&e.restrict(self.n_u, self.n_v))))
    }

    /// Exact `Tr(P E)`.
    pub fn trace_pe(&self, e: &PauliOperator) -> Result<DyadicComplex> {
        let (_, (x, z)) = self.split(e)?;
        let eu = e.restrict(0, self.n_u).with_phase(0);
        let obs = self.code.observables();
        let mut acc = DyadicComplex::zero();
        for (t, u) in self.u_products.iter().enumerate() {
            let prod = u.multiply(&eu)?;
            if !prod.is_scalar() {
                continue;
            }
            let neg = (0..self.rows).filter(|&i| t >> i & 1 == 1 && obs[i].sign < 0).count() % 2;
            let v = self.v_products[self.v_index[t]].trace_with_masks(x, z);
            acc = acc.add(&v.mul_i_pow(prod.phase_exp() + e.phase_exp() + 2 * neg as u8));
        }
        Ok(acc.mul(&DyadicComplex::pow2(self.n_u as i64 - self.rows as i64)))
    }

    /// Whether `P E P = c P` for some scalar `c`, via `K · Tr(P E P E†) = |Tr(P E)|²`.
    pub fn satisfies_kl(&self, e: &PauliOperator) -> Result<bool> {
        let pep = self.trace_pep(e)?;
        self.kl_given(e, &pep, &self.trace_projector())
    }

    fn kl_given(&self, e: &PauliOperator, pep: &DyadicComplex, k: &DyadicComplex) -> Result<bool> {
        Ok(pep.mul(k) == self.trace_pe(e)?.norm_sqr())
    }

    /// Exact `Tr(P E P E†)` for one Pauli error of any weight.
    pub fn trace_pep(&self, e: &PauliOperator) -> Result<DyadicComplex> {
        let (chi, part) = self.split(e)?;
        let w = self.v_pair_traces(&[part]);
        let phi = self.character_table(&w[0]);
        Ok(phi[chi].mul(&self.scale()))
    }

    /// `Tr(P E P E†)` as the full double sum over row subsets, with every `V` trace evaluated.
    pub fn trace_pep_unpruned(&self, e: &PauliOperator) -> Result<DyadicComplex> {
        let (_, (x, z)) = self.split(e)?;
        let eu = e.restrict(0, self.n_u).with_phase(0);
        let nv = self.v_products.len();
        let w: Vec<Vec<DyadicComplex>> = {
            let cols: Vec<Vec<DyadicComplex>> = (0..nv)
                .into_par_iter()
                .map(|t2| {
                    let bt = self.v_products[t2].to_dense_transpose();
                    (0..nv)
                        .map(|t1| self.v_products[t1].trace_conjugated_product_t(x, z, &bt))
                        .collect()
                })
                .collect();
            (0..nv).map(|t1| (0..nv).map(|t2| cols[t2][t1].clone()).collect()).collect()
        };
        let obs = self.code.observables();
        let u = &self.u_products;
        let neg = |t: usize| (0..self.rows).filter(|&i| t >> i & 1 == 1 && obs[i].sign < 0).count() % 2 == 1;
        let mut acc = DyadicComplex::zero();
        for (t1, u1) in u.iter().enumerate() {
            for (t2, u2) in u.iter().enumerate() {
                let prod = u1.multiply(u2)?;
                if !prod.is_scalar() {
                    continue;
                }
                let mut ph = prod.phase_exp();
                if eu.symplectic(u2)? {
                    ph += 2;
                }
                if neg(t1) != neg(t2) {
                    ph += 2;
                }
                acc = acc.add(&w[self.v_index[t1]][self.v_index[t2]].mul_i_pow(ph));
            }
        }
        Ok(acc.mul(&self.scale()))
    }

    /// Exact `Tr(P E P E†)` for every error of weight `1..=max_weight`, in enumeration order.
    pub fn trace_table(&self, max_weight: usize) -> Result<Vec<(PauliOperator, DyadicComplex)>> {
        let n = self.n_u + self.n_v;
        let specs = error_specs(n, max_weight);
        let keys = self.error_keys(&specs);
        let (parts, buckets) = self.bucket(&keys, max_weight)?;
        let w = self.v_pair_traces(&parts);
        let mut values: Vec<Option<DyadicComplex>> = vec![None; specs.len()];
        let computed: Vec<Vec<(usize, DyadicComplex)>> = buckets
            .par_iter()
            .zip(w.par_iter())
            .map(|(idx, we)| {
                let phi = self.character_table(we);
                idx.iter().map(|&i| (i, phi[keys[i].0].mul(&self.scale()))).collect()
            })
            .collect();
        for (i, v) in computed.into_iter().flatten() {
            values[i] = Some(v);
        }
        specs
            .iter()
            .zip(values)
            .map(|(s, v)| Ok((s.to_pauli(n)?, v.expect("every error bucketed"))))
            .collect()
    }

    fn error_keys(&self, specs: &[ErrorSpec]) -> Vec<(usize, (usize, usize))> {
        specs
            .iter()
            .map(|s| {
                let mut chi = 0u64;
                let (mut xv, mut zv) = (0usize, 0usize);
                for w in 0..s.weight {
                    let (q, (bx, bz)) = (s.qubits[w], letter_bits(s.letters[w]));
                    if q < self.n_u {
                        if bx {
                            chi ^= self.z_rows[q];
                        }
                        if bz {
                            chi ^= self.x_rows[q];
                        }
                    } else {
                        let lq = q - self.n_u;
                        if bx {
                            xv |= 1 << lq;
                        }
                        if bz {
                            zv |= 1 << lq;
                        }
                    }
                }
                (chi as usize, (xv, zv))
            })
            .collect()
    }

    fn bucket(
        &self,
        keys: &[(usize, (usize, usize))],
        max_weight: usize,
    ) -> Result<(Vec<(usize, usize)>, Vec<Vec<usize>>)> {
        let mut parts = vec![(0usize, 0usize)];
        parts.extend(
            enumerate_errors(self.n_v, max_weight.min(self.n_v))?
                .iter()
                .map(pauli_words),
        );
        let index: HashMap<(usize, usize), usize> =
            parts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut buckets = vec![Vec::new(); parts.len()];
        for (i, (_, part)) in keys.iter().enumerate() {
            buckets[index[part]].push(i);
        }
        Ok((parts, buckets))
    }

    /// Pure distance-3 check: every error of weight `1..=max_weight` has `Tr(P E P E†) = 0`.
    pub fn verify_pure(&self, max_weight: usize) -> Result<PastedReport> {
        if !(1..=2).contains(&max_weight) {
            return Err(Error::InvalidArgument(format!(
                "max_weight must be 1 or 2, got {max_weight}"
            )));
        }
        let n = self.n_u + self.n_v;
        let specs = error_specs(n, max_weight);
        let keys = self.error_keys(&specs);
        let (parts, buckets) = self.bucket(&keys, max_weight)?;
        let w = self.v_pair_traces(&parts);
        let mut bad: Vec<(usize, DyadicComplex)> = buckets
            .par_iter()
            .zip(w.par_iter())
            .flat_map_iter(|(idx, we)| {
                let phi = self.character_table(we);
                idx.iter()
                    .filter(|&&i| !phi[keys[i].0].is_zero())
                    .map(|&i| (i, phi[keys[i].0].mul(&self.scale())))
                    .collect::<Vec<_>>()
            })
            .collect();
        bad.sort_unstable_by_key(|(i, _)| *i);
        let k = self.trace_projector();
        let kl: Vec<(PauliOperator, bool)> = bad
            .par_iter()
            .map(|(i, pep)| {
                let e = specs[*i].to_pauli(n)?;
                let ok = self.kl_given(&e, pep, &k)?;
                Ok((e, ok))
            })
            .collect::<Result<_>>()?;
        let (bad, kl_ok): (Vec<PauliOperator>, Vec<bool>) = kl.into_iter().unzip();
        let kl_failures = bad
            .iter()
            .zip(&kl_ok)
            .filter(|(_, &ok)| !ok)
            .map(|(e, _)| e.to_string())
            .collect();
        Ok(PastedReport {
            n,
            max_weight,
            errors_checked: specs.len(),
            violations: bad.iter().map(PauliOperator::to_string).collect(),
            kl_failures,
        })
    }
}

/// Exact `Tr(P)`, cross-checked between the kernel shortcut and the full subset sum.
pub fn code_dimension(code: &PastedCode) -> Result<BigRational> {
    let engine = TraceEngine::new(code)?;
    let fast = engine.trace_projector();
    let full = engine.trace_projector_unpruned()?;
    if fast != full {
        return Err(Error::Construction(format!(
            "dimension mismatch between kernel sum {fast} and full sum {full}"
        )));
    }
    fast.to_real_rational()
        .ok_or_else(|| Error::Construction(format!("Tr(P) = {fast} is not real")))
}

/// Checks the dimension against the closed form for `D_(m,a)`.
pub fn check_dimension(code: &PastedCode) -> Result<BigInt> {
    let k = code_dimension(code)?;
    if let (Some(m), Some(a)) = (code.m, code.a) {
        let expected = params(m, a)?.dimension();
        if k != BigRational::from_integer(expected.clone()) {
            return Err(Error::Construction(format!("Tr(P) = {k}, expected {expected}")));
        }
    }
    if !k.is_integer() || k < BigRational::one() {
        return Err(Error::Construction(format!("Tr(P) = {k} is not a positive integer")));
    }
    Ok(k.to_integer())
}

pub fn verify_distance3_pure(code: &PastedCode, max_weight: usize) -> Result<PastedReport> {
    TraceEngine::new(code)?.verify_pure(max_weight)
}

/// A 9-qubit two-block code small enough for dense evaluation.
///
/// The Pauli parts have a nontrivial kernel, one row carries a minus sign and
/// several rows anticommute blockwise, so every branch of the engine is used.
pub fn toy_code() -> Result<PastedCode> {
    let g = crate::graph::cycle_graph(5)?;
    let d = crate::dense::build_ug(&g)?;
    let pauli = |s: &str| format!("i^0 {s}").parse::<PauliOperator>();
    let dense_of = |s: &str| -> Result<DenseOperator> {
        let p = pauli(s)?;
        d.mul(&DenseOperator::from_pauli(&p)?)?.mul(&d)
    };
    let rows: [(&str, Option<&str>, i8); 8] = [
        ("XXXX", None, 1),
        ("ZZZZ", None, 1),
        ("XXII", Some("XIIII"), 1),
        ("IZZI", Some("ZIIII"), 1),
        ("IIII", Some("IXXII"), 1),
        ("ZIZI", Some("ZIIZI"), -1),
        ("IIXX", Some("XIIIY"), 1),
        ("IIII", Some("IZZII"), 1),
    ];
    let layout = BlockLayout::new(&[("U", 4), ("V", 5)])?;
    let mut dense = BTreeMap::new();
    let mut obs = Vec::new();
    for (u, v, sign) in rows {
        let pu = pauli(u)?;
        let fu = if pu.is_identity() {
            BlockFactor::Identity
        } else {
            BlockFactor::Pauli(pu)
        };
        let fv = match v {
            None => BlockFactor::Identity,
            Some(s) => {
                dense.insert(s.to_string(), dense_of(s)?);
                BlockFactor::Dense(s.to_string())
            }
        };
        obs.push(BlockObservable {
            factors: vec![fu, fv],
            sign,
        });
    }
    PastedCode::new(layout, obs, dense)
}

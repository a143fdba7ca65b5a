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

//! Symbolic n-qubit Pauli algebra over the GF(2) symplectic representation.
//!
//! A [`PauliOperator`] is stored as `i^k · X^x · Z^z` with packed bit masks.
//! Qubit 0 is the lowest bit of the first word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Packed GF(2) vector of fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Result<Self> {
        let mut v = Self::zeros(len);
        for i in ones {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, n: len });
            }
            v.flip(i);
        }
        Ok(v)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Low `len` bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.mask_tail();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors of different length");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Number of positions set in both vectors.
    pub fn and_weight(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &Self) -> bool {
        self.and_weight(other) % 2 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let mut out = Self::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// `self` in the low positions followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Big-endian hex of the mask read as an integer, fixed width `ceil(len/4)`.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut nib = 0u32;
                for b in 0..4 {
                    let i = d * 4 + b;
                    if i < self.len && self.get(i) {
                        nib |= 1 << b;
                    }
                }
                char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let mut v = Self::zeros(len);
        for (d, c) in hex.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= len {
                        return Err(Error::Parse(format!("hex mask exceeds {len} bits")));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }

    fn mask_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
        let n = self.len.div_ceil(WORD);
        self.words.truncate(n);
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// `i^phase_exp · X^x_mask · Z^z_mask` on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    x: BinaryVector,
    z: BinaryVector,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BinaryVector::zeros(n),
            z: BinaryVector::zeros(n),
            phase: 0,
        }
    }

    pub fn from_masks(x: BinaryVector, z: BinaryVector, phase_exp: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(Self {
            x,
            z,
            phase: phase_exp % 4,
        })
    }

    /// `X` on every listed qubit.
    pub fn x_on(n: usize, qubits: &[usize]) -> Result<Self> {
        Self::from_masks(
            BinaryVector::from_ones(n, qubits.iter().copied())?,
            BinaryVector::zeros(n),
            0,
        )
    }

    /// `Z` on every listed qubit.
    pub fn z_on(n: usize, qubits: &[usize]) -> Result<Self> {
        Self::from_masks(
            BinaryVector::zeros(n),
            BinaryVector::from_ones(n, qubits.iter().copied())?,
            0,
        )
    }

    /// One letter on one qubit, phase 0 (`Y` is stored as `XZ`).
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Result<Self> {
        if qubit >= n {
            return Err(Error::IndexOutOfRange { index: qubit, n });
        }
        let mut p = Self::identity(n);
        let (bx, bz) = letter.bits();
        p.x.set(qubit, bx);
        p.z.set(qubit, bz);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_mask(&self) -> &BinaryVector {
        &self.x
    }

    pub fn z_mask(&self) -> &BinaryVector {
        &self.z
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase_exp: u8) -> Self {
        self.phase = phase_exp % 4;
        self
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        Ok(())
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        // Z^{z_p} X^{x_q} = (-1)^{z_p . x_q} X^{x_q} Z^{z_p}
        let swap = (2 * (other.x.and_weight(&self.z) % 2)) as u8;
        Ok(Self {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: (self.phase + other.phase + swap) % 4,
        })
    }

    /// Symplectic product `x_p.z_q + x_q.z_p` over GF(2); `true` means anticommuting.
    pub fn symplectic(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok((self.x.and_weight(&other.z) + other.x.and_weight(&self.z)) % 2 == 1)
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(!self.symplectic(other)?)
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).weight()
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).iter_ones().collect()
    }

    /// True when both masks vanish, whatever the phase.
    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.phase == 0
    }

    fn y_count(&self) -> usize {
        self.x.and_weight(&self.z)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + 4 - self.y_count() % 4) % 2 == 0
    }

    pub fn adjoint(&self) -> Self {
        let ph = (4 - self.phase as usize + 2 * self.y_count()) % 4;
        Self {
            x: self.x.clone(),
            z: self.z.clone(),
            phase: ph as u8,
        }
    }

    /// Tensor product with `self` on the low qubits and `other` above it.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: (self.phase + other.phase) % 4,
        }
    }

    /// Restriction to qubits `[start, start + len)`, phase 0.
    pub fn restrict(&self, start: usize, len: usize) -> Self {
        Self {
            x: self.x.slice(start, len),
            z: self.z.slice(start, len),
            phase: 0,
        }
    }

    /// Phase of the leading scalar when the operator is written with Hermitian `Y = iXZ` letters.
    pub fn letter_phase(&self) -> u8 {
        ((self.phase as usize + 4 * self.n() - self.y_count()) % 4) as u8
    }

    pub fn to_compact(&self) -> CompactPauli {
        CompactPauli {
            n: self.n(),
            x: self.x.to_hex(),
            z: self.z.to_hex(),
            phase: self.phase,
        }
    }

    pub fn from_compact(c: &CompactPauli) -> Result<Self> {
        Self::from_masks(
            BinaryVector::from_hex(c.n, &c.x)?,
            BinaryVector::from_hex(c.n, &c.z)?,
            c.phase,
        )
    }
}

/// JSON form of a Pauli: hex masks plus the raw phase exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactPauli {
    pub n: usize,
    pub x: String,
    pub z: String,
    pub phase: u8,
}

impl fmt::Display for PauliOperator {
    /// `i^k ` followed by one letter per qubit, where `Y` is the Hermitian `iXZ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i^{} ", self.letter_phase())?;
        for q in 0..self.n() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix("i^")
            .ok_or_else(|| Error::Parse(format!("missing phase prefix in {s:?}")))?;
        let (k, letters) = rest
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("missing separator in {s:?}")))?;
        let k: u8 = k
            .parse()
            .map_err(|_| Error::Parse(format!("bad phase {k:?}")))?;
        if k > 3 {
            return Err(Error::Parse(format!("phase {k} out of range")));
        }
        let n = letters.chars().count();
        let mut x = BinaryVector::zeros(n);
        let mut z = BinaryVector::zeros(n);
        let mut ny = 0usize;
        for (q, c) in letters.chars().enumerate() {
            let letter = match c {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(Error::Parse(format!("bad letter {c:?}"))),
            };
            let (bx, bz) = letter.bits();
            x.set(q, bx);
            z.set(q, bz);
            ny += usize::from(letter == Letter::Y);
        }
        Self::from_masks(x, z, ((k as usize + ny) % 4) as u8)
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let w = c.len();
    for i in (0..w).rev() {
        if c[i] < n - w + i {
            c[i] += 1;
            for j in i + 1..w {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of non-identity Paulis of weight `1..=max_weight` on `n` qubits.
pub fn error_count(n: usize, max_weight: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut pow3 = 1u128;
    for w in 1..=max_weight.min(n) {
        binom = binom * (n - w + 1) as u128 / w as u128;
        pow3 *= 3;
        total += binom * pow3;
    }
    total
}

/// All non-identity Paulis of weight at most `max_weight` with phase 0.
///
/// Ordered by weight, then by ascending support tuple, then by letters with
/// `X < Y < Z` and the last support qubit varying fastest.
pub fn enumerate_errors(n: usize, max_weight: usize) -> Result<Vec<PauliOperator>> {
    if max_weight > n {
        return Err(Error::InvalidArgument(format!(
            "max_weight {max_weight} exceeds qubit count {n}"
        )));
    }
    let mut out = Vec::with_capacity(error_count(n, max_weight) as usize);
    const LETTERS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
    for w in 1..=max_weight {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            let combos = 3usize.pow(w as u32);
            for code in 0..combos {
                let mut p = PauliOperator::identity(n);
                let mut c = code;
                for &q in support.iter().rev() {
                    let (bx, bz) = LETTERS[c % 3].bits();
                    c /= 3;
                    p.x.set(q, bx);
                    p.z.set(q, bz);
                }
                out.push(p);
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Ok(out)
}


/// Rank over GF(2) of a set of equal-length vectors.
pub fn gf2_rank(rows: &[BinaryVector]) -> usize {
    reduce_rows(rows).0.len()
}

/// Basis of all index subsets `c` with `XOR_{i in c} rows[i] = 0`, each as a mask over row indices.
pub fn gf2_dependencies(rows: &[BinaryVector]) -> Vec<BinaryVector> {
    reduce_rows(rows).1
}

/// Echelon pivots plus the dependency basis found on the way.
fn reduce_rows(rows: &[BinaryVector]) -> (Vec<(usize, BinaryVector, BinaryVector)>, Vec<BinaryVector>) {
    let m = rows.len();
    let mut pivots: Vec<(usize, BinaryVector, BinaryVector)> = Vec::new();
    let mut deps = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        let mut combo = BinaryVector::zeros(m);
        combo.set(i, true);
        for (col, pv, pc) in &pivots {
            if v.get(*col) {
                v.xor_assign(pv);
                combo.xor_assign(pc);
            }
        }
        let lead = v.iter_ones().next();
        match lead {
            Some(col) => pivots.push((col, v, combo)),
            None => deps.push(combo),
        }
    }
    (pivots, deps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn involution_and_anticommutation() {
        let x = p("i^0 X");
        let z = p("i^0 Z");
        assert!(x.multiply(&x).unwrap().is_identity());
        let zx = z.multiply(&x).unwrap();
        let xz = x.multiply(&z).unwrap();
        assert_eq!(zx.x_mask(), xz.x_mask());
        assert_eq!(zx.phase_exp(), (xz.phase_exp() + 2) % 4);
    }

    #[test]
    fn commutation_basics() {
        assert!(p("i^0 XI").commutes(&p("i^0 IZ")).unwrap());
        assert!(!p("i^0 X").commutes(&p("i^0 Z")).unwrap());
        assert!(p("i^0 X").commutes(&p("i^0 ZI")).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(PauliOperator::identity(4).weight(), 0);
        assert_eq!(p("i^0 Y").weight(), 1);
        let x = BinaryVector::from_bits(&[true, true, false, false]);
        let z = BinaryVector::from_bits(&[false, true, true, false]);
        assert_eq!(PauliOperator::from_masks(x, z, 0).unwrap().weight(), 3);
    }

    #[test]
    fn error_enumeration_counts_and_order() {
        let e1 = enumerate_errors(1, 1).unwrap();
        assert_eq!(
            e1.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            ["i^0 X", "i^3 Y", "i^0 Z"]
        );
        assert_eq!(enumerate_errors(41, 2).unwrap().len(), 7503);
        assert_eq!(enumerate_errors(9, 2).unwrap().len(), 351);
        assert_eq!(error_count(42, 2), 7875);
        let e = enumerate_errors(3, 2).unwrap();
        // weight 2 starts with support (0,1) letters XX, XY, XZ, YX ...
        assert_eq!(e[9].support(), vec![0, 1]);
        assert_eq!(e[9].letter(0), Letter::X);
        assert_eq!(e[10].letter(1), Letter::Y);
        assert_eq!(e[12].letter(0), Letter::Y);
        assert!(enumerate_errors(2, 3).is_err());
    }

    #[test]
    fn y_string_phase() {
        // Y = iXZ, so the stored phase of "i^0 Y" is 1
        let y = p("i^0 Y");
        assert_eq!(y.phase_exp(), 1);
        assert!(y.is_hermitian());
        assert!(!PauliOperator::single(1, 0, Letter::Y).unwrap().is_hermitian());
        assert_eq!(y.to_string(), "i^0 Y");
    }

    #[test]
    fn hex_roundtrip_wide() {
        let v = BinaryVector::from_ones(130, [0, 5, 64, 129]).unwrap();
        assert_eq!(BinaryVector::from_hex(130, &v.to_hex()).unwrap(), v);
        assert_eq!(BinaryVector::from_ones(4, [0]).unwrap().to_hex(), "1");
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), n),
            0u8..4,
        )
            .prop_map(|(x, z, ph)| {
                PauliOperator::from_masks(BinaryVector::from_bits(&x), BinaryVector::from_bits(&z), ph)
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn product_is_associative(a in arb_pauli(70), b in arb_pauli(70), c in arb_pauli(70)) {
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn swapped_product_differs_by_symplectic_sign(a in arb_pauli(9), b in arb_pauli(9)) {
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            prop_assert_eq!(ab.x_mask(), ba.x_mask());
            prop_assert_eq!(ab.z_mask(), ba.z_mask());
            let sym = u8::from(a.symplectic(&b).unwrap());
            prop_assert_eq!(ab.phase_exp(), (ba.phase_exp() + 2 * sym) % 4);
            prop_assert_eq!(a.commutes(&b).unwrap(), ab.phase_exp() == ba.phase_exp());
        }

        #[test]
        fn squares_are_scalar(a in arb_pauli(12)) {
            let sq = a.multiply(&a).unwrap();
            prop_assert!(sq.is_scalar());
            prop_assert!(sq.phase_exp() % 2 == 0 || !a.is_hermitian());
            if a.is_hermitian() {
                prop_assert_eq!(sq.phase_exp(), 0);
            }
            prop_assert!(a.multiply(&a.adjoint()).unwrap().is_identity());
        }

        #[test]
        fn string_and_compact_forms_roundtrip(a in arb_pauli(11)) {
            prop_assert_eq!(&a.to_string().parse::<PauliOperator>().unwrap(), &a);
            prop_assert_eq!(PauliOperator::from_compact(&a.to_compact()).unwrap(), a);
        }
    }

    #[test]
    fn gf2_elimination() {
        let v = |bits: &[bool]| BinaryVector::from_bits(bits);
        let rows = vec![
            v(&[true, true, false]),
            v(&[false, true, true]),
            v(&[true, false, true]),
            v(&[false, false, false]),
        ];
        assert_eq!(gf2_rank(&rows), 2);
        let deps = gf2_dependencies(&rows);
        assert_eq!(deps.len(), 2);
        for d in &deps {
            let mut acc = BinaryVector::zeros(3);
            for i in d.iter_ones() {
                acc.xor_assign(&rows[i]);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        let e = enumerate_errors(6, 2).unwrap();
        let set: std::collections::BTreeSet<_> = e.iter().cloned().collect();
        assert_eq!(set.len(), e.len());
        assert_eq!(e.len() as u128, error_count(6, 2));
        assert!(e.windows(2).all(|w| w[0].weight() <= w[1].weight()));
    }
}

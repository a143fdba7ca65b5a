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

//! Exact dense operators on at most 12 qubits.
//!
//! Entries live in the ring `Z[i][1/2]`. A [`DenseOperator`] stores Gaussian
//! integer numerators over one shared power-of-two denominator; scalar results
//! (traces, Knill-Laflamme coefficients) are [`DyadicComplex`] values with
//! arbitrary-precision numerators. Nothing is ever rounded.
//!
//! Basis index bit `q` is the computational state of local qubit `q`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, PermutationMap};
use crate::pauli::PauliOperator;

pub const MAX_QUBITS: usize = 12;

/// Gaussian integer numerator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gauss {
    pub re: i64,
    pub im: i64,
}

impl Gauss {
    pub const ZERO: Gauss = Gauss { re: 0, im: 0 };
    pub const ONE: Gauss = Gauss { re: 1, im: 0 };

    pub fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// Multiply by `i^k`.
    #[inline]
    pub fn rotate(self, k: u8) -> Self {
        match k % 4 {
            0 => self,
            1 => Self::new(-self.im, self.re),
            2 => Self::new(-self.re, -self.im),
            _ => Self::new(self.im, -self.re),
        }
    }

    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }

    #[inline]
    fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }
}

/// Wide accumulator used inside products and traces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Wide {
    pub re: i128,
    pub im: i128,
}

impl Wide {
    #[inline]
    pub(crate) fn mul_acc(&mut self, a: Gauss, b: Gauss) {
        let (ar, ai, br, bi) = (a.re as i128, a.im as i128, b.re as i128, b.im as i128);
        self.re += ar * br - ai * bi;
        self.im += ar * bi + ai * br;
    }

    #[inline]
    pub(crate) fn mul_acc_neg(&mut self, a: Gauss, b: Gauss) {
        let (ar, ai, br, bi) = (a.re as i128, a.im as i128, b.re as i128, b.im as i128);
        self.re -= ar * br - ai * bi;
        self.im -= ar * bi + ai * br;
    }

    pub(crate) fn to_dyadic(self, exp: u32) -> DyadicComplex {
        DyadicComplex::new(BigInt::from(self.re), BigInt::from(self.im), exp)
    }
}

/// `(re + i·im) / 2^exp`, kept with minimal `exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicComplex {
    re: BigInt,
    im: BigInt,
    exp: u32,
}

impl DyadicComplex {
    pub fn new(re: BigInt, im: BigInt, exp: u32) -> Self {
        let mut v = Self { re, im, exp };
        v.reduce();
        v
    }

    pub fn zero() -> Self {
        Self::new(BigInt::zero(), BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), BigInt::zero(), 0)
    }

    /// `2^e` for any integer `e`.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            Self::new(BigInt::one() << e as usize, BigInt::zero(), 0)
        } else {
            Self::new(BigInt::one(), BigInt::zero(), (-e) as u32)
        }
    }

    fn reduce(&mut self) {
        if self.re.is_zero() && self.im.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && is_even(&self.re) && is_even(&self.im) {
            self.re >>= 1;
            self.im >>= 1;
            self.exp -= 1;
        }
    }

    pub fn re_num(&self) -> &BigInt {
        &self.re
    }

    pub fn im_num(&self) -> &BigInt {
        &self.im
    }

    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, BigInt, BigInt, u32) {
        let e = self.exp.max(other.exp);
        let s = (e - self.exp) as usize;
        let o = (e - other.exp) as usize;
        (
            &self.re << s,
            &self.im << s,
            &other.re << o,
            &other.im << o,
            e,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, c, d, e) = self.aligned(other);
        Self::new(a + c, b + d, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, c, d, e) = self.aligned(other);
        Self::new(a - c, b - d, e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
            self.exp + other.exp,
        )
    }

    /// `i^k · self`.
    pub fn mul_i_pow(&self, k: u8) -> Self {
        let (re, im) = (self.re.clone(), self.im.clone());
        let (re, im) = match k % 4 {
            0 => (re, im),
            1 => (-im, re),
            2 => (-re, -im),
            _ => (im, -re),
        };
        Self {
            re,
            im,
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.re, -&self.im, self.exp)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im, self.exp)
    }

    pub fn norm_sqr(&self) -> Self {
        self.mul(&self.conj())
    }

    pub fn re_rational(&self) -> BigRational {
        BigRational::new(self.re.clone(), BigInt::one() << self.exp as usize)
    }

    pub fn im_rational(&self) -> BigRational {
        BigRational::new(self.im.clone(), BigInt::one() << self.exp as usize)
    }

    /// Exact real value, or `None` for a nonzero imaginary part.
    pub fn to_real_rational(&self) -> Option<BigRational> {
        self.is_real().then(|| self.re_rational())
    }
}

fn is_even(v: &BigInt) -> bool {
    (v & BigInt::one()).is_zero()
}

impl fmt::Display for DyadicComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = self.re_rational();
        let im = self.im_rational();
        if im.is_zero() {
            write!(f, "{re}")
        } else if re.is_zero() {
            write!(f, "{im}i")
        } else if im.is_negative() {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

/// Exact complex rational, used for Knill-Laflamme coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalComplex {
    pub re: String,
    pub im: String,
}

impl RationalComplex {
    fn from_parts(re: &BigRational, im: &BigRational) -> Self {
        Self {
            re: re.to_string(),
            im: im.to_string(),
        }
    }
}

/// Full row-major `2^n × 2^n` matrix of `data / 2^exp`.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    num_qubits: usize,
    exp: u32,
    data: Vec<Gauss>,
}

impl PartialEq for DenseOperator {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits
            && self.exp == other.exp
            && self.data == other.data
    }
}

impl Eq for DenseOperator {}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::TooManyQubits {
            got: n,
            max: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow)
}

impl DenseOperator {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let d = 1usize << num_qubits;
        Ok(Self {
            num_qubits,
            exp: 0,
            data: vec![Gauss::ZERO; d * d],
        })
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        let mut m = Self::zero(num_qubits)?;
        let d = m.dim();
        for i in 0..d {
            m.data[i * d + i] = Gauss::ONE;
        }
        Ok(m)
    }

    /// Diagonal matrix with `±1` entries from `sign(basis_index)`.
    pub fn diagonal_signs(num_qubits: usize, negative: impl Fn(usize) -> bool) -> Result<Self> {
        let mut m = Self::zero(num_qubits)?;
        let d = m.dim();
        for i in 0..d {
            m.data[i * d + i] = if negative(i) { Gauss::new(-1, 0) } else { Gauss::ONE };
        }
        Ok(m)
    }

    /// Monomial matrix of a Pauli; `E|j> = i^p (-1)^{z.j} |j ^ x>`.
    pub fn from_pauli(p: &PauliOperator) -> Result<Self> {
        let n = p.n();
        let mut m = Self::zero(n)?;
        let (x, z) = pauli_words(p);
        let d = m.dim();
        for j in 0..d {
            let sign = ((z & j).count_ones() % 2) as u8 * 2;
            m.data[(j ^ x) * d + j] = Gauss::ONE.rotate(p.phase_exp() + sign);
        }
        Ok(m)
    }

    /// Sum of `coeff · pauli` terms divided by `2^exp`.
    pub fn from_pauli_sum(num_qubits: usize, terms: &[(i64, PauliOperator)], exp: u32) -> Result<Self> {
        let mut m = Self::zero(num_qubits)?;
        for (c, p) in terms {
            if p.n() != num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: num_qubits,
                    got: p.n(),
                });
            }
            let pm = Self::from_pauli(p)?;
            for (a, b) in m.data.iter_mut().zip(&pm.data) {
                a.re += c * b.re;
                a.im += c * b.im;
            }
        }
        m.exp = exp;
        m.normalize();
        Ok(m)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn numerators(&self) -> &[Gauss] {
        &self.data
    }

    #[inline]
    pub fn numerator(&self, row: usize, col: usize) -> Gauss {
        self.data[row * self.dim() + col]
    }

    pub fn entry(&self, row: usize, col: usize) -> DyadicComplex {
        let g = self.numerator(row, col);
        DyadicComplex::new(BigInt::from(g.re), BigInt::from(g.im), self.exp)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|g| !g.is_zero()).count()
    }

    fn normalize(&mut self) {
        let bits = self.data.iter().fold(0i64, |acc, g| acc | g.re | g.im);
        if bits == 0 {
            self.exp = 0;
            return;
        }
        let shift = bits.trailing_zeros().min(self.exp);
        if shift > 0 {
            for g in &mut self.data {
                g.re >>= shift;
                g.im >>= shift;
            }
            self.exp -= shift;
        }
    }

    fn from_wide(num_qubits: usize, wide: Vec<Wide>, exp: u32) -> Result<Self> {
        let (wide, exp) = reduce_wide(wide, exp);
        let data = wide
            .into_iter()
            .map(|w| Ok(Gauss::new(narrow(w.re)?, narrow(w.im)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            num_qubits,
            exp,
            data,
        })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: i128) -> Result<Self> {
        self.check_same(other)?;
        let e = self.exp.max(other.exp);
        let sa = 1i128 << (e - self.exp);
        let sb = sign << (e - other.exp);
        let wide = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| Wide {
                re: a.re as i128 * sa + b.re as i128 * sb,
                im: a.im as i128 * sa + b.im as i128 * sb,
            })
            .collect();
        Self::from_wide(self.num_qubits, wide, e)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            exp: self.exp,
            data: self.data.iter().map(|g| g.neg()).collect(),
        }
    }

    /// `self / 2`.
    pub fn halve(&self) -> Self {
        let mut m = self.clone();
        m.exp += 1;
        m.normalize();
        m
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut data = vec![Gauss::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self {
            num_qubits: self.num_qubits,
            exp: self.exp,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        let mut data = vec![Gauss::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self {
            num_qubits: self.num_qubits,
            exp: self.exp,
            data,
        }
    }

    pub fn to_sparse(&self) -> SparseOperator {
        SparseOperator {
            num_qubits: self.num_qubits,
            exp: self.exp,
            rows: self.sparse_rows(),
        }
    }

    /// Nonzero entries of each row.
    pub fn sparse_rows(&self) -> Vec<Vec<(u32, Gauss)>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                self.data[i * d..(i + 1) * d]
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| !g.is_zero())
                    .map(|(j, &g)| (j as u32, g))
                    .collect()
            })
            .collect()
    }

    /// Matrix product; skips zero entries of both factors.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.dim();
        let rows_a = self.sparse_rows();
        let rows_b = other.sparse_rows();
        let mut data = vec![Gauss::ZERO; d * d];
        let fits = data
            .par_chunks_mut(d)
            .enumerate()
            .map_init(
                || vec![Wide::default(); d],
                |acc, (i, out)| {
                    acc.iter_mut().for_each(|w| *w = Wide::default());
                    for &(k, a) in &rows_a[i] {
                        for &(j, b) in &rows_b[k as usize] {
                            acc[j as usize].mul_acc(a, b);
                        }
                    }
                    acc.iter().zip(out.iter_mut()).all(|(w, o)| {
                        match (i64::try_from(w.re), i64::try_from(w.im)) {
                            (Ok(re), Ok(im)) => {
                                *o = Gauss::new(re, im);
                                true
                            }
                            _ => false,
                        }
                    })
                },
            )
            .reduce(|| true, |a, b| a && b);
        if !fits {
            return self.mul_wide(other, &rows_a, &rows_b);
        }
        let mut m = Self {
            num_qubits: self.num_qubits,
            exp: self.exp + other.exp,
            data,
        };
        m.normalize();
        Ok(m)
    }

    fn mul_wide(
        &self,
        other: &Self,
        rows_a: &[Vec<(u32, Gauss)>],
        rows_b: &[Vec<(u32, Gauss)>],
    ) -> Result<Self> {
        let d = self.dim();
        let mut wide = vec![Wide::default(); d * d];
        wide.par_chunks_mut(d).enumerate().for_each(|(i, acc)| {
            for &(k, a) in &rows_a[i] {
                for &(j, b) in &rows_b[k as usize] {
                    acc[j as usize].mul_acc(a, b);
                }
            }
        });
        Self::from_wide(self.num_qubits, wide, self.exp + other.exp)
    }

    pub fn trace(&self) -> DyadicComplex {
        let d = self.dim();
        let mut acc = Wide::default();
        for i in 0..d {
            let g = self.data[i * d + i];
            acc.re += g.re as i128;
            acc.im += g.im as i128;
        }
        acc.to_dyadic(self.exp)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<DyadicComplex> {
        self.check_same(other)?;
        let d = self.dim();
        let mut acc = Wide::default();
        for i in 0..d {
            for j in 0..d {
                let a = self.data[i * d + j];
                if !a.is_zero() {
                    acc.mul_acc(a, other.data[j * d + i]);
                }
            }
        }
        Ok(acc.to_dyadic(self.exp + other.exp))
    }

    /// `E · self · E†` for a Pauli `E`; the phase of `E` cancels.
    pub fn conjugate_by_pauli(&self, e: &PauliOperator) -> Result<Self> {
        if e.n() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: e.n(),
            });
        }
        let (x, z) = pauli_words(e);
        let d = self.dim();
        let mut data = vec![Gauss::ZERO; d * d];
        for j in 0..d {
            for i in 0..d {
                let g = self.data[(j ^ x) * d + (i ^ x)];
                data[j * d + i] = if (z & (i ^ j)).count_ones() % 2 == 1 { g.neg() } else { g };
            }
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            exp: self.exp,
            data,
        })
    }

    /// `D · self · D` for a diagonal `±1` matrix `D`.
    pub fn conjugate_by_signs(&self, negative: &[bool]) -> Self {
        let d = self.dim();
        let mut m = self.clone();
        for i in 0..d {
            for j in 0..d {
                if negative[i] != negative[j] {
                    let g = &mut m.data[i * d + j];
                    *g = g.neg();
                }
            }
        }
        m
    }

    /// `Tr(self · E · other · E†)`.
    pub fn trace_conjugated_product(&self, e: &PauliOperator, other: &Self) -> Result<DyadicComplex> {
        self.check_same(other)?;
        let (x, z) = pauli_words(e);
        let d = self.dim();
        let mut acc = Wide::default();
        for i in 0..d {
            for j in 0..d {
                let a = self.data[i * d + j];
                if a.is_zero() {
                    continue;
                }
                let b = other.data[(j ^ x) * d + (i ^ x)];
                if (z & (i ^ j)).count_ones() % 2 == 1 {
                    acc.mul_acc_neg(a, b);
                } else {
                    acc.mul_acc(a, b);
                }
            }
        }
        Ok(acc.to_dyadic(self.exp + other.exp))
    }

    /// `Tr(self · E)`.
    pub fn trace_with_pauli(&self, e: &PauliOperator) -> Result<DyadicComplex> {
        if e.n() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: e.n(),
            });
        }
        let (x, z) = pauli_words(e);
        let d = self.dim();
        let mut acc = Wide::default();
        for j in 0..d {
            // <j|M E|j> = i^p (-1)^{z.j} M[j][j^x]
            let g = self.data[j * d + (j ^ x)];
            let g = if (z & j).count_ones() % 2 == 1 { g.neg() } else { g };
            acc.re += g.re as i128;
            acc.im += g.im as i128;
        }
        let g = acc;
        let rot = match e.phase_exp() {
            0 => g,
            1 => Wide { re: -g.im, im: g.re },
            2 => Wide { re: -g.re, im: -g.im },
            _ => Wide { re: g.im, im: -g.re },
        };
        Ok(rot.to_dyadic(self.exp))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|g| g.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        let d = self.dim();
        self.exp == 0
            && self.data.iter().enumerate().all(|(k, g)| {
                if k / d == k % d {
                    *g == Gauss::ONE
                } else {
                    g.is_zero()
                }
            })
    }

    pub fn is_hermitian(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i..d).all(|j| self.data[i * d + j] == self.data[j * d + i].conj()))
    }

    pub fn is_involution(&self) -> Result<bool> {
        Ok(self.mul(self)?.is_identity())
    }

    pub fn is_hermitian_involution(&self) -> Result<bool> {
        Ok(self.is_hermitian() && self.is_involution()?)
    }

    pub fn is_idempotent(&self) -> Result<bool> {
        Ok(self.mul(self)? == *self)
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }

    /// `Some(true)` commute, `Some(false)` anticommute, `None` neither.
    pub fn commutation(&self, other: &Self) -> Result<Option<bool>> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        if ab == ba {
            Ok(Some(true))
        } else if ab == ba.neg() {
            Ok(Some(false))
        } else {
            Ok(None)
        }
    }

    /// Kronecker product with `self` on the low qubits.
    pub fn tensor(&self, high: &Self) -> Result<Self> {
        let n = self.num_qubits + high.num_qubits;
        check_qubits(n)?;
        let (dl, dh) = (self.dim(), high.dim());
        let d = dl * dh;
        let mut wide = vec![Wide::default(); d * d];
        for hi in 0..dh {
            for hj in 0..dh {
                let b = high.data[hi * dh + hj];
                if b.is_zero() {
                    continue;
                }
                for li in 0..dl {
                    for lj in 0..dl {
                        let a = self.data[li * dl + lj];
                        if !a.is_zero() {
                            wide[(hi * dl + li) * d + hj * dl + lj].mul_acc(a, b);
                        }
                    }
                }
            }
        }
        Self::from_wide(n, wide, self.exp + high.exp)
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: ket.num_qubits,
            });
        }
        let d = self.dim();
        let wide: Vec<Wide> = (0..d)
            .map(|i| {
                let mut acc = Wide::default();
                for j in 0..d {
                    let a = self.data[i * d + j];
                    if !a.is_zero() {
                        acc.mul_acc(a, ket.data[j]);
                    }
                }
                acc
            })
            .collect();
        Ket::from_wide(self.num_qubits, wide, self.exp + ket.exp)
    }
}

/// Row-wise nonzero lists of an operator, for repeated trace evaluations.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    num_qubits: usize,
    exp: u32,
    rows: Vec<Vec<(u32, Gauss)>>,
}

impl SparseOperator {
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// `Tr(self · X^x Z^z)` for every `z` at once.
    pub fn pauli_spectrum(&self, x: usize) -> TraceSpectrum {
        let d = 1usize << self.num_qubits;
        let mut g = vec![Wide::default(); d];
        for (i, row) in self.rows.iter().enumerate() {
            let want = (i ^ x) as u32;
            if let Ok(pos) = row.binary_search_by_key(&want, |&(j, _)| j) {
                g[i].mul_acc(row[pos].1, Gauss::ONE);
            }
        }
        walsh_hadamard(&mut g);
        TraceSpectrum {
            exp: self.exp,
            values: g,
        }
    }

    /// `Tr(self · X^x Z^z)`.
    pub fn trace_with_masks(&self, x: usize, z: usize) -> DyadicComplex {
        let mut acc = Wide::default();
        for (i, row) in self.rows.iter().enumerate() {
            let want = (i ^ x) as u32;
            if let Ok(pos) = row.binary_search_by_key(&want, |&(j, _)| j) {
                let a = row[pos].1;
                if (z & i).count_ones() % 2 == 1 {
                    acc.mul_acc_neg(a, Gauss::ONE);
                } else {
                    acc.mul_acc(a, Gauss::ONE);
                }
            }
        }
        acc.to_dyadic(self.exp)
    }

    /// Dense `selfᵀ`, the operand layout taken by the trace routines below.
    pub fn to_dense_transpose(&self) -> DenseOperator {
        let d = 1usize << self.num_qubits;
        let mut data = vec![Gauss::default(); d * d];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                data[j as usize * d + i] = a;
            }
        }
        DenseOperator {
            num_qubits: self.num_qubits,
            exp: self.exp,
            data,
        }
    }

    /// `Tr(self · X^x Z^z · B · (X^x Z^z)†)` for every `z` at once, given `b_t = Bᵀ`.
    pub fn conjugated_trace_spectrum(&self, x: usize, b_t: &DenseOperator) -> TraceSpectrum {
        let d = 1usize << self.num_qubits;
        let mut g = vec![Wide::default(); d];
        for (i, row) in self.rows.iter().enumerate() {
            let r = i ^ x;
            let bt_row = &b_t.data[r * d..(r + 1) * d];
            for &(j, a) in row {
                let j = j as usize;
                g[i ^ j].mul_acc(a, bt_row[j ^ x]);
            }
        }
        walsh_hadamard(&mut g);
        TraceSpectrum {
            exp: self.exp + b_t.exp,
            values: g,
        }
    }

    /// `Tr(self · E · B · E†)` given `b_t = Bᵀ`.
    pub fn trace_conjugated_product_t(&self, x: usize, z: usize, b_t: &DenseOperator) -> DyadicComplex {
        let d = 1usize << self.num_qubits;
        let mut acc = Wide::default();
        for (i, row) in self.rows.iter().enumerate() {
            let r = i ^ x;
            let bt_row = &b_t.data[r * d..(r + 1) * d];
            for &(j, a) in row {
                let j = j as usize;
                let b = bt_row[j ^ x];
                if (z & (i ^ j)).count_ones() % 2 == 1 {
                    acc.mul_acc_neg(a, b);
                } else {
                    acc.mul_acc(a, b);
                }
            }
        }
        acc.to_dyadic(self.exp + b_t.exp)
    }
}

/// Values of a trace indexed by the Z-mask of the conjugating Pauli.
#[derive(Clone, Debug)]
pub struct TraceSpectrum {
    exp: u32,
    values: Vec<Wide>,
}

impl TraceSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Numerators over `2^denom_exp()`.
    pub fn raw(&self, z: usize) -> (i128, i128) {
        (self.values[z].re, self.values[z].im)
    }

    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn get(&self, z: usize) -> DyadicComplex {
        self.values[z].to_dyadic(self.exp)
    }
}

/// Unnormalized state vector over the same ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ket {
    num_qubits: usize,
    exp: u32,
    data: Vec<Gauss>,
}

impl Ket {
    /// `Σ_b |b>`, the unnormalized `|+>^n`.
    pub fn plus(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        Ok(Self {
            num_qubits,
            exp: 0,
            data: vec![Gauss::ONE; 1 << num_qubits],
        })
    }

    pub fn amplitudes(&self) -> &[Gauss] {
        &self.data
    }

    fn from_wide(num_qubits: usize, wide: Vec<Wide>, exp: u32) -> Result<Self> {
        let (wide, exp) = reduce_wide(wide, exp);
        let data = wide
            .into_iter()
            .map(|w| Ok(Gauss::new(narrow(w.re)?, narrow(w.im)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            num_qubits,
            exp,
            data,
        })
    }
}

/// Divide out the largest common power of two, up to `exp`.
fn reduce_wide(mut wide: Vec<Wide>, exp: u32) -> (Vec<Wide>, u32) {
    let bits = wide.iter().fold(0i128, |acc, w| acc | w.re | w.im);
    if bits == 0 {
        return (wide, 0);
    }
    let shift = bits.trailing_zeros().min(exp);
    if shift > 0 {
        for w in &mut wide {
            w.re >>= shift;
            w.im >>= shift;
        }
    }
    (wide, exp - shift)
}

pub(crate) fn pauli_words(p: &PauliOperator) -> (usize, usize) {
    let w = |v: &crate::pauli::BinaryVector| v.words().first().copied().unwrap_or(0) as usize;
    (w(p.x_mask()), w(p.z_mask()))
}

/// Controlled-Z product over the edges of `g`, qubits in vertex-list order.
pub fn build_ug(g: &Graph) -> Result<DenseOperator> {
    check_qubits(g.len())?;
    DenseOperator::diagonal_signs(g.len(), |b| graph_phase_negative(g, b))
}

/// Parity of the number of edges with both endpoints set in `b`.
pub fn graph_phase_negative(g: &Graph, b: usize) -> bool {
    let mut parity = false;
    for (i, &v) in g.vertices().iter().enumerate() {
        if b >> i & 1 == 1 {
            let nb = g.neighbor_mask(v).expect("own vertex");
            let hi = nb.iter_ones().filter(|&j| j > i && b >> j & 1 == 1).count();
            parity ^= hi % 2 == 1;
        }
    }
    parity
}

/// `(1 + X_a + X_b - X_a X_b) / 2`.
pub fn build_v(a: usize, b: usize, n: usize) -> Result<DenseOperator> {
    if a == b {
        return Err(Error::InvalidArgument("V needs two distinct qubits".into()));
    }
    for q in [a, b] {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
    }
    DenseOperator::from_pauli_sum(
        n,
        &[
            (1, PauliOperator::identity(n)),
            (1, PauliOperator::x_on(n, &[a])?),
            (1, PauliOperator::x_on(n, &[b])?),
            (-1, PauliOperator::x_on(n, &[a, b])?),
        ],
        1,
    )
}

/// Qubit permutation operator sending `Z_C |+>` to `Z_{perm(C)} |+>`; labels are local qubit indices.
pub fn build_perm_op(perm: &PermutationMap, n: usize) -> Result<DenseOperator> {
    let mut target = vec![0usize; n];
    let mut hit = vec![false; n];
    for q in 0..n {
        let t = perm.apply(q as u32) as usize;
        if t >= n || hit[t] {
            return Err(Error::InvalidPermutation(format!(
                "permutation does not act on qubits 0..{n}"
            )));
        }
        hit[t] = true;
        target[q] = t;
    }
    for v in perm.domain() {
        if v as usize >= n {
            return Err(Error::IndexOutOfRange { index: v as usize, n });
        }
    }
    let mut m = DenseOperator::zero(n)?;
    let d = m.dim();
    for b in 0..d {
        let mut image = 0usize;
        for (q, &t) in target.iter().enumerate() {
            image |= (b >> q & 1) << t;
        }
        m.data[image * d + b] = Gauss::ONE;
    }
    Ok(m)
}

/// `(1 + X_s + (1 - X_s) M_perm) / 2`.
pub fn build_t_controlled(source: usize, perm: &PermutationMap, n: usize) -> Result<DenseOperator> {
    if source >= n {
        return Err(Error::IndexOutOfRange { index: source, n });
    }
    if perm.moves(source as u32) {
        return Err(Error::InvalidPermutation(format!(
            "control qubit {source} is moved by the permutation"
        )));
    }
    let id = DenseOperator::identity(n)?;
    let xs = DenseOperator::from_pauli(&PauliOperator::x_on(n, &[source])?)?;
    let m = build_perm_op(perm, n)?;
    let plus = id.add(&xs)?;
    let minus = id.sub(&xs)?;
    Ok(plus.add(&minus.mul(&m)?)?.halve())
}

/// Certified orthogonal projector.
#[derive(Clone, Debug)]
pub struct Projector {
    op: DenseOperator,
    rank: DyadicComplex,
}

impl Projector {
    /// Checks idempotence, Hermiticity and positive trace.
    pub fn new(op: DenseOperator) -> Result<Self> {
        if !op.is_hermitian() || !op.is_idempotent()? {
            return Err(Error::NotProjector);
        }
        let rank = op.trace();
        if rank.is_zero() {
            return Err(Error::NotProjector);
        }
        Ok(Self { op, rank })
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    pub fn trace(&self) -> &DyadicComplex {
        &self.rank
    }

    /// Trace as an integer (always integral for a projector).
    pub fn dimension(&self) -> BigInt {
        self.rank.re_num().clone()
    }
}

/// `Π (1 + O_i) / 2` after checking every `O_i` is a Hermitian involution and all pairs commute.
pub fn projector_from_involutions(obs: &[DenseOperator]) -> Result<Projector> {
    let first = obs
        .first()
        .ok_or_else(|| Error::InvalidArgument("no observables".into()))?;
    let n = first.num_qubits();
    for (i, o) in obs.iter().enumerate() {
        if o.num_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: o.num_qubits(),
            });
        }
        if !o.is_hermitian_involution()? {
            return Err(Error::NotInvolution { index: i });
        }
    }
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            if !obs[i].commutes_with(&obs[j])? {
                return Err(Error::NotCommuting { first: i, second: j });
            }
        }
    }
    let id = DenseOperator::identity(n)?;
    let mut p = id.clone();
    for o in obs {
        p = p.mul(&id.add(o)?.halve())?;
    }
    let rank = p.trace();
    if rank.is_zero() {
        return Err(Error::NotProjector);
    }
    Ok(Projector { op: p, rank })
}

#[derive(Clone, Debug, Serialize)]
pub struct KlEntry {
    pub error: String,
    pub coefficient: RationalComplex,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KlReport {
    pub dimension: String,
    pub errors_checked: usize,
    pub entries: Vec<KlEntry>,
    pub all_pass: bool,
    /// Every coefficient vanishes.
    pub pure: bool,
}

impl KlReport {
    pub fn violations(&self) -> impl Iterator<Item = &KlEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Knill-Laflamme test `P E P = c_E P` for each error.
///
/// Uses `‖PEP - cP‖² = Tr(P E† P E) - |Tr(PE)|²/K`, which stays exact and costs
/// `O(4^n)` per error.
pub fn kl_check(p: &Projector, errors: &[PauliOperator]) -> Result<KlReport> {
    let op = p.operator();
    let k = p.trace().re_rational();
    let sparse = op.to_sparse();
    let op_t = op.transpose();
    let entries = errors
        .par_iter()
        .map(|e| -> Result<KlEntry> {
            let tr = op.trace_with_pauli(e)?;
            let (x, z) = pauli_words(e);
            let tr_pepe = sparse.trace_conjugated_product_t(x, z, &op_t);
            // both sides times K: tr_pepe * K == |tr|^2
            let lhs = tr_pepe.mul(p.trace());
            let pass = lhs == tr.norm_sqr();
            let c_re = tr.re_rational() / &k;
            let c_im = tr.im_rational() / &k;
            Ok(KlEntry {
                error: e.to_string(),
                coefficient: RationalComplex::from_parts(&c_re, &c_im),
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_pass = entries.iter().all(|e| e.pass);
    let pure = entries.iter().all(|e| e.coefficient.re == "0" && e.coefficient.im == "0");
    Ok(KlReport {
        dimension: p.trace().to_string(),
        errors_checked: entries.len(),
        entries,
        all_pass,
        pure,
    })
}

/// Literal matrix comparison `P E P == c_E P`, done as `K · PEP == Tr(PE) · P`.
pub fn kl_check_direct(p: &Projector, e: &PauliOperator) -> Result<bool> {
    let op = p.operator();
    let pep = op.mul(&DenseOperator::from_pauli(e)?)?.mul(op)?;
    let tr = op.trace_with_pauli(e)?;
    let d = op.dim();
    Ok((0..d * d).all(|k| {
        let (i, j) = (k / d, k % d);
        pep.entry(i, j).mul(p.trace()) == op.entry(i, j).mul(&tr)
    }))
}

/// In-place Walsh-Hadamard transform over `i128` Gaussian pairs.
pub(crate) fn walsh_hadamard(v: &mut [Wide]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = Wide {
                    re: a.re + b.re,
                    im: a.im + b.im,
                };
                v[j + h] = Wide {
                    re: a.re - b.re,
                    im: a.im - b.im,
                };
            }
        }
        h *= 2;
    }
}

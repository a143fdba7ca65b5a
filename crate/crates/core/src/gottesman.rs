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

//! Distance-3 stabilizer codes of length `2^(2r+3)`, built symbolically.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{enumerate_errors, gf2_rank, BinaryVector, CompactPauli, PauliOperator};

/// Rows `h_1..h_{2r+3}` of the matrix whose column `c` is the binary expansion of `c`,
/// most significant bit in `h_1`.
#[derive(Clone, Debug)]
pub struct CheckMatrix {
    rows: Vec<BinaryVector>,
    width: usize,
}

impl CheckMatrix {
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `h_k` for `k >= 1`; `h_0` is the zero vector.
    pub fn row(&self, k: usize) -> BinaryVector {
        if k == 0 {
            BinaryVector::zeros(self.width)
        } else {
            self.rows[k - 1].clone()
        }
    }

    pub fn column(&self, c: usize) -> Vec<bool> {
        self.rows.iter().map(|r| r.get(c)).collect()
    }
}

pub fn h_matrix(r: usize) -> Result<CheckMatrix> {
    if r < 1 {
        return Err(Error::InvalidArgument(format!("r must be >= 1, got {r}")));
    }
    let j = 2 * r + 3;
    let width = 1usize << j;
    let rows = (1..=j)
        .map(|k| {
            let bit = j - k;
            BinaryVector::from_ones(width, (0..width).filter(|c| c >> bit & 1 == 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckMatrix { rows, width })
}

#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pub n: usize,
    pub generators: Vec<PauliOperator>,
}

impl StabilizerCode {
    /// First pair of generators that anticommute, if any.
    pub fn anticommuting_pair(&self) -> Result<Option<(usize, usize)>> {
        for i in 0..self.generators.len() {
            for j in i + 1..self.generators.len() {
                if !self.generators[i].commutes(&self.generators[j])? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    /// Rank of the `2n`-bit symplectic vectors `(x | z)`.
    pub fn symplectic_rank(&self) -> usize {
        let rows: Vec<BinaryVector> = self
            .generators
            .iter()
            .map(|g| g.x_mask().concat(g.z_mask()))
            .collect();
        gf2_rank(&rows)
    }

    pub fn logical_qubits(&self) -> usize {
        self.n - self.generators.len()
    }

    pub fn syndrome(&self, e: &PauliOperator) -> Result<Vec<bool>> {
        self.generators.iter().map(|g| g.symplectic(e)).collect()
    }

    pub fn to_json(&self) -> StabilizerJson {
        StabilizerJson {
            n: self.n,
            generators: self.generators.iter().map(PauliOperator::to_compact).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerJson {
    pub n: usize,
    pub generators: Vec<CompactPauli>,
}

/// `X_U`, `Z_U` and `S_k = X^{h_k} Z^{h_{k-1} + h_1 + h_{2r+3}}` for `k = 1..=2r+3`.
///
/// Qubit `q` (label `q + 1`) carries column `q` of the check matrix.
pub fn generators(r: usize) -> Result<StabilizerCode> {
    let h = h_matrix(r)?;
    let n = h.width();
    let j = h.height();
    let all: Vec<usize> = (0..n).collect();
    let mut gens = vec![PauliOperator::x_on(n, &all)?, PauliOperator::z_on(n, &all)?];
    let tail = h.row(1).xor(&h.row(j));
    for k in 1..=j {
        let z = h.row(k - 1).xor(&tail);
        gens.push(PauliOperator::from_masks(h.row(k), z, 0)?);
    }
    let code = StabilizerCode { n, generators: gens };
    if let Some((a, b)) = code.anticommuting_pair()? {
        return Err(Error::Construction(format!(
            "generators {a} and {b} anticommute"
        )));
    }
    Ok(code)
}

/// The S-generator `S^r_k`.
pub fn s_generator(code: &StabilizerCode, k: usize) -> &PauliOperator {
    &code.generators[k + 1]
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub n: usize,
    pub errors_checked: usize,
    /// Errors with an all-commuting syndrome.
    pub violations: Vec<String>,
}

impl PurityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every error of weight 1 or 2 must anticommute with some generator.
pub fn verify_pure_distance3(code: &StabilizerCode) -> Result<PurityReport> {
    let errors = enumerate_errors(code.n, 2)?;
    let violations: Vec<String> = errors
        .par_iter()
        .filter_map(|e| {
            let detected = code
                .generators
                .iter()
                .any(|g| g.symplectic(e).expect("same length"));
            (!detected).then(|| e.to_string())
        })
        .collect();
    Ok(PurityReport {
        n: code.n,
        errors_checked: errors.len(),
        violations,
    })
}

/// Hamming-bound identity `2r+5 = ceil(log2(3·2^(2r+3) + 1))`.
pub fn saturates_hamming(r: usize) -> bool {
    let n = 1u128 << (2 * r + 3);
    let target = 3 * n + 1;
    let mut s = 0u32;
    while (1u128 << s) < target {
        s += 1;
    }
    s as usize == 2 * r + 5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_matrix_columns() {
        let h = h_matrix(1).unwrap();
        assert_eq!((h.height(), h.width()), (5, 32));
        assert_eq!(h.column(1), vec![false, false, false, false, true]);
        assert_eq!(h.column(31), vec![true; 5]);
        assert!(h.column(0).iter().all(|b| !b));
        for k in 1..=5 {
            assert_eq!(h.row(k).weight(), 16);
        }
        assert!(h.row(0).is_zero());
        assert!(h_matrix(0).is_err());
    }

    #[test]
    fn r1_code() {
        let c = generators(1).unwrap();
        assert_eq!(c.generators.len(), 7);
        assert_eq!(c.n, 32);
        assert_eq!(c.logical_qubits(), 25);
        assert_eq!(c.anticommuting_pair().unwrap(), None);
        assert_eq!(c.symplectic_rank(), 7);
        assert!(c.generators.iter().all(PauliOperator::is_hermitian));
        let id = c.generators[0].multiply(&c.generators[0]).unwrap();
        assert!(id.is_identity());
        for g in &c.generators {
            assert!(g.multiply(g).unwrap().is_identity());
        }
        let r = verify_pure_distance3(&c).unwrap();
        assert_eq!(r.errors_checked, 4560);
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(5)]);
        // single X on qubit 0 anticommutes with Z_U
        let x0 = PauliOperator::x_on(32, &[0]).unwrap();
        assert!(c.syndrome(&x0).unwrap()[1]);
    }

    #[test]
    fn family_r1_to_r3() {
        for r in 1..=3 {
            let c = generators(r).unwrap();
            assert_eq!(c.generators.len(), 2 * r + 5);
            assert_eq!(c.symplectic_rank(), 2 * r + 5);
            assert!(saturates_hamming(r));
        }
        let r2 = verify_pure_distance3(&generators(2).unwrap()).unwrap();
        assert_eq!(r2.errors_checked, 73536);
        assert!(r2.passed());
    }
}

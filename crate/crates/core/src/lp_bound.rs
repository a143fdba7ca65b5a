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

//! Weight enumerators and the restricted linear-programming bound for distance 3.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{DenseOperator, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::gottesman::StabilizerCode;
use crate::pauli::PauliOperator;

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow2(e: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

/// `A_0..A_n` together with their sum (`2^s` for stabilizer codes, `2^n/K` in general).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightEnumerator {
    pub n: usize,
    pub values: Vec<BigRational>,
}

impl WeightEnumerator {
    pub fn total(&self) -> BigRational {
        self.values.iter().fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// `s` with `Σ A_i = 2^s`, if the sum is a power of two.
    pub fn redundancy(&self) -> Option<usize> {
        let t = self.total();
        if !t.is_integer() {
            return None;
        }
        let t = t.to_integer();
        let bits = t.bits() as usize;
        (bits > 0 && t == BigInt::one() << (bits - 1)).then_some(bits - 1)
    }
}

/// `⟨f⟩ = Σ f(i) A_i / Σ A_i`.
pub fn average(w: &WeightEnumerator, f: impl Fn(usize) -> BigInt) -> BigRational {
    let num = w
        .values
        .iter()
        .enumerate()
        .fold(BigRational::zero(), |acc, (i, a)| acc + a * BigRational::from_integer(f(i)));
    num / w.total()
}

/// `A_i = K^-2 Σ_{|ω|=i} |Tr(p E_ω)|²` over all `4^n` Paulis.
pub fn weight_distribution(p: &DenseOperator, k: &BigRational) -> Result<WeightEnumerator> {
    let n = p.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { got: n, max: MAX_QUBITS });
    }
    if !k.is_positive() {
        return Err(Error::InvalidArgument(format!("K must be positive, got {k}")));
    }
    let sparse = p.to_sparse();
    let per_x: Vec<Vec<i128>> = (0..1usize << n)
        .into_par_iter()
        .map(|x| {
            let spec = sparse.pauli_spectrum(x);
            let mut sums = vec![0i128; n + 1];
            for z in 0..spec.len() {
                let (re, im) = spec.raw(z);
                let sq = re
                    .checked_mul(re)
                    .and_then(|a| im.checked_mul(im).and_then(|b| a.checked_add(b)))
                    .ok_or(Error::Overflow)?;
                let wt = (x | z).count_ones() as usize;
                sums[wt] = sums[wt].checked_add(sq).ok_or(Error::Overflow)?;
            }
            Ok(sums)
        })
        .collect::<Result<_>>()?;
    let exp = 2 * p.denom_exp() as usize;
    let scale = pow2(exp) * k * k;
    let values = (0..=n)
        .map(|i| {
            let s: BigInt = per_x.iter().map(|v| BigInt::from(v[i])).sum();
            BigRational::from_integer(s) / &scale
        })
        .collect();
    Ok(WeightEnumerator { n, values })
}

/// Enumerator of a stabilizer code from its group elements (`A_i` = number of weight-`i` elements).
pub fn stabilizer_enumerator(code: &StabilizerCode) -> Result<WeightEnumerator> {
    let g = &code.generators;
    if g.len() > 24 {
        return Err(Error::InvalidArgument(format!("{} generators is too many to expand", g.len())));
    }
    let mut counts = vec![0u64; code.n + 1];
    let mut elems = vec![PauliOperator::identity(code.n)];
    for gen in g {
        let next: Vec<PauliOperator> = elems.iter().map(|e| e.multiply(gen)).collect::<Result<_>>()?;
        elems.extend(next);
    }
    for e in &elems {
        counts[e.weight()] += 1;
    }
    Ok(WeightEnumerator {
        n: code.n,
        values: counts.into_iter().map(|c| BigRational::from_integer(c.into())).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub label: String,
    /// Coefficients of `A_0..A_n`.
    pub coeffs: Vec<BigRational>,
    pub sense: Sense,
    pub rhs: BigRational,
}

impl Constraint {
    fn lhs(&self, x: &[BigRational]) -> BigRational {
        self.coeffs.iter().zip(x).fold(BigRational::zero(), |acc, (c, v)| acc + c * v)
    }

    pub fn holds(&self, x: &[BigRational]) -> bool {
        let l = self.lhs(x);
        match self.sense {
            Sense::Eq => l == self.rhs,
            Sense::Ge => l >= self.rhs,
        }
    }
}

/// Variables `A_0..A_n >= 0` subject to the listed constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpInstance {
    pub n: usize,
    pub s: usize,
    pub constraints: Vec<Constraint>,
}

impl LpInstance {
    /// Structural and normalization constraints plus one nonnegativity bound per `A_1..A_n`.
    pub fn constraint_count(&self) -> usize {
        self.constraints.len() + self.n
    }

    pub fn is_satisfied_by(&self, x: &[BigRational]) -> bool {
        x.len() == self.n + 1
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }
}

/// Distance-3 conditions on `A_0..A_n` for an `[[n, n-s, 3]]` code.
pub fn restricted_constraints(n: usize, s: usize) -> Result<LpInstance> {
    if s < 1 || s > n {
        return Err(Error::InvalidArgument(format!("need 1 <= s <= n, got s = {s}, n = {n}")));
    }
    let ni = n as i64;
    let two_s = pow2(s);
    let mut a = vec![BigRational::zero(); n + 1];
    let mut b = vec![BigRational::zero(); n + 1];
    for i in 0..=n {
        let ii = i as i64;
        a[i] = -rat(3 * ni - 4 * ii);
        let y = 4 * ii - 3 * ni + 1;
        b[i] = -rat(y * y - 3 * ni - 1);
    }
    a[1] += &two_s;
    b[2] += &two_s * rat(2);
    let even = (0..=n).map(|i| if i % 2 == 0 { rat(1) } else { rat(0) }).collect();
    let mut a0 = vec![BigRational::zero(); n + 1];
    a0[0] = rat(1);
    let constraints = vec![
        Constraint {
            label: "2^s A_1 = sum (3n - 4i) A_i".into(),
            coeffs: a,
            sense: Sense::Eq,
            rhs: rat(0),
        },
        Constraint {
            label: "2^(s+1) A_2 = sum ((4i - 3n + 1)^2 - 3n - 1) A_i".into(),
            coeffs: b,
            sense: Sense::Eq,
            rhs: rat(0),
        },
        Constraint {
            label: "sum_even A_i >= 2^(s-1)".into(),
            coeffs: even,
            sense: Sense::Ge,
            rhs: pow2(s - 1),
        },
        Constraint {
            label: "A_0 = 1".into(),
            coeffs: a0,
            sense: Sense::Eq,
            rhs: rat(1),
        },
        Constraint {
            label: "sum A_i = 2^s".into(),
            coeffs: vec![rat(1); n + 1],
            sense: Sense::Eq,
            rhs: two_s,
        },
    ];
    Ok(LpInstance { n, s, constraints })
}

/// Multipliers `y` (nonnegative on `>=` rows) with `Σ y_r a_r <= 0` columnwise and `Σ y_r b_r > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<BigRational>,
}

impl FarkasCertificate {
    /// Column sums `Σ_r y_r a_r[j]`.
    pub fn combined(&self, inst: &LpInstance) -> Vec<BigRational> {
        (0..=inst.n)
            .map(|j| {
                inst.constraints
                    .iter()
                    .zip(&self.multipliers)
                    .fold(BigRational::zero(), |acc, (c, y)| acc + y * &c.coeffs[j])
            })
            .collect()
    }

    pub fn combined_rhs(&self, inst: &LpInstance) -> BigRational {
        inst.constraints
            .iter()
            .zip(&self.multipliers)
            .fold(BigRational::zero(), |acc, (c, y)| acc + y * &c.rhs)
    }

    /// Exact check that no `x >= 0` can satisfy the instance.
    pub fn verify(&self, inst: &LpInstance) -> bool {
        self.multipliers.len() == inst.constraints.len()
            && inst
                .constraints
                .iter()
                .zip(&self.multipliers)
                .all(|(c, y)| c.sense == Sense::Eq || !y.is_negative())
            && self.combined(inst).iter().all(|v| !v.is_positive())
            && self.combined_rhs(inst).is_positive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible { point: Vec<BigRational> },
    Infeasible { certificate: FarkasCertificate },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }
}

/// Exact phase-1 simplex with Bland's rule; both outcomes are re-verified before returning.
pub fn lp_feasible(inst: &LpInstance) -> Result<LpOutcome> {
    let rows = inst.constraints.len();
    let nv = inst.n + 1;
    let slack_cols: Vec<Option<usize>> = {
        let mut next = nv;
        inst.constraints
            .iter()
            .map(|c| match c.sense {
                Sense::Eq => None,
                Sense::Ge => {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let ns = nv + slack_cols.iter().flatten().count();
    let cols = ns + rows;
    // tableau rows: [coeffs..., rhs]
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    let mut flip = vec![false; rows];
    for (r, c) in inst.constraints.iter().enumerate() {
        let mut row = vec![BigRational::zero(); cols + 1];
        row[..nv].clone_from_slice(&c.coeffs);
        if let Some(sc) = slack_cols[r] {
            row[sc] = rat(-1);
        }
        row[cols] = c.rhs.clone();
        if row[cols].is_negative() {
            flip[r] = true;
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[ns + r] = rat(1);
        t.push(row);
    }
    let mut basis: Vec<usize> = (ns..ns + rows).collect();
    // reduced costs of the phase-1 objective, last entry is -w
    let mut cost = vec![BigRational::zero(); cols + 1];
    for c in &mut cost[ns..cols] {
        *c = rat(1);
    }
    for row in &t {
        for j in 0..=cols {
            cost[j] -= &row[j];
        }
    }
    while let Some(enter) = (0..cols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (pr, _) = leave.ok_or_else(|| Error::Construction("phase-1 simplex is unbounded".into()))?;
        let piv = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v /= &piv;
        }
        let prow = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
        basis[pr] = enter;
    }
    let w = -cost[cols].clone();
    if w.is_zero() {
        let mut x = vec![BigRational::zero(); cols];
        for (r, &b) in basis.iter().enumerate() {
            x[b] = t[r][cols].clone();
        }
        let point: Vec<BigRational> = x[..nv].to_vec();
        if !inst.is_satisfied_by(&point) {
            return Err(Error::Construction("simplex point fails verification".into()));
        }
        return Ok(LpOutcome::Feasible { point });
    }
    // y'_r = 1 - reduced cost of artificial r; undo the row flips
    let multipliers = (0..rows)
        .map(|r| {
            let y = rat(1) - &cost[ns + r];
            if flip[r] {
                -y
            } else {
                y
            }
        })
        .collect();
    let certificate = FarkasCertificate { multipliers };
    if !certificate.verify(inst) {
        return Err(Error::Construction("Farkas certificate fails verification".into()));
    }
    Ok(LpOutcome::Infeasible { certificate })
}

/// Smallest `s` with `2^s >= 3n + 1`.
pub fn hamming_bound(n: usize) -> usize {
    let target = 3 * n as u128 + 1;
    let mut s = 0;
    while (1u128 << s) < target {
        s += 1;
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremStep {
    pub claim: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReplay {
    pub n: usize,
    pub m: usize,
    pub a: usize,
    /// The bound `2^s > bound` derived from the chain.
    pub strict_bound: u64,
    pub min_s: usize,
    pub steps: Vec<TheoremStep>,
}

/// `(m, a)` with `n = (2^(2m+5) - 5)/3 + a`, if any.
pub fn admissible(n: usize) -> Option<(usize, usize)> {
    (0..30).find_map(|m| {
        let base = ((1u64 << (2 * m + 5)) - 5) / 3;
        [0usize, 1]
            .into_iter()
            .find(|&a| base + a as u64 == n as u64)
            .map(|a| (m, a))
    })
}

/// Replays the analytic infeasibility argument and returns the minimal redundancy.
pub fn theorem_lower_bound(n: usize) -> Result<TheoremReplay> {
    let (m, a) = admissible(n)
        .ok_or_else(|| Error::InvalidArgument(format!("n = {n} is not of the form (2^(2m+5)-5)/3 + a")))?;
    let ni = n as i64;
    let mut steps = Vec::new();
    let mut check = |claim: String, holds: bool| steps.push(TheoremStep { claim, holds });
    // pointwise identities are checked on every integer 0..=n, which pins the quadratics
    let p_a = |x: i64| 3 * ni - 4 * x;
    let p_b = |x: i64| (4 * x - 3 * ni + 1).pow(2) - 3 * ni - 1;
    let bound = if a == 0 {
        let f = |x: i64| (3 * ni + 1 - 4 * x).pow(2);
        let lhs = (3 * ni + 5) * (3 * ni - 7) + 16;
        check(format!("f(0) = {} > (3n+5)(3n-7)+16 = {lhs}", f(0)), f(0) > lhs);
        check(format!("f(1) = {} > 4(3n+5) = {}", f(1), 4 * (3 * ni + 5)), f(1) > 4 * (3 * ni + 5));
        check(
            format!("f(2) = {} > 2(3n+5)+16 = {}", f(2), 2 * (3 * ni + 5) + 16),
            f(2) > 2 * (3 * ni + 5) + 16,
        );
        check(
            format!("(3n+1)/4 = {}/4 is an odd integer", 3 * ni + 1),
            (3 * ni + 1) % 4 == 0 && ((3 * ni + 1) / 4) % 2 == 1,
        );
        check(
            "f(2i) >= 16 for every even argument".into(),
            (0..=ni).step_by(2).all(|x| f(x) >= 16),
        );
        check(
            "f(x) = ((4x-3n+1)^2-3n-1) + 4(3n-4x) + 3n+1, so <f> = 3n+1+4A_1+2A_2".into(),
            (0..=ni).all(|x| f(x) == p_b(x) + 4 * p_a(x) + 3 * ni + 1),
        );
        check("<f> - 8 > 0 since <f> >= 3n+1 > 8".into(), 3 * ni + 1 > 8);
        3 * ni + 5
    } else {
        let g = |x: i64| (3 * ni + 2 - 4 * x) * (3 * ni - 2 - 4 * x);
        check(
            format!("(3n+2)/4 = {}/4 is an integer, so g >= 0 on integers", 3 * ni + 2),
            (3 * ni + 2) % 4 == 0 && (0..=ni).all(|x| g(x) >= 0),
        );
        check(
            format!("g(1) = {} > 2(3n+2) = {}", g(1), 2 * (3 * ni + 2)),
            g(1) > 2 * (3 * ni + 2),
        );
        check(
            format!("g(2) = {} > 2(3n+2) = {}", g(2), 2 * (3 * ni + 2)),
            g(2) > 2 * (3 * ni + 2),
        );
        check(
            format!("g(0) = {} > (3n+2)(3n-4) = {}", g(0), (3 * ni + 2) * (3 * ni - 4)),
            g(0) > (3 * ni + 2) * (3 * ni - 4),
        );
        check(
            "g(x) = ((4x-3n+1)^2-3n-1) + 2(3n-4x) + 3n-4, so <g> = 3n-4+2A_1+2A_2".into(),
            (0..=ni).all(|x| g(x) == p_b(x) + 2 * p_a(x) + 3 * ni - 4),
        );
        check("<g> > 0 since <g> >= 3n-4 > 0".into(), 3 * ni - 4 > 0);
        3 * ni + 2
    };
    if let Some(bad) = steps.iter().find(|s| !s.holds) {
        return Err(Error::Construction(format!("inequality fails: {}", bad.claim)));
    }
    let bound = bound as u64;
    let mut min_s = 0;
    while (1u64 << min_s) <= bound {
        min_s += 1;
    }
    steps.push(TheoremStep {
        claim: format!("hence 2^s > {bound}, i.e. s >= {min_s}"),
        holds: true,
    });
    if min_s != 2 * m + 6 {
        return Err(Error::Construction(format!("derived s = {min_s}, expected {}", 2 * m + 6)));
    }
    Ok(TheoremReplay {
        n,
        m,
        a,
        strict_bound: bound,
        min_s,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::projector_from_involutions;

    fn five_qubit_code() -> StabilizerCode {
        let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
            .iter()
            .map(|s| format!("i^0 {s}").parse().unwrap())
            .collect();
        StabilizerCode { n: 5, generators: gens }
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn five_qubit_enumerator() {
        let code = five_qubit_code();
        let w = stabilizer_enumerator(&code).unwrap();
        assert_eq!(w.values, ints(&[1, 0, 0, 0, 15, 0]));
        let ops: Vec<DenseOperator> = code
            .generators
            .iter()
            .map(|g| DenseOperator::from_pauli(g).unwrap())
            .collect();
        let p = projector_from_involutions(&ops).unwrap();
        let wd = weight_distribution(p.operator(), &rat(2)).unwrap();
        assert_eq!(wd, w);
        assert_eq!(w.redundancy(), Some(4));
        let inst = restricted_constraints(5, 4).unwrap();
        assert_eq!(inst.constraint_count(), 3 + 5 + 2);
        assert!(inst.is_satisfied_by(&w.values));
        assert!(lp_feasible(&inst).unwrap().is_feasible());
    }

    #[test]
    fn averages() {
        let w = five_qubit_code();
        let w = stabilizer_enumerator(&w).unwrap();
        assert_eq!(average(&w, |_| BigInt::one()), rat(1));
        let a1 = average(&w, |i| BigInt::from(15 - 4 * i as i64));
        assert_eq!(a1, w.values[1]);
        let point = WeightEnumerator { n: 3, values: ints(&[1, 0, 0, 0]) };
        assert_eq!(average(&point, |i| BigInt::from(i)), rat(0));
    }

    #[test]
    fn identity_enumerator() {
        let p = DenseOperator::identity(1).unwrap();
        let w = weight_distribution(&p, &rat(2)).unwrap();
        assert_eq!(w.values, ints(&[1, 0]));
    }

    #[test]
    fn gottesman_enumerator_meets_constraints() {
        let code = crate::gottesman::generators(1).unwrap();
        let w = stabilizer_enumerator(&code).unwrap();
        assert_eq!(w.values[0], rat(1));
        assert!(w.values[1].is_zero() && w.values[2].is_zero());
        assert!(restricted_constraints(32, 7).unwrap().is_satisfied_by(&w.values));
    }

    #[test]
    fn bounds_at_41_and_42() {
        for n in [41, 42] {
            assert_eq!(hamming_bound(n), 7);
            assert_eq!(theorem_lower_bound(n).unwrap().min_s, 8);
            match lp_feasible(&restricted_constraints(n, 7).unwrap()).unwrap() {
                LpOutcome::Infeasible { certificate } => {
                    assert!(certificate.verify(&restricted_constraints(n, 7).unwrap()))
                }
                LpOutcome::Feasible { .. } => panic!("n = {n}, s = 7 should be infeasible"),
            }
        }
        assert!(lp_feasible(&restricted_constraints(41, 8).unwrap()).unwrap().is_feasible());
        assert_eq!(theorem_lower_bound(9).unwrap().min_s, 6);
        assert_eq!(theorem_lower_bound(10).unwrap().min_s, 6);
        assert_eq!(hamming_bound(5), 4);
        assert!(theorem_lower_bound(11).is_err());
    }

    #[test]
    fn theorem_beats_hamming_by_one() {
        for m in 0..6 {
            for a in 0..2 {
                let n = ((1usize << (2 * m + 5)) - 5) / 3 + a;
                let r = theorem_lower_bound(n).unwrap();
                assert_eq!(r.min_s, hamming_bound(n) + 1, "n = {n}");
                assert!(r.steps.iter().all(|s| s.holds));
            }
        }
    }

    #[test]
    fn monotone_in_s() {
        for n in 5..=24 {
            let mut prev = false;
            for s in 1..=n {
                let f = lp_feasible(&restricted_constraints(n, s).unwrap()).unwrap().is_feasible();
                assert!(!prev || f, "n = {n}: feasible at s = {} but not at {s}", s - 1);
                prev = f;
            }
            assert!(prev, "n = {n} should be feasible at s = n");
        }
    }
}

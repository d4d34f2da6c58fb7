//! Higgs branches of torus gauge theories by brute force, and the toric
//! Coulomb/Higgs duality check.
//!
//! The torus `(C^*)^n` acts on `x_j` with charge `q_j` and on `y_j` with `-q_j`.
//! The degree-`d` piece of `(C[x, y] / (mu_1, .., mu_n))^T`, with
//! `mu_i = sum_j (q_j)_i x_j y_j` and `deg x_j = deg y_j = 1`, is computed by
//! exact linear algebra on monomials. Multiplication by `mu_i` preserves the
//! exponent difference `a - b` of `x^a y^b`, so the quotient splits into one
//! block per difference vector.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg;
use crate::monopole::{self, HilbertOptions, MonopoleError};
use crate::theory::{TheoryError, TorusSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HiggsError {
    #[error("degree {degree} exceeds the degree cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("charge {charge:?} has length {len}, expected {expected}")]
    ChargeLength { charge: Vec<i64>, len: usize, expected: usize },
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Coulomb(#[from] MonopoleError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiggsProblem {
    torus_rank: usize,
    charges: Vec<Vec<i64>>,
    degree_cap: u32,
}

impl HiggsProblem {
    pub fn new(torus_rank: usize, charges: Vec<Vec<i64>>, degree_cap: u32) -> Result<Self, HiggsError> {
        if let Some(c) = charges.iter().find(|c| c.len() != torus_rank) {
            return Err(HiggsError::ChargeLength { charge: c.clone(), len: c.len(), expected: torus_rank });
        }
        Ok(Self { torus_rank, charges, degree_cap })
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn charges(&self) -> &[Vec<i64>] {
        &self.charges
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    fn is_invariant(&self, delta: &[i64]) -> bool {
        (0..self.torus_rank).all(|i| delta.iter().zip(&self.charges).map(|(k, q)| k * q[i]).sum::<i64>() == 0)
    }

    /// Dimension of the block `x^a y^b` with `a - b = delta` and `z_j = x_j y_j`
    /// of total degree `k`: polynomials in `z` modulo the linear forms `mu_i`.
    fn block_dimension(&self, k: u32) -> u64 {
        let vars = self.charges.len();
        let top = z_monomials(vars, k);
        if k == 0 || self.torus_rank == 0 {
            return top.len() as u64;
        }
        let index: BTreeMap<&Vec<u32>, usize> = top.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        for base in z_monomials(vars, k - 1) {
            for i in 0..self.torus_rank {
                let mut row = BTreeMap::new();
                for (j, q) in self.charges.iter().enumerate() {
                    if q[i] == 0 {
                        continue;
                    }
                    let mut m = base.clone();
                    m[j] += 1;
                    row.insert(index[&m], BigRational::from_integer(q[i].into()));
                }
                rows.push(row);
            }
        }
        top.len() as u64 - linalg::sparse_rank(rows) as u64
    }
}

/// Exponent vectors of all monomials of degree `k` in `vars` variables.
fn z_monomials(vars: usize, k: u32) -> Vec<Vec<u32>> {
    fn go(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[i] = x;
            go(i + 1, left - x, cur, out);
        }
    }
    if vars == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    go(0, k, &mut vec![0; vars], &mut out);
    out
}

/// Difference vectors `delta` with `|delta|_1 <= d` and `|delta|_1 = d mod 2`.
fn differences(vars: usize, d: u32) -> Vec<Vec<i64>> {
    fn go(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for x in -left..=left {
            cur[i] = x;
            go(i + 1, left - x.abs(), cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    go(0, d as i64, &mut vec![0; vars], &mut out);
    out.retain(|v| (d as i64 - v.iter().map(|x| x.abs()).sum::<i64>()) % 2 == 0);
    out
}

pub fn higgs_graded_dimension(p: &HiggsProblem, d: u32) -> Result<u64, HiggsError> {
    if d > p.degree_cap {
        return Err(HiggsError::DegreeCap { degree: d, cap: p.degree_cap });
    }
    let mut cache: BTreeMap<u32, u64> = BTreeMap::new();
    let mut total = 0;
    for delta in differences(p.charges.len(), d) {
        if !p.is_invariant(&delta) {
            continue;
        }
        let k = (d - delta.iter().map(|x| x.unsigned_abs() as u32).sum::<u32>()) / 2;
        total += *cache.entry(k).or_insert_with(|| p.block_dimension(k));
    }
    Ok(total)
}

/// Coefficientwise comparison of the two sides through `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub order: u32,
    /// `(degree, coulomb, higgs)`.
    pub rows: Vec<(u32, BigInt, u64)>,
}

impl DualityReport {
    pub fn first_mismatch(&self) -> Option<&(u32, BigInt, u64)> {
        self.rows.iter().find(|(_, c, h)| *c != BigInt::from(*h))
    }

    pub fn matches(&self) -> bool {
        self.first_mismatch().is_none()
    }

    pub fn verdict(&self) -> String {
        match self.first_mismatch() {
            None => format!("MATCH through t^{}", self.order),
            Some((k, c, h)) => format!("MISMATCH at t^{k}: coulomb={c} higgs={h}"),
        }
    }
}

/// Coulomb branch of `T` on `C^d` against the Higgs branch of `T_F^dual` on `C^d`.
pub fn check_toric_duality(s: &TorusSequence, order: u32) -> Result<DualityReport, HiggsError> {
    let coulomb_theory = s.restrict(None)?;
    let coulomb = monopole::hilbert_series(&coulomb_theory, &HilbertOptions::new(order))?;
    let dual = s.dual()?;
    let charges = dual.inclusion().to_rows();
    let higgs = HiggsProblem::new(dual.inclusion().ncols(), charges, order)?;
    let dims: Vec<u64> =
        (0..=order).into_par_iter().map(|d| higgs_graded_dimension(&higgs, d)).collect::<Result<_, _>>()?;
    let rows = coulomb
        .coefficients()
        .into_iter()
        .zip(dims)
        .enumerate()
        .map(|(d, (c, h))| {
            debug_assert!(c.is_integer());
            (d as u32, c.to_integer(), h)
        })
        .collect();
    Ok(DualityReport { order, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;
    use num_integer::binomial;

    #[test]
    fn a1_anchor() {
        let p = HiggsProblem::new(1, vec![vec![1], vec![-1]], 6).unwrap();
        let dims: Vec<u64> = (0..=6).map(|d| higgs_graded_dimension(&p, d).unwrap()).collect();
        assert_eq!(dims, vec![1, 0, 3, 0, 5, 0, 7]);
        assert_eq!(higgs_graded_dimension(&p, 7), Err(HiggsError::DegreeCap { degree: 7, cap: 6 }));
    }

    #[test]
    fn trivial_group_counts_all_monomials() {
        let p = HiggsProblem::new(0, vec![vec![]; 3], 8).unwrap();
        for d in 0..=8u64 {
            assert_eq!(higgs_graded_dimension(&p, d as u32).unwrap(), binomial(d + 5, 5));
        }
    }

    #[test]
    fn duality_anchors() {
        let diag = TorusSequence::from_inclusion(IntMatrix::from_rows(&[vec![1], vec![1]], 1).unwrap()).unwrap();
        let report = check_toric_duality(&diag, 6).unwrap();
        assert!(report.matches(), "{}", report.verdict());
        assert_eq!(report.verdict(), "MATCH through t^6");
        assert_eq!(report.rows[4], (4, BigInt::from(5), 5));
        let free = TorusSequence::identity(2);
        assert!(check_toric_duality(&free, 5).unwrap().matches());
        assert!(check_toric_duality(&diag, 0).unwrap().matches());
    }

    #[test]
    fn mismatch_verdict_format() {
        let report = DualityReport { order: 2, rows: vec![(0, 1.into(), 1), (1, 2.into(), 0)] };
        assert_eq!(report.verdict(), "MISMATCH at t^1: coulomb=2 higgs=0");
    }
}

//! Coulomb branch algebras of torus gauge theories.
//!
//! For `T = (C^*)^l` acting on `C^d` with weights `rho_1..rho_d`, the algebra
//! has the basis `w^a E[lambda]` with `lambda` in the cocharacter lattice
//! `Z^l`. The `w_i` are central in the classical algebra and
//!
//! ```text
//! E[lambda] * E[mu] = prod_j rho_j(w)^{d_j} E[lambda + mu],
//! d_j = (|rho_j(lambda)| + |rho_j(mu)| - |rho_j(lambda + mu)|) / 2.
//! ```
//!
//! The quantized algebra over `C[h]` uses `E[lambda] q(w) = q(w + h lambda)
//! E[lambda]` and replaces each block `rho_j(w)^{d_j}` by a ladder of
//! `h`-shifted linear factors (see [`AbelianAlgebra::ladder`]). Gradings:
//! `deg w_i = deg h = 2` and `deg E[lambda] = sum_j |rho_j(lambda)|`.

mod element;
mod poly;
mod presentation;

use std::collections::BTreeMap;

use num_integer::binomial;
use num_rational::BigRational;
use thiserror::Error;

use crate::linalg::{self, IntMatrix};
use crate::theory::{GaugeTheory, TheoryError};

pub use element::AbelianElement;
pub use poly::Poly;
pub use presentation::{presentation, GenMonomial, Generator, GeneratorKind, Presentation, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("abelian algebras need a torus gauge group; found gl factors {0:?}")]
    NotTorus(Vec<usize>),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("element has rank {got}, algebra has rank {expected}")]
    RankMismatch { got: usize, expected: usize },
    #[error("classical operations take h-free elements")]
    HbarPresent,
    #[error("divergent: Coulomb branch is not a cone (weights do not span; witness direction {0:?})")]
    Divergent(Vec<i64>),
    #[error("element syntax: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianAlgebra {
    rank: usize,
    weights: Vec<Vec<i64>>,
}

/// `E[lambda] * E[-lambda]` next to the product of `rho_j(w)^{|rho_j(lambda)|}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizationWitness {
    pub lambda: Vec<i64>,
    pub product: AbelianElement,
    pub expected: AbelianElement,
}

impl LocalizationWitness {
    pub fn holds(&self) -> bool {
        self.product == self.expected
    }
}

impl AbelianAlgebra {
    pub fn from_theory(theory: &GaugeTheory) -> Result<Self, AbelianError> {
        if !theory.gl_factors().is_empty() {
            return Err(AbelianError::NotTorus(theory.gl_factors().to_vec()));
        }
        let theory = theory.validate()?;
        Ok(Self { rank: theory.torus_rank(), weights: theory.weights().to_vec() })
    }

    pub fn new(rank: usize, weights: Vec<Vec<i64>>) -> Result<Self, AbelianError> {
        Self::from_theory(&GaugeTheory::torus(rank, weights)?)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn theory(&self) -> GaugeTheory {
        GaugeTheory::torus(self.rank, self.weights.clone()).expect("validated on construction")
    }

    /// `rho_j(lambda)` for every weight.
    pub fn pairings(&self, lambda: &[i64]) -> Vec<i64> {
        self.weights.iter().map(|r| linalg::dot(r, lambda)).collect()
    }

    /// t-degree of `E[lambda]`, i.e. `2 Delta(lambda)`.
    pub fn lattice_degree(&self, lambda: &[i64]) -> u32 {
        self.pairings(lambda).iter().map(|x| x.unsigned_abs() as u32).sum()
    }

    /// The exponents `d_j(lambda, mu)`.
    pub fn structure_exponents(&self, lambda: &[i64], mu: &[i64]) -> Vec<u32> {
        self.weights
            .iter()
            .map(|r| {
                let (a, b) = (linalg::dot(r, lambda), linalg::dot(r, mu));
                ((a.abs() + b.abs() - (a + b).abs()) / 2) as u32
            })
            .collect()
    }

    fn rho(&self, j: usize) -> Poly {
        Poly::linear(&self.weights[j], 0)
    }

    /// `prod_j rho_j(w)^{d_j(lambda, mu)}`.
    pub fn classical_factor(&self, lambda: &[i64], mu: &[i64]) -> Poly {
        let mut out = Poly::one(self.rank);
        for (j, d) in self.structure_exponents(lambda, mu).into_iter().enumerate() {
            if d > 0 {
                out = out.mul(&self.rho(j).pow(d));
            }
        }
        out
    }

    /// Shifts `k` of the factors `rho_j(w) + k h` for weight `j` in
    /// `E[lambda] E[mu]`, with `a = rho_j(lambda)` and `b = rho_j(mu)`:
    /// empty when `a, b` have the same sign, `max(a+b, 0) .. a-1` when
    /// `a > 0 > b`, and `a .. min(a+b, 0)-1` when `a < 0 < b`.
    pub fn ladder(a: i64, b: i64) -> std::ops::Range<i64> {
        if a > 0 && b < 0 {
            (a + b).max(0)..a
        } else if a < 0 && b > 0 {
            a..(a + b).min(0)
        } else {
            0..0
        }
    }

    pub fn quantized_factor(&self, lambda: &[i64], mu: &[i64]) -> Poly {
        let mut out = Poly::one(self.rank);
        for (j, r) in self.weights.iter().enumerate() {
            for k in Self::ladder(linalg::dot(r, lambda), linalg::dot(r, mu)) {
                out = out.mul(&self.rho(j).add(&Poly::hbar(self.rank).scale(&BigRational::from_integer(k.into()))));
            }
        }
        out
    }

    fn check_rank(&self, a: &AbelianElement) -> Result<(), AbelianError> {
        if a.rank() != self.rank {
            return Err(AbelianError::RankMismatch { got: a.rank(), expected: self.rank });
        }
        Ok(())
    }

    pub fn multiply_classical(&self, a: &AbelianElement, b: &AbelianElement) -> Result<AbelianElement, AbelianError> {
        self.check_rank(a)?;
        self.check_rank(b)?;
        if a.has_hbar() || b.has_hbar() {
            return Err(AbelianError::HbarPresent);
        }
        let mut out = AbelianElement::zero(self.rank);
        for (l, p) in a.terms() {
            for (m, q) in b.terms() {
                out.add_term(add(l, m), p.mul(q).mul(&self.classical_factor(l, m)));
            }
        }
        Ok(out)
    }

    pub fn multiply_quantized(&self, a: &AbelianElement, b: &AbelianElement) -> Result<AbelianElement, AbelianError> {
        self.check_rank(a)?;
        self.check_rank(b)?;
        let mut out = AbelianElement::zero(self.rank);
        for (l, p) in a.terms() {
            for (m, q) in b.terms() {
                let coeff = p.mul(&q.shift(l)).mul(&self.quantized_factor(l, m));
                out.add_term(add(l, m), coeff);
            }
        }
        Ok(out)
    }

    /// `(ab - ba) / h` at `h = 0`.
    pub fn poisson_bracket(&self, a: &AbelianElement, b: &AbelianElement) -> Result<AbelianElement, AbelianError> {
        if a.has_hbar() || b.has_hbar() {
            return Err(AbelianError::HbarPresent);
        }
        let commutator = self.multiply_quantized(a, b)?.sub(&self.multiply_quantized(b, a)?);
        let quotient = commutator.div_hbar();
        assert!(quotient.is_some(), "commutator {commutator} is not divisible by h");
        Ok(quotient.expect("checked").classical())
    }

    /// Common t-degree of all terms, or `None` for zero or inhomogeneous elements.
    pub fn t_degree(&self, a: &AbelianElement) -> Option<u32> {
        let mut degrees = a.terms().flat_map(|(l, p)| {
            let base = self.lattice_degree(l);
            p.terms().map(move |(e, _)| base + 2 * e.iter().sum::<u32>()).collect::<Vec<_>>()
        });
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Saturated basis of the directions on which every weight vanishes.
    pub fn lineality(&self) -> Vec<Vec<i64>> {
        if self.rank == 0 {
            return Vec::new();
        }
        let m = IntMatrix::from_rows(&self.weights, self.rank).expect("weights have the torus rank");
        linalg::kernel_basis(&m)
    }

    pub fn is_good(&self) -> bool {
        self.lineality().is_empty()
    }

    fn require_good(&self) -> Result<(), AbelianError> {
        match self.lineality().into_iter().next() {
            Some(v) => Err(AbelianError::Divergent(v)),
            None => Ok(()),
        }
    }

    /// Lattice points of t-degree at most `order` with their degrees.
    fn lattice_points(&self, order: u32) -> Vec<(Vec<i64>, u32)> {
        let l = self.rank;
        if l == 0 {
            return vec![(Vec::new(), 0)];
        }
        // the sublevel set is a polytope with vertices on the arrangement rays
        let normals: Vec<Vec<i64>> = self.weights.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
        let mut bound = vec![0i64; l];
        for r in linalg::arrangement_rays(&normals, l) {
            let deg = self.lattice_degree(&r) as i64;
            for i in 0..l {
                bound[i] = bound[i].max(r[i].abs() * order as i64 / deg);
            }
        }
        let mut out = Vec::new();
        let mut point: Vec<i64> = bound.iter().map(|b| -b).collect();
        loop {
            let deg = self.lattice_degree(&point);
            if deg <= order {
                out.push((point.clone(), deg));
            }
            let mut i = l;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if point[i] < bound[i] {
                    point[i] += 1;
                    break;
                }
                point[i] = -bound[i];
            }
        }
    }

    fn w_monomials(&self, k: u32) -> u64 {
        if self.rank == 0 {
            return u64::from(k == 0);
        }
        binomial(k as u64 + self.rank as u64 - 1, self.rank as u64 - 1)
    }

    /// Dimensions of the t-degree pieces `0..=order`, by counting `w^a E[lambda]`.
    pub fn graded_dimensions(&self, order: u32) -> Result<Vec<u64>, AbelianError> {
        let mut out = vec![0u64; order as usize + 1];
        for (d, by_class) in self.refined_graded_dimensions(order)?.into_iter().enumerate() {
            out[d] = by_class.values().sum();
        }
        Ok(out)
    }

    /// Per-degree dimensions split by the lattice point `lambda`.
    pub fn refined_graded_dimensions(&self, order: u32) -> Result<Vec<BTreeMap<Vec<i64>, u64>>, AbelianError> {
        self.require_good()?;
        let mut out = vec![BTreeMap::new(); order as usize + 1];
        for (lambda, deg) in self.lattice_points(order) {
            for d in (deg..=order).step_by(2) {
                *out[d as usize].entry(lambda.clone()).or_insert(0) += self.w_monomials((d - deg) / 2);
            }
        }
        Ok(out)
    }

    pub fn graded_dimension(&self, d: u32) -> Result<u64, AbelianError> {
        Ok(self.graded_dimensions(d)?[d as usize])
    }

    pub fn graded_dimension_refined(&self, d: u32) -> Result<BTreeMap<Vec<i64>, u64>, AbelianError> {
        Ok(self.refined_graded_dimensions(d)?.swap_remove(d as usize))
    }

    pub fn localization_units(&self, lambda: &[i64]) -> Result<LocalizationWitness, AbelianError> {
        if lambda.len() != self.rank {
            return Err(AbelianError::RankMismatch { got: lambda.len(), expected: self.rank });
        }
        let neg: Vec<i64> = lambda.iter().map(|x| -x).collect();
        let product = self.multiply_classical(&AbelianElement::e(lambda), &AbelianElement::e(&neg))?;
        let mut expected = Poly::one(self.rank);
        for (j, a) in self.pairings(lambda).into_iter().enumerate() {
            expected = expected.mul(&self.rho(j).pow(a.unsigned_abs() as u32));
        }
        Ok(LocalizationWitness {
            lambda: lambda.to_vec(),
            product,
            expected: AbelianElement::from_poly(expected),
        })
    }

    pub fn parse_element(&self, text: &str) -> Result<AbelianElement, AbelianError> {
        AbelianElement::parse(text, self.rank)
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

//! Polynomials in `w_1..w_l` and `h` (for hbar) with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vectors have length `l + 1`; the last slot is the power of `h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    rank: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn zero(rank: usize) -> Self {
        Self { rank, terms: BTreeMap::new() }
    }

    pub fn constant(rank: usize, c: BigRational) -> Self {
        let mut p = Self::zero(rank);
        p.add_term(vec![0; rank + 1], c);
        p
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, BigRational::one())
    }

    pub fn w(rank: usize, i: usize) -> Self {
        let mut e = vec![0; rank + 1];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn hbar(rank: usize) -> Self {
        let mut e = vec![0; rank + 1];
        e[rank] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Vec<u32>, c: BigRational) -> Self {
        let mut p = Self::zero(exponents.len() - 1);
        p.add_term(exponents, c);
        p
    }

    /// `sum_i coeffs[i] w_i + shift * h`.
    pub fn linear(coeffs: &[i64], shift: i64) -> Self {
        let rank = coeffs.len();
        let mut p = Self::zero(rank);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; rank + 1];
            e[i] = 1;
            p.add_term(e, BigRational::from_integer(c.into()));
        }
        let mut e = vec![0; rank + 1];
        e[rank] = 1;
        p.add_term(e, BigRational::from_integer(shift.into()));
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: BigRational) {
        debug_assert_eq!(exponents.len(), self.rank + 1);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.rank);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.rank);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.rank), |acc, _| acc.mul(self))
    }

    /// Substitute `w_i -> w_i + lambda_i h`.
    pub fn shift(&self, lambda: &[i64]) -> Self {
        if lambda.iter().all(|&x| x == 0) {
            return self.clone();
        }
        let images: Vec<Poly> = (0..self.rank)
            .map(|i| {
                let mut coeffs = vec![0; self.rank];
                coeffs[i] = 1;
                Poly::linear(&coeffs, lambda[i])
            })
            .collect();
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            let mut term = Poly::monomial(
                {
                    let mut h = vec![0; self.rank + 1];
                    h[self.rank] = e[self.rank];
                    h
                },
                c.clone(),
            );
            for i in 0..self.rank {
                if e[i] > 0 {
                    term = term.mul(&images[i].pow(e[i]));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn has_hbar(&self) -> bool {
        self.terms.keys().any(|e| e[self.rank] > 0)
    }

    /// Specialize `h = 0`.
    pub fn classical(&self) -> Self {
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            if e[self.rank] == 0 {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Exact division by `h`, or `None` if some term lacks `h`.
    pub fn div_hbar(&self) -> Option<Self> {
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            if e[self.rank] == 0 {
                return None;
            }
            let mut e = e.clone();
            e[self.rank] -= 1;
            out.add_term(e, c.clone());
        }
        Some(out)
    }

    /// Total degree of every monomial, with `deg w_i = deg h = 1`; `None`
    /// for inhomogeneous or zero polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }
}

impl fmt::Display for Poly {
    /// `w1^2*h - 3/2*w2`; rank one prints `w` instead of `w1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let factors = monomial_factors(e, self.rank);
            let mag = c.abs();
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", mag, factors.join("*"))
            };
            match (idx, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn w_name(rank: usize, i: usize) -> String {
    if rank == 1 {
        "w".to_string()
    } else {
        format!("w{}", i + 1)
    }
}

/// Factor strings `w1^a`, ..., `h^c` for one exponent vector.
pub(crate) fn monomial_factors(e: &[u32], rank: usize) -> Vec<String> {
    let mut out = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let name = if i == rank { "h".to_string() } else { w_name(rank, i) };
        out.push(if k == 1 { name } else { format!("{name}^{k}") });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn shift_expands_binomially() {
        // (w)^2 with w -> w + 2h  gives w^2 + 4wh + 4h^2
        let w2 = Poly::w(1, 0).pow(2);
        let s = w2.shift(&[2]);
        let expected = Poly::linear(&[1], 2).pow(2);
        assert_eq!(s, expected);
        assert_eq!(s.to_string(), "w^2 + 4*w*h + 4*h^2");
    }

    #[test]
    fn hbar_division() {
        let p = Poly::hbar(2).mul(&Poly::linear(&[1, -1], 3));
        assert_eq!(p.div_hbar().unwrap(), Poly::linear(&[1, -1], 3));
        assert!(Poly::w(2, 0).div_hbar().is_none());
        assert_eq!(p.classical(), Poly::zero(2));
        assert_eq!(Poly::linear(&[1, 0], 5).classical(), Poly::w(2, 0));
    }

    #[test]
    fn degrees_and_display() {
        let p = Poly::linear(&[2, 0], 0).mul(&Poly::w(2, 1)).add(&Poly::constant(2, q(-3)));
        assert_eq!(p.homogeneous_degree(), None);
        assert_eq!(p.to_string(), "2*w1*w2 - 3");
        assert_eq!(Poly::linear(&[1, 1], 0).pow(3).homogeneous_degree(), Some(3));
        assert_eq!(Poly::zero(1).to_string(), "0");
    }
}

//! Elements `sum_lambda p_lambda(w, h) E[lambda]` in normal form.
//!
//! Text syntax (also used for output):
//!
//! ```text
//! element := ["-"] term (("+" | "-") term)*
//! term    := factor ("*" factor)*
//! factor  := rational | "w" | "w" index | "h" | "E[" int ("," int)* "]"   , each optionally "^" exponent
//! ```
//!
//! `w` alone is accepted only in rank one. A term without an `E[...]` factor
//! sits on the origin `E[0,...,0]`; `E` factors may not be repeated. Output
//! lists lattice points in increasing lexicographic order and, within one
//! point, monomials in decreasing lexicographic order of `(w_1, .., w_l, h)`
//! exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{monomial_factors, Poly};
use super::AbelianError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianElement {
    rank: usize,
    terms: BTreeMap<Vec<i64>, Poly>,
}

impl AbelianElement {
    pub fn zero(rank: usize) -> Self {
        Self { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::term(Poly::one(rank), vec![0; rank])
    }

    /// `p * E[lambda]`.
    pub fn term(p: Poly, lambda: Vec<i64>) -> Self {
        let rank = p.rank();
        assert_eq!(lambda.len(), rank, "lattice point has the wrong length");
        let mut out = Self::zero(rank);
        out.add_term(lambda, p);
        out
    }

    /// The fundamental class `E[lambda]`.
    pub fn e(lambda: &[i64]) -> Self {
        Self::term(Poly::one(lambda.len()), lambda.to_vec())
    }

    pub fn w(rank: usize, i: usize) -> Self {
        Self::term(Poly::w(rank, i), vec![0; rank])
    }

    pub fn hbar(rank: usize) -> Self {
        Self::term(Poly::hbar(rank), vec![0; rank])
    }

    pub fn from_poly(p: Poly) -> Self {
        let rank = p.rank();
        Self::term(p, vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Poly)> {
        self.terms.iter()
    }

    /// Lattice points with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.terms.keys()
    }

    pub fn coefficient(&self, lambda: &[i64]) -> Poly {
        self.terms.get(lambda).cloned().unwrap_or_else(|| Poly::zero(self.rank))
    }

    pub fn add_term(&mut self, lambda: Vec<i64>, p: Poly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&lambda) {
            Some(old) => old.add(&p),
            None => p,
        };
        if !sum.is_zero() {
            self.terms.insert(lambda, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, p) in &other.terms {
            out.add_term(l.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.rank);
        for (l, p) in &self.terms {
            out.add_term(l.clone(), p.scale(c));
        }
        out
    }

    pub fn has_hbar(&self) -> bool {
        self.terms.values().any(Poly::has_hbar)
    }

    /// Specialize `h = 0` coefficientwise.
    pub fn classical(&self) -> Self {
        let mut out = Self::zero(self.rank);
        for (l, p) in &self.terms {
            out.add_term(l.clone(), p.classical());
        }
        out
    }

    pub fn div_hbar(&self) -> Option<Self> {
        let mut out = Self::zero(self.rank);
        for (l, p) in &self.terms {
            out.add_term(l.clone(), p.div_hbar()?);
        }
        Some(out)
    }

    pub fn parse(text: &str, rank: usize) -> Result<Self, AbelianError> {
        parse_element(text, rank)
    }
}

fn lattice(lambda: &[i64]) -> String {
    let parts: Vec<String> = lambda.iter().map(|x| x.to_string()).collect();
    format!("E[{}]", parts.join(","))
}

impl fmt::Display for AbelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (l, p) in &self.terms {
            for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
                let mut factors = monomial_factors(e, self.rank);
                factors.push(lattice(l));
                let mag = c.abs();
                let body = if mag.is_one() { factors.join("*") } else { format!("{}*{}", mag, factors.join("*")) };
                match (first, c.is_negative()) {
                    (true, false) => write!(f, "{body}")?,
                    (true, true) => write!(f, "-{body}")?,
                    (false, false) => write!(f, " + {body}")?,
                    (false, true) => write!(f, " - {body}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

fn parse_element(text: &str, rank: usize) -> Result<AbelianElement, AbelianError> {
    let err = |m: String| AbelianError::Parse(m);
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty element".into()));
    }
    if compact == "0" {
        return Ok(AbelianElement::zero(rank));
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut depth = 0usize;
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.checked_sub(1).ok_or_else(|| err("unbalanced ']'".into()))?,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && prev != Some('^') {
            if current.is_empty() {
                if prev.is_some() {
                    return Err(err(format!("dangling '{ch}'")));
                }
            } else {
                pieces.push((negative, std::mem::take(&mut current)));
            }
            negative = ch == '-';
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if current.is_empty() {
        return Err(err("trailing sign".into()));
    }
    pieces.push((negative, current));

    let mut out = AbelianElement::zero(rank);
    for (negative, piece) in pieces {
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; rank + 1];
        let mut lambda: Option<Vec<i64>> = None;
        for factor in split_factors(&piece) {
            let (base, power) = match factor.rsplit_once('^') {
                Some((b, p)) if !b.ends_with(']') || !p.contains(']') => {
                    (b, p.parse::<u32>().map_err(|_| err(format!("bad exponent in '{factor}'")))?)
                }
                _ => (factor, 1),
            };
            if let Some(inner) = base.strip_prefix("E[").and_then(|s| s.strip_suffix(']')) {
                if lambda.is_some() {
                    return Err(err(format!("repeated E factor in '{piece}'")));
                }
                let v: Vec<i64> = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|x| x.parse().map_err(|_| err(format!("bad lattice point '{base}'"))))
                        .collect::<Result<_, _>>()?
                };
                if v.len() != rank {
                    return Err(err(format!("lattice point '{base}' has length {}, expected {rank}", v.len())));
                }
                if power != 1 {
                    return Err(err("E factors cannot be raised to powers".into()));
                }
                lambda = Some(v);
            } else if base == "h" {
                exps[rank] += power;
            } else if base == "w" && rank == 1 {
                exps[0] += power;
            } else if let Some(i) = base.strip_prefix('w').and_then(|s| s.parse::<usize>().ok()) {
                if i == 0 || i > rank {
                    return Err(err(format!("variable '{base}' out of range for rank {rank}")));
                }
                exps[i - 1] += power;
            } else {
                let c: BigRational = base.parse().map_err(|_| err(format!("unknown factor '{factor}'")))?;
                coeff *= num_traits::Pow::pow(c, power);
            }
        }
        if negative {
            coeff = -coeff;
        }
        out.add_term(lambda.unwrap_or_else(|| vec![0; rank]), Poly::monomial(exps, coeff));
    }
    Ok(out)
}

/// Split on `*` outside brackets.
fn split_factors(term: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in term.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&term[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&term[start..]);
    out
}

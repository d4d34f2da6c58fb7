//! Truncated power series in `t` with exact rational coefficients.
//!
//! A [`TruncatedSeries`] stores `sum c_{k,a} t^k z^a + O(t^{order+1})` where
//! `k` ranges over `0..=order` and `a` is a Laurent exponent vector in the
//! fugacity variables `z_1..z_r`. The fugacity rank `r` is fixed per series
//! and may be zero.
//!
//! Invariants:
//! - no stored coefficient is zero;
//! - no stored `t`-exponent exceeds `order`;
//! - every fugacity exponent vector has length `rank`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("fugacity rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("geometric step must be positive")]
    ZeroStep,
    #[error("series is not a unit: constant term must be a nonzero rational with trivial fugacity")]
    NotUnit,
    #[error("cannot parse series: {0}")]
    Parse(String),
}

/// Key of a stored term: `t`-exponent followed by fugacity exponents.
/// The derived ordering is the display ordering.
pub type TermKey = (u32, Vec<i64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    order: u32,
    rank: usize,
    terms: BTreeMap<TermKey, BigRational>,
}

impl TruncatedSeries {
    pub fn zero(order: u32, rank: usize) -> Self {
        Self { order, rank, terms: BTreeMap::new() }
    }

    pub fn one(order: u32, rank: usize) -> Self {
        Self::monomial(0, vec![0; rank], BigRational::one(), order)
    }

    /// `coeff * t^t_exp * z^fugacity`, dropped if `t_exp > order`.
    pub fn monomial(t_exp: u32, fugacity: Vec<i64>, coeff: BigRational, order: u32) -> Self {
        let rank = fugacity.len();
        let mut s = Self::zero(order, rank);
        s.add_term(t_exp, fugacity, coeff);
        s
    }

    pub fn from_coefficients<I, C>(order: u32, coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        let mut s = Self::zero(order, 0);
        for (k, c) in coeffs.into_iter().enumerate() {
            s.add_term(k as u32, Vec::new(), BigRational::from_integer(c.into()));
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn fugacity_rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t_exp: u32, fugacity: &[i64]) -> BigRational {
        self.terms
            .get(&(t_exp, fugacity.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Accumulate a term in place, respecting truncation and the nonzero invariant.
    pub fn add_term(&mut self, t_exp: u32, fugacity: Vec<i64>, coeff: BigRational) {
        assert_eq!(fugacity.len(), self.rank, "fugacity vector has wrong length");
        if t_exp > self.order || coeff.is_zero() {
            return;
        }
        let key = (t_exp, fugacity);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Lower the truncation order, discarding terms above it.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        Self {
            order,
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|((k, _), _)| *k <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn check_rank(&self, other: &Self) -> Result<(), SeriesError> {
        if self.rank != other.rank {
            return Err(SeriesError::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_rank(other)?;
        let mut out = self.truncate(other.order);
        for ((k, z), c) in &other.terms {
            out.add_term(*k, z.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.order, self.rank);
        for ((k, z), v) in &self.terms {
            out.add_term(*k, z.clone(), v * c);
        }
        out
    }

    /// Multiply by the monomial `t^shift z^fugacity`.
    pub fn shift(&self, t_shift: u32, fugacity: &[i64]) -> Self {
        assert_eq!(fugacity.len(), self.rank, "fugacity vector has wrong length");
        let mut out = Self::zero(self.order, self.rank);
        for ((k, z), v) in &self.terms {
            let zz = z.iter().zip(fugacity).map(|(a, b)| a + b).collect();
            out.add_term(k + t_shift, zz, v.clone());
        }
        out
    }

    /// Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_rank(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(order, self.rank);
        for ((ka, za), ca) in &self.terms {
            if *ka > order {
                break;
            }
            for ((kb, zb), cb) in &other.terms {
                if ka + kb > order {
                    break;
                }
                let z = za.iter().zip(zb).map(|(a, b)| a + b).collect();
                out.add_term(ka + kb, z, ca * cb);
            }
        }
        Ok(out)
    }

    /// Inverse of a series whose constant term is a nonzero rational.
    pub fn inverse_unit(&self) -> Result<Self, SeriesError> {
        let zero_fug = vec![0; self.rank];
        let constant_slot: Vec<_> = self.terms.range((0, Vec::new())..(1, Vec::new())).collect();
        if constant_slot.len() != 1 || constant_slot[0].0 .1 != zero_fug {
            return Err(SeriesError::NotUnit);
        }
        let inv_a0 = constant_slot[0].1.recip();
        // by_degree[k] holds the t^k slice of the result as (fugacity, coeff) pairs
        let mut by_degree: Vec<BTreeMap<Vec<i64>, BigRational>> = vec![BTreeMap::new(); self.order as usize + 1];
        by_degree[0].insert(zero_fug, inv_a0.clone());
        for k in 1..=self.order {
            let mut acc: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
            for ((j, za), ca) in self.terms.range((1, Vec::new())..) {
                if *j > k {
                    break;
                }
                for (zb, cb) in &by_degree[(k - j) as usize] {
                    let z: Vec<i64> = za.iter().zip(zb).map(|(a, b)| a + b).collect();
                    *acc.entry(z).or_insert_with(BigRational::zero) += ca * cb;
                }
            }
            let slice = &mut by_degree[k as usize];
            for (z, c) in acc {
                if !c.is_zero() {
                    slice.insert(z, -c * &inv_a0);
                }
            }
        }
        let mut out = Self::zero(self.order, self.rank);
        for (k, slice) in by_degree.into_iter().enumerate() {
            for (z, c) in slice {
                out.add_term(k as u32, z, c);
            }
        }
        Ok(out)
    }

    /// Specialize every fugacity to 1.
    pub fn unrefine(&self) -> Self {
        let mut out = Self::zero(self.order, 0);
        for ((k, _), c) in &self.terms {
            out.add_term(*k, Vec::new(), c.clone());
        }
        out
    }

    /// Coefficients of `t^0..=t^order` of the unrefined series.
    pub fn coefficients(&self) -> Vec<BigRational> {
        let flat = self.unrefine();
        (0..=self.order).map(|k| flat.coefficient(k, &[])).collect()
    }

    /// Parse the display format back into a series of the given order and rank.
    pub fn parse(text: &str, order: u32, rank: usize) -> Result<Self, SeriesError> {
        parse_series(text, order, rank)
    }
}

/// `sum_{j >= 0} t^{jk}` truncated at `order`.
pub fn geometric_factor(k: u32, order: u32) -> Result<TruncatedSeries, SeriesError> {
    if k == 0 {
        return Err(SeriesError::ZeroStep);
    }
    let mut s = TruncatedSeries::zero(order, 0);
    let mut e = 0;
    while e <= order {
        s.add_term(e, Vec::new(), BigRational::one());
        e += k;
    }
    Ok(s)
}

fn fugacity_name(rank: usize, i: usize) -> String {
    if rank == 1 {
        "z".to_string()
    } else {
        format!("z{}", i + 1)
    }
}

fn power(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((k, z), c)) in self.terms.iter().enumerate() {
            let mut parts = Vec::new();
            if *k > 0 {
                parts.push(power("t", *k as i64));
            }
            for (i, &e) in z.iter().enumerate() {
                if e != 0 {
                    parts.push(power(&fugacity_name(self.rank, i), e));
                }
            }
            let negative = c.is_negative();
            let mag = c.abs();
            let body = if parts.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                parts.join("*")
            } else {
                format!("{}*{}", mag, parts.join("*"))
            };
            match (idx, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

fn parse_series(text: &str, order: u32, rank: usize) -> Result<TruncatedSeries, SeriesError> {
    let err = |m: &str| SeriesError::Parse(m.to_string());
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = TruncatedSeries::zero(order, rank);
    if compact == "0" {
        return Ok(out);
    }
    // split into signed terms; a '-' right after '^' belongs to an exponent
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev = None;
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && prev != Some('^') {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
            } else if prev.is_some() {
                return Err(err("dangling sign"));
            }
            negative = ch == '-';
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if current.is_empty() {
        return Err(err("empty term"));
    }
    terms.push((negative, current));

    for (negative, term) in terms {
        let mut coeff = BigRational::one();
        let mut t_exp = 0u32;
        let mut fug = vec![0i64; rank];
        for factor in term.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<i64>().map_err(|_| err(factor))?),
                None => (factor, 1),
            };
            if base == "t" {
                t_exp += u32::try_from(exp).map_err(|_| err("negative t exponent"))?;
            } else if let Some(idx) = fugacity_index(base, rank) {
                fug[idx] += exp;
            } else {
                let c: BigRational = base.parse().map_err(|_| err(factor))?;
                coeff *= c;
            }
        }
        if negative {
            coeff = -coeff;
        }
        out.add_term(t_exp, fug, coeff);
    }
    Ok(out)
}

fn fugacity_index(name: &str, rank: usize) -> Option<usize> {
    if rank == 1 && name == "z" {
        return Some(0);
    }
    let i: usize = name.strip_prefix('z')?.parse().ok()?;
    (1..=rank).contains(&i).then(|| i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn square_of_one_plus_t() {
        let a = TruncatedSeries::from_coefficients(5, [1, 1]);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, TruncatedSeries::from_coefficients(5, [1, 2, 1]));
        assert_eq!(sq.to_string(), "1 + 2*t + t^2");
    }

    #[test]
    fn multiplying_by_one_is_identity() {
        let a = TruncatedSeries::from_coefficients(4, [3, 0, -2, 7]);
        assert_eq!(a.mul(&TruncatedSeries::one(4, 0)).unwrap(), a);
    }

    #[test]
    fn telescoping_product() {
        let geo = geometric_factor(1, 4).unwrap();
        let one_minus_t = TruncatedSeries::from_coefficients(4, [1, -1]);
        assert_eq!(geo.mul(&one_minus_t).unwrap(), TruncatedSeries::one(4, 0));
    }

    #[test]
    fn truncation_is_min_of_orders() {
        let a = TruncatedSeries::from_coefficients(6, [1, 1, 1, 1, 1, 1, 1]);
        let b = TruncatedSeries::from_coefficients(2, [1, 1]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.order(), 2);
        assert_eq!(p, TruncatedSeries::from_coefficients(2, [1, 2, 2]));
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let a = TruncatedSeries::one(3, 0);
        let b = TruncatedSeries::one(3, 1);
        assert_eq!(a.mul(&b), Err(SeriesError::RankMismatch(0, 1)));
    }

    #[test]
    fn geometric_factors() {
        assert_eq!(geometric_factor(1, 3).unwrap().to_string(), "1 + t + t^2 + t^3");
        assert_eq!(geometric_factor(2, 5).unwrap().to_string(), "1 + t^2 + t^4");
        assert_eq!(geometric_factor(7, 3).unwrap().to_string(), "1");
        assert_eq!(geometric_factor(0, 3), Err(SeriesError::ZeroStep));
    }

    #[test]
    fn inverses() {
        let a = TruncatedSeries::from_coefficients(4, [1, -1]);
        assert_eq!(a.inverse_unit().unwrap(), geometric_factor(1, 4).unwrap());
        let two = TruncatedSeries::from_coefficients(4, [2]);
        assert_eq!(two.inverse_unit().unwrap().coefficient(0, &[]), BigRational::new(1.into(), 2.into()));
        let b = TruncatedSeries::from_coefficients(5, [1, 0, -1]);
        assert_eq!(b.inverse_unit().unwrap().to_string(), "1 + t^2 + t^4");
    }

    #[test]
    fn non_units_rejected() {
        let a = TruncatedSeries::from_coefficients(4, [0, 1]);
        assert_eq!(a.inverse_unit(), Err(SeriesError::NotUnit));
        let b = TruncatedSeries::monomial(0, vec![1], q(1), 3);
        assert_eq!(b.inverse_unit(), Err(SeriesError::NotUnit));
    }

    #[test]
    fn inverse_with_fugacity() {
        // 1 - t z has inverse sum t^k z^k
        let mut a = TruncatedSeries::one(3, 1);
        a.add_term(1, vec![1], q(-1));
        let inv = a.inverse_unit().unwrap();
        assert_eq!(inv.to_string(), "1 + t*z + t^2*z^2 + t^3*z^3");
    }

    #[test]
    fn display_with_fugacity_and_signs() {
        let mut s = TruncatedSeries::zero(3, 1);
        s.add_term(1, vec![1], q(1));
        s.add_term(1, vec![-1], q(1));
        assert_eq!(s.to_string(), "t*z^-1 + t*z");

        let mut m = TruncatedSeries::zero(3, 2);
        m.add_term(0, vec![0, 0], q(-1));
        m.add_term(2, vec![1, -2], BigRational::new(3.into(), 2.into()));
        m.add_term(3, vec![0, 1], q(-4));
        assert_eq!(m.to_string(), "-1 + 3/2*t^2*z1*z2^-2 - 4*t^3*z2");
        assert_eq!(TruncatedSeries::zero(2, 0).to_string(), "0");
    }

    #[test]
    fn parse_inverts_display() {
        for text in ["1 + 3*t^2 + 5*t^4", "t*z^-1 + t*z", "-2 + t - 1/3*t^3", "0"] {
            let rank = usize::from(text.contains('z'));
            let s = TruncatedSeries::parse(text, 4, rank).unwrap();
            assert_eq!(s.to_string(), text);
        }
        let m = TruncatedSeries::parse("-1 + 3/2*t^2*z1*z2^-2 - 4*t^3*z2", 3, 2).unwrap();
        assert_eq!(m.to_string(), "-1 + 3/2*t^2*z1*z2^-2 - 4*t^3*z2");
        assert!(TruncatedSeries::parse("1 + + t", 3, 0).is_err());
        assert!(TruncatedSeries::parse("1 + y", 3, 0).is_err());
    }

    #[test]
    fn unrefine_sums_fugacities() {
        let s = TruncatedSeries::parse("1 + t*z^-1 + t*z + t^2*z^2 + t^2 + t^2*z^-2", 2, 1).unwrap();
        assert_eq!(s.unrefine().to_string(), "1 + 2*t + 3*t^2");
    }
}

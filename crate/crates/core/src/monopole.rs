//! Monopole-formula Hilbert series.
//!
//! For a dominant coweight `m` the dimension is
//!
//! ```text
//! Delta(m) = - sum_{alpha > 0} |<alpha, m>| + 1/2 sum_{rho in N} |<rho, m>|
//! ```
//!
//! and the series is `H(t) = sum_m t^{2 Delta(m)} P(t; m)` where
//! `P(t; m) = prod_i 1 / (1 - t^{2 d_i})` runs over the Casimir degrees `d_i`
//! of the stabilizer of `m`. Exponents of `t` are always `2 Delta`, which is
//! an integer.
//!
//! On the dominant cone, `Delta` is linear on every chamber of the
//! arrangement of weight hyperplanes and root walls. Convergence and the
//! enumeration box are both read off the candidate extreme rays of that
//! arrangement.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::{BigRational, Ratio};
use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, dot, IntMatrix};
use crate::series::{geometric_factor, TruncatedSeries};
use crate::theory::{Coweight, GaugeTheory, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonopoleError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("divergent: Coulomb branch is not a cone (witness coweight m={witness}, {})", describe_degree(*.degree, .shifted))]
    Divergent { witness: Coweight, degree: i64, shifted: bool },
    #[error("shift has length {got}, expected pi_1 rank {expected}")]
    ShiftLength { got: usize, expected: usize },
    #[error("2*Delta takes both parities on pi_1 class {0:?}; weights are not Weyl invariant")]
    ParityMixing(Vec<i64>),
}

fn describe_degree(degree: i64, shifted: &bool) -> String {
    if *shifted {
        format!("shifted degree {degree}")
    } else {
        format!("Δ={}", Ratio::new(degree, 2))
    }
}

/// A coweight with its value of `2 Delta`.
type Ray = (Vec<i64>, i64);

/// Outcome of [`check_convergence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convergence {
    Good,
    /// A nonzero dominant coweight on which `Delta <= 0`.
    Divergent { witness: Coweight, delta: Ratio<i64> },
}

/// One summand of the monopole formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonopoleTerm {
    pub coweight: Coweight,
    pub delta: Ratio<i64>,
    pub dressing: TruncatedSeries,
    pub pi1_class: Vec<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HilbertOptions {
    /// Highest retained power of `t`.
    pub order: u32,
    /// Attach `z^{pi_1 class}` to every term.
    pub refined: bool,
    /// Character twist: the `t`-exponent of class `gamma` moves by `<shift, gamma>`.
    pub shift: Option<Vec<i64>>,
    /// Enumerate coweights up to this degree instead of `order`. Values below
    /// `order` are ignored.
    pub degree_bound: Option<u32>,
}

impl HilbertOptions {
    pub fn new(order: u32) -> Self {
        Self { order, ..Self::default() }
    }

    pub fn refined(mut self) -> Self {
        self.refined = true;
        self
    }

    pub fn with_shift(mut self, shift: Vec<i64>) -> Self {
        self.shift = Some(shift);
        self
    }

    pub fn with_degree_bound(mut self, bound: u32) -> Self {
        self.degree_bound = Some(bound);
        self
    }
}

/// `2 * Delta(m)`; `m` is assumed dominant and of the right length.
pub fn twice_delta(theory: &GaugeTheory, m: &[i64]) -> i64 {
    let roots: i64 = theory.positive_roots().iter().map(|a| dot(a, m).abs()).sum();
    let matter: i64 = theory.weights().iter().map(|r| dot(r, m).abs()).sum();
    matter - 2 * roots
}

pub fn delta(theory: &GaugeTheory, m: &Coweight) -> Result<Ratio<i64>, MonopoleError> {
    m.check(theory)?;
    Ok(Ratio::new(twice_delta(theory, m.entries()), 2))
}

/// Casimir degrees of the stabilizer of `m`: `1..=k` for every run of `k`
/// equal entries inside a gl block, and `1` per torus coordinate.
pub fn casimir_degrees(theory: &GaugeTheory, m: &Coweight) -> Vec<u32> {
    let mut degrees = Vec::new();
    for block in theory.gl_blocks() {
        let entries = &m.entries()[block];
        let mut run = 0;
        for (i, x) in entries.iter().enumerate() {
            run += 1;
            if i + 1 == entries.len() || entries[i + 1] != *x {
                degrees.extend(1..=run);
                run = 0;
            }
        }
    }
    degrees.extend(std::iter::repeat_n(1, theory.torus_rank()));
    degrees.sort_unstable();
    degrees
}

fn dressing_from_degrees(degrees: &[u32], order: u32) -> TruncatedSeries {
    degrees.iter().fold(TruncatedSeries::one(order, 0), |acc, &d| {
        acc.mul(&geometric_factor(2 * d, order).expect("Casimir degrees are positive")).expect("rank 0")
    })
}

pub fn dressing_factor(theory: &GaugeTheory, m: &Coweight, order: u32) -> Result<TruncatedSeries, MonopoleError> {
    m.check(theory)?;
    Ok(dressing_from_degrees(&casimir_degrees(theory, m), order))
}

/// Piecewise-linear degree `2 Delta(m) + <shift, pi_1(m)>`.
struct Grading<'a> {
    theory: &'a GaugeTheory,
    shift: Option<&'a [i64]>,
}

impl<'a> Grading<'a> {
    fn new(theory: &'a GaugeTheory, shift: Option<&'a [i64]>) -> Result<Self, MonopoleError> {
        if let Some(s) = shift {
            if s.len() != theory.pi1_rank() {
                return Err(MonopoleError::ShiftLength { got: s.len(), expected: theory.pi1_rank() });
            }
        }
        Ok(Self { theory, shift })
    }

    fn degree(&self, m: &[i64]) -> i64 {
        let base = twice_delta(self.theory, m);
        match self.shift {
            Some(s) => base + dot(s, &Coweight(m.to_vec()).pi1_class(self.theory)),
            None => base,
        }
    }

    fn normals(&self) -> Vec<Vec<i64>> {
        let mut normals: Vec<Vec<i64>> = self
            .theory
            .weights()
            .iter()
            .filter(|w| w.iter().any(|&x| x != 0))
            .map(|w| canonical_sign(&linalg::primitive(w)))
            .collect();
        normals.extend(self.theory.simple_roots());
        normals.sort();
        normals.dedup();
        normals
    }

    /// Nonzero dominant rays, or the first one with nonpositive degree.
    fn dominant_rays(&self) -> Result<Vec<Ray>, Ray> {
        let rank = self.theory.total_rank();
        let normals = self.normals();
        let stacked = IntMatrix::from_rows(&normals, rank).expect("normals have total rank");
        if let Some(line) = linalg::kernel_basis(&stacked).into_iter().next() {
            // the whole line is dominant with 2 Delta = 0; only the shift can tell the sides apart
            let v = canonical_sign(&linalg::primitive(&line));
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            let dv = self.degree(&v);
            return Err(if dv <= 0 { (v, dv) } else { (neg, -dv) });
        }
        let mut rays = Vec::new();
        for r in linalg::arrangement_rays(&normals, rank) {
            if !Coweight(r.clone()).is_dominant(self.theory) {
                continue;
            }
            let d = self.degree(&r);
            if d <= 0 {
                return Err((r, d));
            }
            rays.push((r, d));
        }
        Ok(rays)
    }

    /// Dominant coweights with degree at most `bound`, in lexicographic order.
    fn enumerate(&self, rays: &[(Vec<i64>, i64)], bound: i64) -> Vec<Vec<i64>> {
        let rank = self.theory.total_rank();
        if bound < 0 {
            return Vec::new();
        }
        let mut lower = vec![0i64; rank];
        let mut upper = vec![0i64; rank];
        for (r, d) in rays {
            for i in 0..rank {
                let x = r[i] * bound;
                upper[i] = upper[i].max(x.div_euclid(*d));
                lower[i] = lower[i].min(-(-x).div_euclid(*d));
            }
        }
        if rank == 0 {
            return vec![Vec::new()];
        }
        let firsts: Vec<i64> = (lower[0]..=upper[0]).collect();
        let chunks: Vec<Vec<Vec<i64>>> = firsts
            .par_iter()
            .map(|&x0| {
                let mut found = Vec::new();
                let mut point = lower.clone();
                point[0] = x0;
                scan(&mut point, 1, &lower, &upper, &mut |m| {
                    if Coweight(m.to_vec()).is_dominant(self.theory) && self.degree(m) <= bound {
                        found.push(m.to_vec());
                    }
                });
                found
            })
            .collect();
        chunks.into_iter().flatten().collect()
    }
}

fn scan(point: &mut Vec<i64>, i: usize, lower: &[i64], upper: &[i64], visit: &mut impl FnMut(&[i64])) {
    if i == point.len() {
        visit(point);
        return;
    }
    for x in lower[i]..=upper[i] {
        point[i] = x;
        scan(point, i + 1, lower, upper, visit);
    }
}

/// Flip so the first nonzero entry is positive.
fn canonical_sign(v: &[i64]) -> Vec<i64> {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => v.iter().map(|y| -y).collect(),
        _ => v.to_vec(),
    }
}

/// `Good` iff `Delta > 0` on every nonzero dominant coweight.
pub fn check_convergence(theory: &GaugeTheory) -> Convergence {
    let grading = Grading { theory, shift: None };
    match grading.dominant_rays() {
        Ok(_) => Convergence::Good,
        Err((witness, d)) => Convergence::Divergent { witness: Coweight(witness), delta: Ratio::new(d, 2) },
    }
}

fn rays_or_divergent<'a>(grading: &Grading<'a>) -> Result<Vec<Ray>, MonopoleError> {
    grading.dominant_rays().map_err(|(w, d)| MonopoleError::Divergent {
        witness: Coweight(w),
        degree: d,
        shifted: grading.shift.is_some(),
    })
}

/// All dominant `m` with `Delta(m) <= delta_bound`, in lexicographic order.
pub fn enumerate_coweights(theory: &GaugeTheory, delta_bound: Ratio<i64>) -> Result<Vec<Coweight>, MonopoleError> {
    let grading = Grading { theory, shift: None };
    let rays = rays_or_divergent(&grading)?;
    let bound = (delta_bound * 2).floor().to_integer();
    Ok(grading.enumerate(&rays, bound).into_iter().map(Coweight).collect())
}

/// Summands of the monopole formula contributing through `t^order`.
pub fn monopole_terms(theory: &GaugeTheory, opts: &HilbertOptions) -> Result<Vec<MonopoleTerm>, MonopoleError> {
    let grading = Grading::new(theory, opts.shift.as_deref())?;
    let rays = rays_or_divergent(&grading)?;
    let bound = opts.order.max(opts.degree_bound.unwrap_or(0)) as i64;
    Ok(grading
        .enumerate(&rays, bound)
        .into_par_iter()
        .map(|m| {
            let cw = Coweight(m);
            let d = twice_delta(theory, cw.entries());
            MonopoleTerm {
                delta: Ratio::new(d, 2),
                dressing: dressing_from_degrees(&casimir_degrees(theory, &cw), opts.order),
                pi1_class: cw.pi1_class(theory),
                coweight: cw,
            }
        })
        .collect())
}

pub fn hilbert_series(theory: &GaugeTheory, opts: &HilbertOptions) -> Result<TruncatedSeries, MonopoleError> {
    let grading = Grading::new(theory, opts.shift.as_deref())?;
    let rays = rays_or_divergent(&grading)?;
    let bound = opts.order.max(opts.degree_bound.unwrap_or(0)) as i64;
    let coweights = grading.enumerate(&rays, bound);

    // (shifted degree, class, Casimir degrees) -> multiplicity
    let keyed: Vec<(i64, i64, Vec<i64>, Vec<u32>)> = coweights
        .par_iter()
        .map(|m| {
            let cw = Coweight(m.clone());
            (grading.degree(m), twice_delta(theory, m), cw.pi1_class(theory), casimir_degrees(theory, &cw))
        })
        .collect();
    let mut parity: BTreeMap<&[i64], i64> = BTreeMap::new();
    let mut buckets: BTreeMap<(i64, Vec<i64>, &[u32]), u64> = BTreeMap::new();
    for (deg, td, class, cas) in &keyed {
        if *parity.entry(class).or_insert(td.rem_euclid(2)) != td.rem_euclid(2) {
            return Err(MonopoleError::ParityMixing(class.clone()));
        }
        if *deg > opts.order as i64 {
            continue;
        }
        let fug = if opts.refined { class.clone() } else { Vec::new() };
        *buckets.entry((*deg, fug, cas)).or_insert(0) += 1;
    }

    let rank = if opts.refined { theory.pi1_rank() } else { 0 };
    let mut total = TruncatedSeries::zero(opts.order, rank);
    let mut cache: BTreeMap<&[u32], TruncatedSeries> = BTreeMap::new();
    for ((deg, fug, cas), count) in buckets {
        let dressing =
            cache.entry(cas).or_insert_with(|| dressing_from_degrees(cas, opts.order)).clone();
        let coeff = BigRational::from_integer(count.into());
        for ((k, _), c) in dressing.terms() {
            total.add_term(k + deg as u32, fug.clone(), c * &coeff);
        }
    }
    debug_assert!(total.terms().all(|(_, c)| c.is_integer() && c.is_positive()));
    Ok(total)
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convergence::Good => write!(f, "good"),
            Convergence::Divergent { witness, delta } => {
                write!(f, "divergent: Coulomb branch is not a cone (witness coweight m={witness}, Δ={delta})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn u1(weights: &[i64]) -> GaugeTheory {
        GaugeTheory::torus(1, weights.iter().map(|&w| vec![w]).collect()).unwrap()
    }

    fn u2_fundamentals(n: usize) -> GaugeTheory {
        let mut w = Vec::new();
        for _ in 0..n {
            w.push(vec![1, 0]);
            w.push(vec![0, 1]);
        }
        GaugeTheory::new(vec![2], 0, w).unwrap()
    }

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(&u1(&[1]), &Coweight(vec![0])).unwrap(), r(0, 1));
        assert_eq!(delta(&u1(&[2]), &Coweight(vec![1])).unwrap(), r(1, 1));
        assert_eq!(delta(&u2_fundamentals(4), &Coweight(vec![1, 0])).unwrap(), r(1, 1));
        assert!(matches!(
            delta(&u2_fundamentals(4), &Coweight(vec![0, 1])),
            Err(MonopoleError::Theory(TheoryError::NotDominant(_)))
        ));
    }

    #[test]
    fn dressing_factors() {
        let t = u1(&[1]);
        assert_eq!(dressing_factor(&t, &Coweight(vec![5]), 6).unwrap().to_string(), "1 + t^2 + t^4 + t^6");
        let u2 = u2_fundamentals(4);
        // 1/(1-t^2)^2
        assert_eq!(dressing_factor(&u2, &Coweight(vec![1, 0]), 6).unwrap().to_string(), "1 + 2*t^2 + 3*t^4 + 4*t^6");
        // 1/((1-t^2)(1-t^4))
        assert_eq!(dressing_factor(&u2, &Coweight(vec![1, 1]), 6).unwrap().to_string(), "1 + t^2 + 2*t^4 + 2*t^6");
    }

    #[test]
    fn enumeration() {
        let cw = enumerate_coweights(&u1(&[1]), r(1, 1)).unwrap();
        assert_eq!(cw, [-2, -1, 0, 1, 2].map(|x| Coweight(vec![x])).to_vec());
        let mut cw = enumerate_coweights(&u2_fundamentals(4), r(1, 1)).unwrap();
        cw.sort();
        assert_eq!(cw, vec![Coweight(vec![0, -1]), Coweight(vec![0, 0]), Coweight(vec![1, 0])]);
        assert!(matches!(enumerate_coweights(&u1(&[]), r(3, 1)), Err(MonopoleError::Divergent { .. })));
    }

    #[test]
    fn convergence_verdicts() {
        assert_eq!(check_convergence(&u1(&[1])), Convergence::Good);
        assert_eq!(
            check_convergence(&u1(&[])),
            Convergence::Divergent { witness: Coweight(vec![1]), delta: r(0, 1) }
        );
        assert_eq!(
            check_convergence(&u2_fundamentals(1)),
            Convergence::Divergent { witness: Coweight(vec![1, 0]), delta: r(-1, 2) }
        );
        assert_eq!(check_convergence(&u2_fundamentals(4)), Convergence::Good);
        // U(2) with 2 flavours is "bad": Delta(1,0) = 0
        assert!(matches!(check_convergence(&u2_fundamentals(2)), Convergence::Divergent { .. }));
        // trivial group
        assert_eq!(check_convergence(&GaugeTheory::torus(0, vec![vec![]]).unwrap()), Convergence::Good);
    }

    #[test]
    fn hilbert_anchors() {
        let h = hilbert_series(&u1(&[1]), &HilbertOptions::new(4)).unwrap();
        assert_eq!(h.to_string(), "1 + 2*t + 3*t^2 + 4*t^3 + 5*t^4");
        let h = hilbert_series(&u1(&[2]), &HilbertOptions::new(4)).unwrap();
        assert_eq!(h.to_string(), "1 + 3*t^2 + 5*t^4");
        let h = hilbert_series(&u1(&[1]), &HilbertOptions::new(2).refined()).unwrap();
        assert_eq!(h.to_string(), "1 + t*z^-1 + t*z + t^2*z^-2 + t^2 + t^2*z^2");
    }

    #[test]
    fn divergence_message() {
        let e = hilbert_series(&u1(&[]), &HilbertOptions::new(4)).unwrap_err();
        assert_eq!(e.to_string(), "divergent: Coulomb branch is not a cone (witness coweight m=1, Δ=0)");
    }

    #[test]
    fn shift_moves_classes() {
        // on C^2 a unit shift puts E[-1] in degree 0
        let e = hilbert_series(&u1(&[1]), &HilbertOptions::new(4).with_shift(vec![1])).unwrap_err();
        assert!(matches!(e, MonopoleError::Divergent { shifted: true, .. }));
        // on the A_1 theory a unit shift keeps positivity: E[1] in t^3, E[-1] in t^1
        let h = hilbert_series(&u1(&[2]), &HilbertOptions::new(3).with_shift(vec![1]).refined()).unwrap();
        assert_eq!(h.to_string(), "1 + t*z^-1 + t^2*z^-2 + t^2 + t^3*z^-3 + t^3*z^-1 + t^3*z");
        assert!(matches!(
            hilbert_series(&u1(&[2]), &HilbertOptions::new(3).with_shift(vec![1, 0])),
            Err(MonopoleError::ShiftLength { got: 2, expected: 1 })
        ));
    }

    #[test]
    fn u2_with_four_flavours_is_nonnegative_and_stable() {
        let th = u2_fundamentals(4);
        let h = hilbert_series(&th, &HilbertOptions::new(8)).unwrap();
        let h2 = hilbert_series(&th, &HilbertOptions::new(8).with_degree_bound(14)).unwrap();
        assert_eq!(h, h2);
        assert!(h.terms().all(|(_, c)| c.is_integer() && c.numer() > &0.into()));
        assert_eq!(h.coefficient(0, &[]), BigRational::one());
    }

    #[test]
    fn monopole_terms_cover_the_series() {
        let th = u1(&[1, 1]);
        let terms = monopole_terms(&th, &HilbertOptions::new(4)).unwrap();
        assert_eq!(terms.len(), 5);
        assert!(terms.iter().all(|t| t.dressing.coefficient(0, &[]) == BigRational::one()));
        assert!(terms.iter().all(|t| (t.delta * 2).is_integer()));
    }
}

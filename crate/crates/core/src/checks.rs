//! Seeded randomized property suites.
//!
//! Every suite takes an explicit seed and reports it, so a failure can be
//! replayed exactly. Suites over several theories run in parallel and their
//! reports are collected in a fixed order.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::abelian::{AbelianAlgebra, AbelianElement, Poly};
use crate::higgs;
use crate::linalg::IntMatrix;
use crate::monopole::{self, HilbertOptions};
use crate::theory::{GaugeTheory, TorusSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: impl Into<String>, seed: u64) -> Self {
        Self { name: name.into(), seed, trials: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} (trials={}, seed={})", self.name, self.trials, self.seed)?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n  {msg}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n  ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random elements: up to `terms` summands `c * w^a * E[lambda]`
/// with `|lambda_i| <= lambda_bound` and `|a| <= w_degree`.
#[derive(Debug, Clone, Copy)]
pub struct ElementShape {
    pub terms: usize,
    pub lambda_bound: i64,
    pub w_degree: u32,
}

impl Default for ElementShape {
    fn default() -> Self {
        Self { terms: 2, lambda_bound: 2, w_degree: 1 }
    }
}

pub fn random_element(rng: &mut impl Rng, rank: usize, shape: ElementShape) -> AbelianElement {
    let mut out = AbelianElement::zero(rank);
    while out.is_zero() {
        for _ in 0..rng.gen_range(1..=shape.terms) {
            let lambda: Vec<i64> = (0..rank).map(|_| rng.gen_range(-shape.lambda_bound..=shape.lambda_bound)).collect();
            let mut exps = vec![0u32; rank + 1];
            if rank > 0 {
                for _ in 0..rng.gen_range(0..=shape.w_degree) {
                    exps[rng.gen_range(0..rank)] += 1;
                }
            }
            let c = loop {
                let c: i64 = rng.gen_range(-3..=3);
                if c != 0 {
                    break c;
                }
            };
            out.add_term(lambda, Poly::monomial(exps, BigRational::from_integer(c.into())));
        }
    }
    out
}

/// Random torus theory of rank `1..=max_rank` with `rank..=max_weights`
/// weights, entries in `[-bound, bound]`, whose weights span.
pub fn random_good_torus_theory(rng: &mut impl Rng, max_rank: usize, max_weights: usize, bound: i64) -> GaugeTheory {
    loop {
        let rank = rng.gen_range(1..=max_rank);
        let count = rng.gen_range(rank..=max_weights.max(rank));
        let weights: Vec<Vec<i64>> =
            (0..count).map(|_| (0..rank).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        let th = GaugeTheory::torus(rank, weights).expect("weights have the chosen rank");
        if AbelianAlgebra::from_theory(&th).expect("torus theory").is_good() {
            return th;
        }
    }
}

/// Random exact sequence `T -> (C^*)^d -> T_F` with `T` of rank `1..d`.
pub fn random_exact_sequence(rng: &mut impl Rng, d: usize) -> TorusSequence {
    assert!(d >= 2, "need room for both T and T_F");
    loop {
        let k = rng.gen_range(1..d);
        let rows: Vec<Vec<i64>> = (0..d).map(|_| (0..k).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let inclusion = IntMatrix::from_rows(&rows, k).expect("rows have k entries");
        if let Ok(s) = TorusSequence::from_inclusion(inclusion) {
            return s;
        }
    }
}

/// Theories exercised by the algebra suites: rank one with charges 1, 2 and
/// `{1, 1}`, the Jordan quiver, two rank-two theories and a rank-three one.
pub fn sample_algebras() -> Vec<AbelianAlgebra> {
    let specs: Vec<(usize, Vec<Vec<i64>>)> = vec![
        (1, vec![vec![1]]),
        (1, vec![vec![2]]),
        (1, vec![vec![1], vec![1]]),
        (1, vec![vec![0], vec![1]]),
        (1, vec![]),
        (2, vec![vec![1, 0], vec![1, 1]]),
        (2, vec![vec![1, -1], vec![0, 2], vec![1, 1]]),
        (3, vec![vec![1, 0, 0], vec![0, 1, -1], vec![1, 1, 1]]),
    ];
    specs.into_iter().map(|(r, w)| AbelianAlgebra::new(r, w).expect("sample theories are valid")).collect()
}

fn label(alg: &AbelianAlgebra) -> String {
    format!("rank {} weights {:?}", alg.rank(), alg.weights())
}

/// Associativity of the quantized product, its classical limit, and
/// divisibility of commutators by `h`.
pub fn check_quantization(alg: &AbelianAlgebra, trials: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(format!("quantization [{}]", label(alg)), seed);
    let mut r = rng(seed);
    let shape = ElementShape::default();
    let l = alg.rank();
    for _ in 0..trials {
        let (a, b, c) = (random_element(&mut r, l, shape), random_element(&mut r, l, shape), random_element(&mut r, l, shape));
        let mq = |x: &AbelianElement, y: &AbelianElement| alg.multiply_quantized(x, y).expect("same rank");
        let left = mq(&mq(&a, &b), &c);
        let right = mq(&a, &mq(&b, &c));
        report.expect(left == right, || format!("associativity fails for a={a}, b={b}, c={c}"));
        let classical = alg.multiply_classical(&a, &b).expect("h-free");
        report.expect(mq(&a, &b).classical() == classical, || format!("classical limit fails for a={a}, b={b}"));
        let commutator = mq(&a, &b).sub(&mq(&b, &a));
        report.expect(commutator.div_hbar().is_some(), || format!("[{a}, {b}] = {commutator} is not divisible by h"));
        let hc = alg.multiply_quantized(&AbelianElement::hbar(l), &c).expect("same rank");
        report.expect(mq(&mq(&a, &hc), &b) == mq(&a, &mq(&hc, &b)), || format!("associativity with h fails for c={c}"));
        report.trials += 1;
    }
    report
}

/// Commutativity and associativity of the classical product together with
/// the t-degree and pi_1 gradings.
pub fn check_classical(alg: &AbelianAlgebra, trials: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(format!("classical product [{}]", label(alg)), seed);
    let mut r = rng(seed);
    let l = alg.rank();
    let shape = ElementShape { terms: 2, lambda_bound: 2, w_degree: 2 };
    let homogeneous = ElementShape { terms: 1, lambda_bound: 3, w_degree: 2 };
    for _ in 0..trials {
        let (a, b, c) = (random_element(&mut r, l, shape), random_element(&mut r, l, shape), random_element(&mut r, l, shape));
        let m = |x: &AbelianElement, y: &AbelianElement| alg.multiply_classical(x, y).expect("h-free");
        report.expect(m(&a, &b) == m(&b, &a), || format!("commutativity fails for a={a}, b={b}"));
        report.expect(m(&m(&a, &b), &c) == m(&a, &m(&b, &c)), || format!("associativity fails for a={a}, b={b}, c={c}"));
        let sums: Vec<Vec<i64>> =
            a.support().flat_map(|x| b.support().map(move |y| x.iter().zip(y).map(|(p, q)| p + q).collect())).collect();
        report.expect(m(&a, &b).support().all(|s| sums.contains(s)), || format!("pi_1 support of a*b for a={a}, b={b}"));
        let (x, y) = (random_element(&mut r, l, homogeneous), random_element(&mut r, l, homogeneous));
        let (dx, dy) = (alg.t_degree(&x), alg.t_degree(&y));
        let dp = alg.t_degree(&m(&x, &y));
        report.expect(dp == Some(dx.unwrap() + dy.unwrap()), || format!("t-degree of x*y for x={x}, y={y}"));
        report.trials += 1;
    }
    report
}

/// Antisymmetry, Leibniz and Jacobi for the bracket, `{w_i, w_j} = 0` and
/// `{w_i, E[lambda]} = -lambda_i E[lambda]`.
pub fn check_poisson(alg: &AbelianAlgebra, trials: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(format!("poisson [{}]", label(alg)), seed);
    let mut r = rng(seed);
    let l = alg.rank();
    let shape = ElementShape { terms: 2, lambda_bound: 1, w_degree: 1 };
    let br = |x: &AbelianElement, y: &AbelianElement| alg.poisson_bracket(x, y).expect("h-free");
    let m = |x: &AbelianElement, y: &AbelianElement| alg.multiply_classical(x, y).expect("h-free");
    for i in 0..l {
        for j in 0..l {
            let value = br(&AbelianElement::w(l, i), &AbelianElement::w(l, j));
            report.expect(value.is_zero(), || format!("{{w{}, w{}}} = {value}", i + 1, j + 1));
        }
    }
    for _ in 0..trials {
        let (a, b, c) = (random_element(&mut r, l, shape), random_element(&mut r, l, shape), random_element(&mut r, l, shape));
        report.expect(br(&a, &b) == br(&b, &a).scale(&BigRational::from_integer((-1).into())), || {
            format!("antisymmetry fails for a={a}, b={b}")
        });
        report.expect(br(&a, &a).is_zero(), || format!("{{a, a}} != 0 for a={a}"));
        let leibniz = m(&br(&a, &b), &c).add(&m(&b, &br(&a, &c)));
        report.expect(br(&a, &m(&b, &c)) == leibniz, || format!("Leibniz fails for a={a}, b={b}, c={c}"));
        let jacobi = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        report.expect(jacobi.is_zero(), || format!("Jacobi fails for a={a}, b={b}, c={c}"));
        let lambda: Vec<i64> = (0..l).map(|_| r.gen_range(-3..=3)).collect();
        let e = AbelianElement::e(&lambda);
        for (i, &li) in lambda.iter().enumerate() {
            let expected = e.scale(&BigRational::from_integer((-li).into()));
            report.expect(br(&AbelianElement::w(l, i), &e) == expected, || format!("{{w{}, E{lambda:?}}}", i + 1));
        }
        report.trials += 1;
    }
    report
}

/// `E[lambda] E[-lambda] = prod_j rho_j(w)^{|rho_j(lambda)|}` on the box `|lambda_i| <= bound`.
pub fn check_localization(alg: &AbelianAlgebra, bound: i64) -> CheckReport {
    let mut report = CheckReport::new(format!("localization [{}]", label(alg)), 0);
    let l = alg.rank();
    let side = (2 * bound + 1) as usize;
    for idx in 0..side.pow(l as u32) {
        let mut rest = idx;
        let lambda: Vec<i64> = (0..l)
            .map(|_| {
                let x = (rest % side) as i64 - bound;
                rest /= side;
                x
            })
            .collect();
        let wit = alg.localization_units(&lambda).expect("lattice point has the torus rank");
        report.expect(wit.holds(), || format!("E{lambda:?} E[-lambda] = {} != {}", wit.product, wit.expected));
        report.trials += 1;
    }
    report
}

/// Monopole-formula coefficients against counts of `w^a E[lambda]`, refined
/// and unrefined, through `t^order`.
pub fn check_oracle_equivalence(theory: &GaugeTheory, order: u32) -> CheckReport {
    let mut report = CheckReport::new(format!("monopole vs algebra [{:?}]", theory.weights()), 0);
    let alg = match AbelianAlgebra::from_theory(theory) {
        Ok(a) => a,
        Err(e) => {
            report.failures.push(e.to_string());
            return report;
        }
    };
    let (series, refined) = match (
        monopole::hilbert_series(theory, &HilbertOptions::new(order)),
        monopole::hilbert_series(theory, &HilbertOptions::new(order).refined()),
    ) {
        (Ok(s), Ok(r)) => (s, r),
        (Err(e), _) | (_, Err(e)) => {
            report.failures.push(e.to_string());
            return report;
        }
    };
    let dims = alg.graded_dimensions(order).expect("good theory");
    for (d, c) in series.coefficients().iter().enumerate() {
        report.expect(*c == BigRational::from_integer(dims[d].into()), || {
            format!("t^{d}: monopole {c}, algebra {}", dims[d])
        });
    }
    let by_class = alg.refined_graded_dimensions(order).expect("good theory");
    let mut from_series: Vec<BTreeMap<Vec<i64>, BigRational>> = vec![BTreeMap::new(); order as usize + 1];
    for ((d, class), c) in refined.terms() {
        from_series[*d as usize].insert(class.clone(), c.clone());
    }
    for d in 0..=order as usize {
        let expected: BTreeMap<Vec<i64>, BigRational> =
            by_class[d].iter().map(|(k, &v)| (k.clone(), BigRational::from_integer(v.into()))).collect();
        report.expect(from_series[d] == expected, || format!("refined t^{d} differs"));
    }
    report.trials = order as usize + 1;
    report
}

/// Oracle equivalence on `count` random good torus theories.
pub fn check_random_oracles(count: usize, order: u32, seed: u64) -> Vec<CheckReport> {
    let mut r = rng(seed);
    let theories: Vec<GaugeTheory> = (0..count).map(|_| random_good_torus_theory(&mut r, 3, 6, 3)).collect();
    theories
        .par_iter()
        .map(|th| {
            let mut rep = check_oracle_equivalence(th, order);
            rep.seed = seed;
            rep
        })
        .collect()
}

/// Toric duality on random exact sequences of ambient rank `2..=max_d`.
pub fn check_random_duality(count: usize, max_d: usize, order: u32, seed: u64) -> Vec<CheckReport> {
    let mut r = rng(seed);
    let mut dims: Vec<usize> = (2..=max_d).collect();
    let sequences: Vec<TorusSequence> = (0..count)
        .map(|_| {
            dims.shuffle(&mut r);
            random_exact_sequence(&mut r, dims[0])
        })
        .collect();
    sequences
        .par_iter()
        .map(|s| {
            let mut rep = CheckReport::new(format!("toric duality [inclusion {:?}]", s.inclusion().to_rows()), seed);
            match higgs::check_toric_duality(s, order) {
                Ok(report) => rep.expect(report.matches(), || report.verdict()),
                Err(e) => rep.failures.push(e.to_string()),
            }
            rep.trials = 1;
            rep
        })
        .collect()
}

/// Everything `verify` runs, with seeds derived from `seed`.
pub fn verify_all(seed: u64, trials: usize) -> Vec<CheckReport> {
    let algebras = sample_algebras();
    let mut reports: Vec<CheckReport> = algebras
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, alg)| {
            let s = seed.wrapping_add(i as u64);
            vec![
                check_classical(alg, trials, s),
                check_quantization(alg, trials, s),
                check_poisson(alg, trials.div_ceil(4), s),
                check_localization(alg, if alg.rank() > 2 { 2 } else { 3 }),
            ]
        })
        .collect();
    reports.extend(check_random_oracles(8, 10, seed));
    reports.extend(check_random_duality(2, 4, 6, seed));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_samples() {
        for alg in sample_algebras().iter().take(6) {
            for rep in [check_classical(alg, 10, 1), check_quantization(alg, 10, 2), check_poisson(alg, 4, 3), check_localization(alg, 2)] {
                assert!(rep.passed(), "{rep}");
            }
        }
    }

    #[test]
    fn random_generators_are_reproducible() {
        let a = random_element(&mut rng(9), 2, ElementShape::default());
        let b = random_element(&mut rng(9), 2, ElementShape::default());
        assert_eq!(a, b);
        let s = random_exact_sequence(&mut rng(4), 4);
        assert_eq!(s, random_exact_sequence(&mut rng(4), 4));
        assert!(random_good_torus_theory(&mut rng(5), 3, 6, 3).weights().len() <= 6);
    }

    #[test]
    fn oracle_equivalence_on_a_few_random_theories() {
        for rep in check_random_oracles(3, 8, 11) {
            assert!(rep.passed(), "{rep}");
        }
    }
}

//! Finite presentations of classical abelian Coulomb branch algebras.
//!
//! Generators are the `w_i` together with `E[lambda]` for `lambda` in the
//! Hilbert bases of the maximal cones of the fan cut out by the weight
//! hyperplanes, plus `E[+-b]` for a basis `b` of the directions orthogonal to
//! all weights. Relations come from products of pairs of `E` generators,
//! rewritten over the generating set. The generating set is sufficient but not
//! necessarily minimal, and the relations are not claimed to generate the
//! whole ideal.
//!
//! `E` generators may carry a rational scale, chosen greedily while the
//! relations are built so that they come out monic: for weights `{N}` the
//! generator `y` is `N^-N E[-1]` and the relation reads `x*y = w^N`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{AbelianAlgebra, AbelianElement, AbelianError, Poly};
use crate::linalg::{self, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    W(usize),
    E(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// t-degree.
    pub degree: u32,
    /// pi_1 weight; zero for the `w_i`.
    pub weight: Vec<i64>,
    pub kind: GeneratorKind,
    /// The generator is `scale * E[lambda]` (always 1 for `w_i`).
    pub scale: BigRational,
}

impl Generator {
    pub fn element(&self, rank: usize) -> AbelianElement {
        match &self.kind {
            GeneratorKind::W(i) => AbelianElement::w(rank, *i),
            GeneratorKind::E(l) => AbelianElement::e(l).scale(&self.scale),
        }
    }
}

/// `coeff * prod_g g^{exponents[g]}`, indexed like [`Presentation::generators`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenMonomial {
    pub coeff: BigRational,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Vec<GenMonomial>,
    pub rhs: Vec<GenMonomial>,
}

/// A pointed cone in reduced coordinates with its Hilbert basis.
#[derive(Debug, Clone)]
struct Chamber {
    signs: Vec<i64>,
    /// Hilbert basis in reduced coordinates, paired with generator indices.
    basis: Vec<(Vec<i64>, usize)>,
}

#[derive(Debug, Clone)]
pub struct Presentation {
    rank: usize,
    generators: Vec<Generator>,
    relations: Vec<Relation>,
    /// Maps `lambda` to reduced coordinates; the first `reduced_rank` see the weights.
    inverse: IntMatrix,
    reduced_rank: usize,
    normals: Vec<Vec<i64>>,
    chambers: Vec<Chamber>,
    /// Generator indices of `E[+b_k]` and `E[-b_k]`.
    lineality: Vec<(usize, usize)>,
}

pub fn presentation(alg: &AbelianAlgebra) -> Result<Presentation, AbelianError> {
    let p = Presentation::build(alg);
    p.verify_relations(alg)?;
    Ok(p)
}

impl Presentation {
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn is_laurent(&self) -> bool {
        !self.lineality.is_empty()
    }

    fn build(alg: &AbelianAlgebra) -> Self {
        let l = alg.rank();
        let weights = IntMatrix::from_rows(alg.weights(), l).expect("weights have the torus rank");
        let red = linalg::column_reduce(&weights);
        let r = red.rank;
        let inverse = linalg::unimodular_inverse(&red.transform).expect("column operations are unimodular");
        let reduced_rows: Vec<Vec<i64>> = red.reduced.to_rows().into_iter().map(|row| row[..r].to_vec()).collect();
        let mut normals: Vec<Vec<i64>> = reduced_rows
            .iter()
            .filter(|n| n.iter().any(|&x| x != 0))
            .map(|n| canonical_sign(&linalg::primitive(n)))
            .collect();
        normals.sort();
        normals.dedup();

        let lift = |c: &[i64]| {
            let mut full = c.to_vec();
            full.resize(l, 0);
            red.transform.mul_vec(&full)
        };
        let reduced_degree = |c: &[i64]| -> i64 { reduced_rows.iter().map(|n| linalg::dot(n, c).abs()).sum() };

        let mut generators: Vec<Generator> = (0..l)
            .map(|i| Generator {
                name: String::new(),
                degree: 2,
                weight: vec![0; l],
                kind: GeneratorKind::W(i),
                scale: BigRational::one(),
            })
            .collect();
        let e_gen = |lambda: Vec<i64>, generators: &mut Vec<Generator>| -> usize {
            if let Some(i) = generators.iter().position(|g| g.kind == GeneratorKind::E(lambda.clone())) {
                return i;
            }
            generators.push(Generator {
                name: String::new(),
                degree: alg.lattice_degree(&lambda),
                weight: lambda.clone(),
                kind: GeneratorKind::E(lambda),
                scale: BigRational::one(),
            });
            generators.len() - 1
        };

        let mut lineality = Vec::new();
        for k in r..l {
            let b = red.transform.column(k);
            let neg: Vec<i64> = b.iter().map(|x| -x).collect();
            lineality.push((e_gen(b, &mut generators), e_gen(neg, &mut generators)));
        }

        let rays = linalg::arrangement_rays(&normals, r);
        let mut chambers = Vec::new();
        if r > 0 {
            for mask in 0u64..(1u64 << normals.len()) {
                let signs: Vec<i64> = (0..normals.len()).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                let inside = |c: &[i64]| normals.iter().zip(&signs).all(|(n, s)| s * linalg::dot(n, c) >= 0);
                let extreme: Vec<Vec<i64>> = rays.iter().filter(|ray| inside(ray)).cloned().collect();
                let spans = !extreme.is_empty()
                    && linalg::rank(&IntMatrix::from_rows(&extreme, r).expect("rays have the reduced rank")) == r;
                if !spans {
                    continue;
                }
                let basis = hilbert_basis(&extreme, r, &inside, &reduced_degree);
                let basis = basis.into_iter().map(|h| {
                    let g = e_gen(lift(&h), &mut generators);
                    (h, g)
                });
                chambers.push(Chamber { signs, basis: basis.collect() });
            }
        }

        // w generators, then lineality pairs, then the rest by degree and decreasing lattice point
        let w_count = l;
        let mut order: Vec<usize> = (0..generators.len()).collect();
        let lineality_set: Vec<usize> = lineality.iter().flat_map(|&(a, b)| [a, b]).collect();
        order.sort_by_key(|&i| {
            let g = &generators[i];
            let class = if i < w_count {
                0
            } else if lineality_set.contains(&i) {
                1
            } else {
                2
            };
            let lin_pos = lineality_set.iter().position(|&j| j == i).unwrap_or(0);
            let neg_weight: Vec<i64> = g.weight.iter().map(|x| -x).collect();
            (class, lin_pos, g.degree, if i < w_count { vec![i as i64] } else { neg_weight })
        });
        let mut relabel = vec![0; generators.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let mut generators: Vec<Generator> = order.iter().map(|&i| generators[i].clone()).collect();
        for ch in &mut chambers {
            for (_, g) in &mut ch.basis {
                *g = relabel[*g];
            }
        }
        let lineality: Vec<(usize, usize)> = lineality.iter().map(|&(a, b)| (relabel[a], relabel[b])).collect();
        name_generators(&mut generators, l, !lineality.is_empty());

        let mut p = Presentation {
            rank: l,
            generators,
            relations: Vec::new(),
            inverse,
            reduced_rank: r,
            normals,
            chambers,
            lineality,
        };
        p.relations = p.pair_relations(alg);
        p
    }

    /// Exponent vector over the generators with `prod g = E[lambda]` up to scale.
    pub fn decompose(&self, lambda: &[i64]) -> Vec<u32> {
        let mut counts = vec![0u32; self.generators.len()];
        let c = self.inverse.mul_vec(lambda);
        let (head, tail) = c.split_at(self.reduced_rank);
        for (k, &x) in tail.iter().enumerate() {
            let (pos, neg) = self.lineality[k];
            counts[if x > 0 { pos } else { neg }] += x.unsigned_abs() as u32;
        }
        if head.iter().all(|&x| x == 0) {
            return counts;
        }
        let inside = |signs: &[i64], v: &[i64]| self.normals.iter().zip(signs).all(|(n, s)| s * linalg::dot(n, v) >= 0);
        let chamber = self
            .chambers
            .iter()
            .find(|ch| inside(&ch.signs, head))
            .expect("the chambers cover the reduced lattice");
        let mut rest = head.to_vec();
        while rest.iter().any(|&x| x != 0) {
            let (h, g) = chamber
                .basis
                .iter()
                .find(|(h, _)| {
                    let diff: Vec<i64> = rest.iter().zip(h).map(|(a, b)| a - b).collect();
                    inside(&chamber.signs, &diff)
                })
                .expect("a Hilbert basis generates its cone");
            for (a, b) in rest.iter_mut().zip(h) {
                *a -= b;
            }
            counts[*g] += 1;
        }
        counts
    }

    fn pair_relations(&mut self, alg: &AbelianAlgebra) -> Vec<Relation> {
        let l = self.rank;
        let e_gens: Vec<usize> = (l..self.generators.len()).collect();
        let mut fixed = vec![false; self.generators.len()];
        let mut relations = Vec::new();
        for (a_pos, &i) in e_gens.iter().enumerate() {
            for &j in &e_gens[a_pos..] {
                let (li, lj) = (self.lattice(i), self.lattice(j));
                let factor = alg.classical_factor(&li, &lj);
                let sum: Vec<i64> = li.iter().zip(&lj).map(|(a, b)| a + b).collect();
                let decomposition = self.decompose(&sum);
                let mut lhs_exps = vec![0u32; self.generators.len()];
                lhs_exps[i] += 1;
                lhs_exps[j] += 1;
                if factor == Poly::one(l) && decomposition == lhs_exps {
                    continue;
                }
                let leading = factor.terms().last().map(|(_, c)| c.clone()).expect("nonzero factor");
                let rescale = |k: usize, other: usize, this: &mut Self| {
                    if fixed[k] || k == other || decomposition[k] > 0 {
                        return false;
                    }
                    // make kappa * leading = 1 where kappa = s_i s_j / prod s_c
                    let others = this.scale_product(&decomposition) / &this.generators[other].scale;
                    this.generators[k].scale = others / &leading;
                    true
                };
                if !rescale(j, i, self) {
                    rescale(i, j, self);
                }
                for (k, &n) in decomposition.iter().enumerate() {
                    if n > 0 {
                        fixed[k] = true;
                    }
                }
                fixed[i] = true;
                fixed[j] = true;
                let kappa = &self.generators[i].scale * &self.generators[j].scale / self.scale_product(&decomposition);
                let rhs = factor
                    .terms()
                    .collect::<Vec<_>>()
                    .into_iter()
                    .rev()
                    .map(|(e, c)| {
                        let mut exponents = decomposition.clone();
                        for (w, &k) in e[..l].iter().enumerate() {
                            exponents[w] += k;
                        }
                        GenMonomial { coeff: c * &kappa, exponents }
                    })
                    .collect();
                relations.push(Relation { lhs: vec![GenMonomial { coeff: BigRational::one(), exponents: lhs_exps }], rhs });
            }
        }
        relations
    }

    fn lattice(&self, g: usize) -> Vec<i64> {
        match &self.generators[g].kind {
            GeneratorKind::E(l) => l.clone(),
            GeneratorKind::W(_) => vec![0; self.rank],
        }
    }

    fn scale_product(&self, exponents: &[u32]) -> BigRational {
        let mut s = BigRational::one();
        for (g, &n) in exponents.iter().enumerate() {
            for _ in 0..n {
                s *= &self.generators[g].scale;
            }
        }
        s
    }

    /// Product of generators evaluated in the classical algebra.
    pub fn evaluate(&self, alg: &AbelianAlgebra, m: &GenMonomial) -> Result<AbelianElement, AbelianError> {
        let mut out = AbelianElement::one(self.rank).scale(&m.coeff);
        for (g, &n) in m.exponents.iter().enumerate() {
            let element = self.generators[g].element(self.rank);
            for _ in 0..n {
                out = alg.multiply_classical(&out, &element)?;
            }
        }
        Ok(out)
    }

    fn evaluate_sum(&self, alg: &AbelianAlgebra, terms: &[GenMonomial]) -> Result<AbelianElement, AbelianError> {
        let mut out = AbelianElement::zero(self.rank);
        for m in terms {
            out = out.add(&self.evaluate(alg, m)?);
        }
        Ok(out)
    }

    fn monomial_grading(&self, m: &GenMonomial) -> (u32, Vec<i64>) {
        let mut degree = 0;
        let mut weight = vec![0i64; self.rank];
        for (g, &n) in m.exponents.iter().enumerate() {
            degree += n * self.generators[g].degree;
            for (w, x) in weight.iter_mut().zip(&self.generators[g].weight) {
                *w += n as i64 * x;
            }
        }
        (degree, weight)
    }

    /// Re-evaluate every relation and check it is homogeneous.
    pub fn verify_relations(&self, alg: &AbelianAlgebra) -> Result<(), AbelianError> {
        for rel in &self.relations {
            let shown = self.render_relation(rel);
            let grades: Vec<(u32, Vec<i64>)> = rel.lhs.iter().chain(&rel.rhs).map(|m| self.monomial_grading(m)).collect();
            if grades.windows(2).any(|w| w[0] != w[1]) {
                return Err(AbelianError::Verification(format!("relation {shown} is not homogeneous")));
            }
            if self.evaluate_sum(alg, &rel.lhs)? != self.evaluate_sum(alg, &rel.rhs)? {
                return Err(AbelianError::Verification(format!("relation {shown} does not hold")));
            }
        }
        Ok(())
    }

    /// Check that generator monomials span every t-degree piece through `order`.
    pub fn check_sufficiency(&self, alg: &AbelianAlgebra, order: u32) -> Result<(), AbelianError> {
        let expected = alg.graded_dimensions(order)?;
        let degrees: Vec<u32> = self.generators.iter().map(|g| g.degree).collect();
        for (d, &want) in expected.iter().enumerate() {
            let mut rows: BTreeMap<Vec<i64>, Vec<BTreeMap<Vec<u32>, BigRational>>> = BTreeMap::new();
            let mut exps = vec![0u32; degrees.len()];
            let mut monomials = Vec::new();
            monomials_of_degree(&degrees, 0, d as u32, &mut exps, &mut monomials);
            for e in monomials {
                let value = self.evaluate(alg, &GenMonomial { coeff: BigRational::one(), exponents: e })?;
                for (lambda, p) in value.terms() {
                    let row = p.terms().map(|(k, c)| (k.clone(), c.clone())).collect();
                    rows.entry(lambda.clone()).or_default().push(row);
                }
            }
            let got: u64 = rows.into_values().map(|r| linalg::sparse_rank(r) as u64).sum();
            if got != want {
                return Err(AbelianError::Verification(format!(
                    "generators span {got} dimensions in t-degree {d}, expected {want}"
                )));
            }
        }
        Ok(())
    }

    pub fn render_monomial(&self, m: &GenMonomial) -> String {
        let factors: Vec<String> = m
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(g, &n)| {
                let name = &self.generators[g].name;
                if n == 1 {
                    name.clone()
                } else {
                    format!("{name}^{n}")
                }
            })
            .collect();
        let mag = m.coeff.abs();
        let body = match (factors.is_empty(), mag.is_one()) {
            (true, _) => mag.to_string(),
            (false, true) => factors.join("*"),
            (false, false) => format!("{}*{}", mag, factors.join("*")),
        };
        if m.coeff.is_negative() {
            format!("-{body}")
        } else {
            body
        }
    }

    fn render_sum(&self, terms: &[GenMonomial]) -> String {
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, m) in terms.iter().enumerate() {
            let s = self.render_monomial(m);
            match (k, s.strip_prefix('-')) {
                (0, _) => out.push_str(&s),
                (_, Some(rest)) => out.push_str(&format!(" - {rest}")),
                (_, None) => out.push_str(&format!(" + {s}")),
            }
        }
        out
    }

    pub fn render_relation(&self, rel: &Relation) -> String {
        format!("{} = {}", self.render_sum(&rel.lhs), self.render_sum(&rel.rhs))
    }

    /// `x = E[1]`, `y = 1/27*E[-1]`; the `w_i` are printed bare.
    pub fn render_generator(&self, g: &Generator) -> String {
        match &g.kind {
            GeneratorKind::W(_) => g.name.clone(),
            GeneratorKind::E(l) => {
                let shown = AbelianElement::e(l).scale(&g.scale);
                format!("{} = {}", g.name, shown)
            }
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        writeln!(f, "generators: {}", names.join(", "))?;
        for g in &self.generators {
            writeln!(f, "  {} (degree {})", self.render_generator(g), g.degree)?;
        }
        writeln!(f, "relations:")?;
        for rel in &self.relations {
            writeln!(f, "  {}", self.render_relation(rel))?;
        }
        Ok(())
    }
}

fn name_generators(generators: &mut [Generator], rank: usize, laurent: bool) {
    let mut u = 0;
    for g in generators.iter_mut() {
        g.name = match g.kind {
            GeneratorKind::W(i) => super::poly::w_name(rank, i),
            GeneratorKind::E(_) if rank == 1 => {
                u += 1;
                match (u, laurent) {
                    (1, _) => "x".into(),
                    (_, true) => "xbar".into(),
                    _ => "y".into(),
                }
            }
            GeneratorKind::E(_) => {
                u += 1;
                format!("u{u}")
            }
        };
    }
}

/// Hilbert basis of the pointed cone spanned by `extreme`, by scanning the box
/// around the zonotope of the rays and sieving out sums.
fn hilbert_basis(
    extreme: &[Vec<i64>],
    dim: usize,
    inside: &dyn Fn(&[i64]) -> bool,
    degree: &dyn Fn(&[i64]) -> i64,
) -> Vec<Vec<i64>> {
    let mut lo = vec![0i64; dim];
    let mut hi = vec![0i64; dim];
    for ray in extreme {
        for i in 0..dim {
            lo[i] += ray[i].min(0);
            hi[i] += ray[i].max(0);
        }
    }
    let mut candidates = Vec::new();
    let mut point = lo.clone();
    'scan: loop {
        if point.iter().any(|&x| x != 0) && inside(&point) {
            candidates.push((degree(&point), point.clone()));
        }
        let mut i = dim;
        loop {
            if i == 0 {
                break 'scan;
            }
            i -= 1;
            if point[i] < hi[i] {
                point[i] += 1;
                break;
            }
            point[i] = lo[i];
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for (_, h) in candidates {
        let reducible = basis.iter().any(|b| {
            let diff: Vec<i64> = h.iter().zip(b).map(|(x, y)| x - y).collect();
            inside(&diff)
        });
        if !reducible {
            basis.push(h);
        }
    }
    basis
}

fn monomials_of_degree(degrees: &[u32], i: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == degrees.len() {
        if left == 0 {
            out.push(exps.clone());
        }
        return;
    }
    let deg = degrees[i];
    let max = left.checked_div(deg).unwrap_or(0);
    for k in 0..=max {
        exps[i] = k;
        monomials_of_degree(degrees, i + 1, left - k * deg, exps, out);
    }
    exps[i] = 0;
}

fn canonical_sign(v: &[i64]) -> Vec<i64> {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => v.iter().map(|y| -y).collect(),
        _ => v.to_vec(),
    }
}

//! Gauge theories `(G, N)` with `G` a product of general-linear groups and a
//! torus, and the ways of producing them: direct weight data, quivers, and
//! exact sequences of tori.
//!
//! Coordinates of the maximal torus are laid out block by block: first one
//! block of size `n_i` per `GL(n_i)` factor, in order, then the torus
//! coordinates. Weights of `N` are stored as a sorted multiset of integer
//! vectors in these coordinates.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("gl factor #{index} has nonpositive rank {rank}")]
    NonpositiveRank { index: usize, rank: i64 },
    #[error("weight {weight:?} has length {len}, expected total rank {expected}")]
    WeightLength { weight: Vec<i64>, len: usize, expected: usize },
    #[error("coweight {0:?} has the wrong length")]
    CoweightLength(Vec<i64>),
    #[error("coweight {0} is not dominant")]
    NotDominant(Coweight),
    #[error("edge refers to undeclared vertex '{0}'")]
    UnknownVertex(String),
    #[error("duplicate vertex '{0}'")]
    DuplicateVertex(String),
    #[error("quiver has no vertex with positive dim V: the gauge group is trivial")]
    TrivialGaugeGroup,
    #[error("inclusion matrix must be d x (d-n) and projection n x d; got {inclusion_rows}x{inclusion_cols} and {projection_rows}x{projection_cols}")]
    SequenceShape { inclusion_rows: usize, inclusion_cols: usize, projection_rows: usize, projection_cols: usize },
    #[error("projection * inclusion is not zero")]
    NotComplex,
    #[error("{which} matrix is not of full rank: rank {rank}, expected {expected}")]
    RankDeficient { which: &'static str, rank: usize, expected: usize },
    #[error("{which} matrix has torsion: Smith invariant factor {factor}")]
    Torsion { which: &'static str, factor: i64 },
    #[error("ambient weight {0:?} has the wrong length")]
    AmbientLength(Vec<i64>),
}

/// Gauge group `prod GL(n_i) x (C^*)^torus_rank` with matter given by its
/// torus weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaugeTheory {
    gl_factors: Vec<usize>,
    torus_rank: usize,
    weights: Vec<Vec<i64>>,
}

impl GaugeTheory {
    /// Validate raw data; weights are sorted lexicographically.
    pub fn new(gl_factors: Vec<i64>, torus_rank: usize, mut weights: Vec<Vec<i64>>) -> Result<Self, TheoryError> {
        let mut ranks = Vec::with_capacity(gl_factors.len());
        for (index, &rank) in gl_factors.iter().enumerate() {
            if rank <= 0 {
                return Err(TheoryError::NonpositiveRank { index, rank });
            }
            ranks.push(rank as usize);
        }
        let expected = ranks.iter().sum::<usize>() + torus_rank;
        if let Some(w) = weights.iter().find(|w| w.len() != expected) {
            return Err(TheoryError::WeightLength { weight: w.clone(), len: w.len(), expected });
        }
        weights.sort();
        Ok(Self { gl_factors: ranks, torus_rank, weights })
    }

    pub fn torus(rank: usize, weights: Vec<Vec<i64>>) -> Result<Self, TheoryError> {
        Self::new(Vec::new(), rank, weights)
    }

    /// Re-run validation on an existing theory.
    pub fn validate(&self) -> Result<Self, TheoryError> {
        let gl = self.gl_factors.iter().map(|&n| n as i64).collect();
        Self::new(gl, self.torus_rank, self.weights.clone())
    }

    pub fn gl_factors(&self) -> &[usize] {
        &self.gl_factors
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn total_rank(&self) -> usize {
        self.gl_factors.iter().sum::<usize>() + self.torus_rank
    }

    /// True when every factor is abelian (no `GL(n)` with `n >= 2`).
    pub fn is_abelian(&self) -> bool {
        self.gl_factors.iter().all(|&n| n == 1)
    }

    /// Coordinate ranges of the gl blocks, in order.
    pub fn gl_blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.gl_factors
            .iter()
            .map(|&n| {
                let r = start..start + n;
                start += n;
                r
            })
            .collect()
    }

    /// First coordinate of the torus block.
    pub fn torus_offset(&self) -> usize {
        self.gl_factors.iter().sum()
    }

    /// Positive roots `e_a - e_b`, `a < b`, within each gl block.
    pub fn positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.total_rank();
        let mut roots = Vec::new();
        for block in self.gl_blocks() {
            for a in block.clone() {
                for b in a + 1..block.end {
                    let mut r = vec![0; n];
                    r[a] = 1;
                    r[b] = -1;
                    roots.push(r);
                }
            }
        }
        roots
    }

    /// Simple roots `e_a - e_{a+1}` within each gl block: the walls of the
    /// dominant chamber.
    pub fn simple_roots(&self) -> Vec<Vec<i64>> {
        let n = self.total_rank();
        let mut roots = Vec::new();
        for block in self.gl_blocks() {
            for a in block.start..block.end.saturating_sub(1) {
                let mut r = vec![0; n];
                r[a] = 1;
                r[a + 1] = -1;
                roots.push(r);
            }
        }
        roots
    }

    /// Rank of `pi_1(G)`: one per gl factor plus the torus rank.
    pub fn pi1_rank(&self) -> usize {
        self.gl_factors.len() + self.torus_rank
    }
}

/// Integer cocharacter of the maximal torus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// Nonincreasing within every gl block; torus block unconstrained.
    pub fn is_dominant(&self, theory: &GaugeTheory) -> bool {
        self.0.len() == theory.total_rank()
            && theory.gl_blocks().into_iter().all(|b| self.0[b].windows(2).all(|w| w[0] >= w[1]))
    }

    /// Checks length and dominance.
    pub fn check(&self, theory: &GaugeTheory) -> Result<(), TheoryError> {
        if self.0.len() != theory.total_rank() {
            return Err(TheoryError::CoweightLength(self.0.clone()));
        }
        if !self.is_dominant(theory) {
            return Err(TheoryError::NotDominant(self.clone()));
        }
        Ok(())
    }

    /// Component in `pi_1(G)`: the sum of entries per gl block, followed by
    /// the torus block verbatim.
    pub fn pi1_class(&self, theory: &GaugeTheory) -> Vec<i64> {
        let mut class: Vec<i64> = theory.gl_blocks().into_iter().map(|b| self.0[b].iter().sum()).collect();
        class.extend_from_slice(&self.0[theory.torus_offset()..]);
        class
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverVertex {
    pub name: String,
    pub dim_v: usize,
    pub dim_w: usize,
}

/// Quiver with dimension vectors. Loops and multiple edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverSpec {
    vertices: Vec<QuiverVertex>,
    /// `(out, in)` vertex indices.
    edges: Vec<(usize, usize)>,
}

impl QuiverSpec {
    pub fn new(vertices: Vec<QuiverVertex>, edges: Vec<(String, String)>) -> Result<Self, TheoryError> {
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].iter().any(|u| u.name == v.name) {
                return Err(TheoryError::DuplicateVertex(v.name.clone()));
            }
        }
        let index = |name: &str| {
            vertices
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| TheoryError::UnknownVertex(name.to_string()))
        };
        let edges = edges
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>, TheoryError>>()?;
        if vertices.iter().all(|v| v.dim_v == 0) {
            return Err(TheoryError::TrivialGaugeGroup);
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &[QuiverVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of weights of `N`, counted with multiplicity.
    pub fn matter_dimension(&self) -> usize {
        let v = |i: usize| self.vertices[i].dim_v;
        self.edges.iter().map(|&(o, i)| v(o) * v(i)).sum::<usize>()
            + self.vertices.iter().map(|x| x.dim_w * x.dim_v).sum::<usize>()
    }

    /// `G = prod GL(V_i)`, `N = (+)_h Hom(V_out, V_in) (+) (+)_i Hom(W_i, V_i)`.
    ///
    /// Vertices with `dim V >= 2` become gl blocks in vertex order; vertices
    /// with `dim V = 1` become torus coordinates, also in vertex order;
    /// vertices with `dim V = 0` are dropped.
    pub fn to_theory(&self) -> GaugeTheory {
        let mut offsets = vec![None; self.vertices.len()];
        let mut next = 0;
        let mut gl = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.dim_v >= 2 {
                offsets[i] = Some(next);
                next += v.dim_v;
                gl.push(v.dim_v as i64);
            }
        }
        let mut torus = 0;
        for (i, v) in self.vertices.iter().enumerate() {
            if v.dim_v == 1 {
                offsets[i] = Some(next);
                next += 1;
                torus += 1;
            }
        }
        let total = next;
        let unit = |k: usize| {
            let mut e = vec![0i64; total];
            e[k] = 1;
            e
        };
        let mut weights = Vec::new();
        for &(o, i) in &self.edges {
            let (Some(oo), Some(io)) = (offsets[o], offsets[i]) else { continue };
            for a in 0..self.vertices[i].dim_v {
                for b in 0..self.vertices[o].dim_v {
                    let mut w = unit(io + a);
                    w[oo + b] -= 1;
                    weights.push(w);
                }
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let Some(off) = offsets[i] else { continue };
            for _ in 0..v.dim_w {
                for a in 0..v.dim_v {
                    weights.push(unit(off + a));
                }
            }
        }
        GaugeTheory::new(gl, torus, weights).expect("quiver weights have the total rank by construction")
    }
}

/// `1 -> T = (C^*)^(d-n) -> T~ = (C^*)^d -> T_F = (C^*)^n -> 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSequence {
    inclusion: IntMatrix,
    projection: IntMatrix,
}

impl TorusSequence {
    /// Validates shapes, `projection * inclusion = 0`, and that both maps are
    /// saturated of full rank (all Smith invariant factors equal to 1).
    pub fn new(inclusion: IntMatrix, projection: IntMatrix) -> Result<Self, TheoryError> {
        let d = inclusion.nrows();
        let k = inclusion.ncols();
        let n = projection.nrows();
        if projection.ncols() != d || k + n != d {
            return Err(TheoryError::SequenceShape {
                inclusion_rows: d,
                inclusion_cols: k,
                projection_rows: n,
                projection_cols: projection.ncols(),
            });
        }
        if !projection.mul(&inclusion).is_zero() {
            return Err(TheoryError::NotComplex);
        }
        check_saturated("inclusion", &inclusion, k)?;
        check_saturated("projection", &projection, n)?;
        Ok(Self { inclusion, projection })
    }

    /// The sequence `T = T~ -> T_F = 1`.
    pub fn identity(d: usize) -> Self {
        Self::new(IntMatrix::identity(d), IntMatrix::zeros(0, d)).expect("identity sequence is exact")
    }

    /// Complete a saturated inclusion to an exact sequence; the projection is
    /// a lattice basis of the left kernel of `inclusion`.
    pub fn from_inclusion(inclusion: IntMatrix) -> Result<Self, TheoryError> {
        let rows = linalg::kernel_basis(&inclusion.transpose());
        let projection = IntMatrix::from_rows(&rows, inclusion.nrows()).expect("kernel vectors have length d");
        Self::new(inclusion, projection)
    }

    pub fn inclusion(&self) -> &IntMatrix {
        &self.inclusion
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    /// `d`, the rank of the ambient torus.
    pub fn ambient_rank(&self) -> usize {
        self.inclusion.nrows()
    }

    /// `1 -> T_F^v -> T~^v -> T^v -> 1`: transposes swap roles.
    pub fn dual(&self) -> Result<Self, TheoryError> {
        Self::new(self.projection.transpose(), self.inclusion.transpose())
    }

    /// Restriction to `T` of the representation of `T~` with the given
    /// weights (the standard representation when `None`).
    pub fn restrict(&self, ambient_weights: Option<&[Vec<i64>]>) -> Result<GaugeTheory, TheoryError> {
        let d = self.ambient_rank();
        let standard: Vec<Vec<i64>>;
        let ambient = match ambient_weights {
            Some(w) => w,
            None => {
                standard = IntMatrix::identity(d).to_rows();
                &standard
            }
        };
        let inc_t = self.inclusion.transpose();
        let mut weights = Vec::with_capacity(ambient.len());
        for w in ambient {
            if w.len() != d {
                return Err(TheoryError::AmbientLength(w.clone()));
            }
            weights.push(inc_t.mul_vec(w));
        }
        GaugeTheory::torus(self.inclusion.ncols(), weights)
    }
}

fn check_saturated(which: &'static str, m: &IntMatrix, expected: usize) -> Result<(), TheoryError> {
    let inv = linalg::smith_invariants(m);
    if let Some(&factor) = inv.iter().find(|&&f| f != 1) {
        return Err(TheoryError::Torsion { which, factor });
    }
    if inv.len() != expected {
        return Err(TheoryError::RankDeficient { which, rank: inv.len(), expected });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertex(name: &str, v: usize, w: usize) -> QuiverVertex {
        QuiverVertex { name: name.into(), dim_v: v, dim_w: w }
    }

    #[test]
    fn validation() {
        assert!(GaugeTheory::torus(1, vec![vec![1]]).is_ok());
        assert!(GaugeTheory::torus(1, vec![]).is_ok());
        assert!(matches!(
            GaugeTheory::new(vec![2], 0, vec![vec![1, 0, 0]]),
            Err(TheoryError::WeightLength { len: 3, expected: 2, .. })
        ));
        assert!(matches!(GaugeTheory::new(vec![0], 1, vec![]), Err(TheoryError::NonpositiveRank { .. })));
        let t = GaugeTheory::torus(2, vec![vec![1, 1], vec![-1, 0], vec![0, 0]]).unwrap();
        assert_eq!(t.weights(), &[vec![-1, 0], vec![0, 0], vec![1, 1]]);
        assert_eq!(t.validate().unwrap(), t);
    }

    #[test]
    fn dominance_and_pi1() {
        let th = GaugeTheory::new(vec![2], 1, vec![]).unwrap();
        assert!(Coweight(vec![1, 0, -5]).is_dominant(&th));
        assert!(!Coweight(vec![0, 1, 0]).is_dominant(&th));
        assert_eq!(Coweight(vec![3, -1, 7]).pi1_class(&th), vec![2, 7]);
        assert_eq!(th.positive_roots(), vec![vec![1, -1, 0]]);
    }

    #[test]
    fn jordan_quiver() {
        let q = QuiverSpec::new(vec![vertex("a", 1, 1)], vec![("a".into(), "a".into())]).unwrap();
        let th = q.to_theory();
        assert_eq!(th.torus_rank(), 1);
        assert!(th.gl_factors().is_empty());
        assert_eq!(th.weights(), &[vec![0], vec![1]]);
    }

    #[test]
    fn a1_and_a2_quivers() {
        let a1 = QuiverSpec::new(vec![vertex("a", 1, 2)], vec![]).unwrap().to_theory();
        assert_eq!(a1.weights(), &[vec![1], vec![1]]);
        let a2 = QuiverSpec::new(vec![vertex("1", 1, 1), vertex("2", 1, 0)], vec![("1".into(), "2".into())])
            .unwrap()
            .to_theory();
        assert_eq!(a2.torus_rank(), 2);
        assert_eq!(a2.weights(), &[vec![-1, 1], vec![1, 0]]);
    }

    #[test]
    fn quiver_weight_count() {
        let q = QuiverSpec::new(
            vec![vertex("a", 2, 1), vertex("b", 3, 0), vertex("c", 0, 4)],
            vec![("a".into(), "b".into()), ("b".into(), "b".into()), ("c".into(), "a".into())],
        )
        .unwrap();
        assert_eq!(q.to_theory().weights().len(), q.matter_dimension());
        assert_eq!(q.matter_dimension(), 6 + 9 + 2);
        assert_eq!(q.to_theory().gl_factors(), &[2, 3]);
    }

    #[test]
    fn quiver_errors() {
        assert_eq!(
            QuiverSpec::new(vec![vertex("a", 1, 0)], vec![("a".into(), "b".into())]),
            Err(TheoryError::UnknownVertex("b".into()))
        );
        assert_eq!(QuiverSpec::new(vec![vertex("a", 0, 3)], vec![]), Err(TheoryError::TrivialGaugeGroup));
    }

    fn diagonal() -> TorusSequence {
        TorusSequence::new(
            IntMatrix::from_rows(&[vec![1], vec![1]], 1).unwrap(),
            IntMatrix::from_rows(&[vec![1, -1]], 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn dualize_diagonal() {
        let s = diagonal();
        let d = s.dual().unwrap();
        assert_eq!(d.inclusion().to_rows(), vec![vec![1], vec![-1]]);
        assert_eq!(d.projection().to_rows(), vec![vec![1, 1]]);
        assert_eq!(d.dual().unwrap(), s);
    }

    #[test]
    fn identity_sequence_dual() {
        let s = TorusSequence::identity(3);
        let d = s.dual().unwrap();
        assert_eq!(d.inclusion().ncols(), 0);
        assert_eq!(d.projection(), &IntMatrix::identity(3));
    }

    #[test]
    fn torsion_rejected() {
        let r = TorusSequence::new(IntMatrix::from_rows(&[vec![2]], 1).unwrap(), IntMatrix::zeros(0, 1));
        assert_eq!(r, Err(TheoryError::Torsion { which: "inclusion", factor: 2 }));
    }

    #[test]
    fn restriction() {
        let th = diagonal().restrict(None).unwrap();
        assert_eq!(th.torus_rank(), 1);
        assert_eq!(th.weights(), &[vec![1], vec![1]]);
        let id = TorusSequence::identity(2).restrict(None).unwrap();
        assert_eq!(id.weights(), &[vec![0, 1], vec![1, 0]]);
        let trivial = TorusSequence::identity(2).dual().unwrap().restrict(None).unwrap();
        assert_eq!(trivial.total_rank(), 0);
        assert_eq!(trivial.weights(), &[Vec::<i64>::new(), Vec::new()]);
        assert!(diagonal().restrict(Some(&[vec![1]])).is_err());
    }

    #[test]
    fn completion_from_inclusion() {
        let s = TorusSequence::from_inclusion(IntMatrix::from_rows(&[vec![1, 0], vec![1, 1], vec![0, 2]], 2).unwrap())
            .unwrap();
        assert_eq!(s.projection().nrows(), 1);
        assert!(s.projection().mul(s.inclusion()).is_zero());
    }
}

//! Small dense integer matrices.
//!
//! Everything here works over `i64` and is meant for the tiny matrices that
//! show up in weight data and torus sequences (a handful of rows and columns).

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Build from rows; `cols` is needed to describe matrices with no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Replace columns `(a, b)` by `(p*a + q*b, r*a + s*b)`.
    fn combine_cols(&mut self, a: usize, b: usize, p: i64, q: i64, r: i64, s: i64) {
        for i in 0..self.rows {
            let (x, y) = (self[(i, a)], self[(i, b)]);
            self[(i, a)] = p * x + q * y;
            self[(i, b)] = r * x + s * y;
        }
    }

    fn combine_rows(&mut self, a: usize, b: usize, p: i64, q: i64, r: i64, s: i64) {
        for j in 0..self.cols {
            let (x, y) = (self[(a, j)], self[(b, j)]);
            self[(a, j)] = p * x + q * y;
            self[(b, j)] = r * x + s * y;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divide out the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Result of [`column_reduce`]: `m * transform = [pivoted | 0]`.
#[derive(Debug, Clone)]
pub struct ColumnReduction {
    /// Rank of the input over the rationals.
    pub rank: usize,
    /// Unimodular `cols x cols` matrix of the column operations.
    pub transform: IntMatrix,
    /// `m * transform`; columns `rank..` are zero.
    pub reduced: IntMatrix,
}

impl ColumnReduction {
    /// Saturated lattice basis of `{x in Z^cols : m x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        (self.rank..self.transform.ncols()).map(|j| self.transform.column(j)).collect()
    }
}

/// Unimodular 2x2 step `(x, y) -> (g, 0)` with `g = gcd(x, y)` up to sign.
///
/// Returns `(p, q, r, s)` with `p*x + q*y = g`, `r*x + s*y = 0` and
/// `p*s - q*r = 1`. When `x | y` this is a plain subtraction, so the pivot
/// magnitude never stalls.
fn elimination_step(x: i64, y: i64) -> (i64, i64, i64, i64) {
    if x != 0 && y % x == 0 {
        return (1, 0, -(y / x), 1);
    }
    let e = x.extended_gcd(&y);
    let g = e.gcd;
    (e.x, e.y, -y / g, x / g)
}

/// Unimodular column echelon reduction over the integers.
pub fn column_reduce(m: &IntMatrix) -> ColumnReduction {
    let mut a = m.clone();
    let mut v = IntMatrix::identity(m.ncols());
    let mut pivot = 0;
    for i in 0..a.nrows() {
        if pivot == a.ncols() {
            break;
        }
        for j in pivot + 1..a.ncols() {
            let (x, y) = (a[(i, pivot)], a[(i, j)]);
            if y == 0 {
                continue;
            }
            let (p, q, r, s) = elimination_step(x, y);
            a.combine_cols(pivot, j, p, q, r, s);
            v.combine_cols(pivot, j, p, q, r, s);
        }
        if a[(i, pivot)] != 0 {
            pivot += 1;
        }
    }
    ColumnReduction { rank: pivot, transform: v, reduced: a }
}

pub fn rank(m: &IntMatrix) -> usize {
    column_reduce(m).rank
}

pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<i64>> {
    column_reduce(m).kernel_basis()
}

/// Candidate extreme rays of the fan cut out by the hyperplanes `n . x = 0`
/// in `Z^dim`: for every `dim - 1` normals of rank `dim - 1`, both primitive
/// generators of their common kernel line. Every extreme ray of every pointed
/// cone defined by sign conditions on the normals is among them. Sorted in
/// decreasing lexicographic order.
pub fn arrangement_rays(normals: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    if dim == 0 {
        return Vec::new();
    }
    let mut rays = std::collections::BTreeSet::new();
    for subset in normals.iter().combinations(dim - 1) {
        let rows: Vec<Vec<i64>> = subset.into_iter().cloned().collect();
        let m = IntMatrix::from_rows(&rows, dim).expect("normals have the ambient dimension");
        let red = column_reduce(&m);
        if red.rank != dim - 1 {
            continue;
        }
        let v = primitive(&red.kernel_basis()[0]);
        rays.insert(v.iter().map(|x| -x).collect::<Vec<_>>());
        rays.insert(v);
    }
    rays.into_iter().rev().collect()
}

/// Nonzero invariant factors of the Smith normal form, in divisibility order.
pub fn smith_invariants(m: &IntMatrix) -> Vec<i64> {
    let mut a = m.clone();
    let mut factors = Vec::new();
    let mut t = 0;
    while t < a.nrows().min(a.ncols()) {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.nrows() {
            for j in t..a.ncols() {
                let x = a[(i, j)].abs();
                if x != 0 && best.is_none_or(|(bi, bj)| x < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..a.nrows() {
                let (x, y) = (a[(t, t)], a[(i, t)]);
                if y != 0 {
                    let (p, q, r, s) = elimination_step(x, y);
                    a.combine_rows(t, i, p, q, r, s);
                }
            }
            for j in t + 1..a.ncols() {
                let (x, y) = (a[(t, t)], a[(t, j)]);
                if y != 0 {
                    let (p, q, r, s) = elimination_step(x, y);
                    a.combine_cols(t, j, p, q, r, s);
                    clean = false;
                }
            }
            if (t + 1..a.nrows()).any(|i| a[(i, t)] != 0) {
                clean = false;
            }
            if clean {
                // enforce divisibility of the remaining block
                let p = a[(t, t)];
                let bad = (t + 1..a.nrows())
                    .flat_map(|i| (t + 1..a.ncols()).map(move |j| (i, j)))
                    .find(|&(i, j)| a[(i, j)] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..a.ncols() {
                            let x = a[(i, j)];
                            a[(t, j)] += x;
                        }
                    }
                    None => break,
                }
            }
        }
        factors.push(a[(t, t)].abs());
        t += 1;
    }
    factors
}

/// Determinant of a square matrix, by fraction-free elimination.
pub fn determinant(m: &IntMatrix) -> i64 {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    let mut a: Vec<Vec<i128>> = m.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let d = if n == 0 { 1 } else { a[n - 1][n - 1] };
    i64::try_from(sign * d).expect("determinant overflows i64")
}

/// Inverse of a matrix with determinant `+-1`, by cofactors.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let n = m.nrows();
    let det = determinant(m);
    if det.abs() != 1 {
        return None;
    }
    let mut inv = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut minor = IntMatrix::zeros(n - 1, n - 1);
            for (a, r) in (0..n).filter(|&r| r != j).enumerate() {
                for (b, c) in (0..n).filter(|&c| c != i).enumerate() {
                    minor[(a, b)] = m[(r, c)];
                }
            }
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[(i, j)] = sign * determinant(&minor) * det;
        }
    }
    Some(inv)
}

/// Rank over the rationals of sparse rows, each a map from column key to entry.
pub fn sparse_rank<K: Ord + Clone>(rows: impl IntoIterator<Item = BTreeMap<K, BigRational>>) -> usize {
    // pivot column -> row normalized to 1 there, with nothing smaller than the pivot
    let mut pivots: BTreeMap<K, BTreeMap<K, BigRational>> = BTreeMap::new();
    for mut row in rows {
        row.retain(|_, v| !v.is_zero());
        while let Some((lead, c)) = row.iter().next().map(|(k, v)| (k.clone(), v.clone())) {
            match pivots.get(&lead) {
                Some(p) => {
                    for (k, v) in p {
                        let e = row.entry(k.clone()).or_insert_with(BigRational::zero);
                        *e -= &c * v;
                        if e.is_zero() {
                            row.remove(k);
                        }
                    }
                }
                None => {
                    let inv = c.recip();
                    let normalized = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]], cols: usize) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols).unwrap()
    }

    #[test]
    fn smith_of_diagonal_and_torsion() {
        assert_eq!(smith_invariants(&mat(&[&[2, 0], &[0, 3]], 2)), vec![1, 6]);
        assert_eq!(smith_invariants(&mat(&[&[2]], 1)), vec![2]);
        assert_eq!(smith_invariants(&mat(&[&[1], &[1]], 1)), vec![1]);
        assert_eq!(smith_invariants(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]], 3)), vec![2, 6, 12]);
        assert_eq!(smith_invariants(&IntMatrix::zeros(0, 3)), Vec::<i64>::new());
        assert_eq!(smith_invariants(&IntMatrix::zeros(2, 2)), Vec::<i64>::new());
    }

    #[test]
    fn column_reduction_gives_kernel() {
        let m = mat(&[&[1, 1, 0], &[0, 2, 2]], 3);
        let red = column_reduce(&m);
        assert_eq!(red.rank, 2);
        let k = red.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(m.mul_vec(&k[0]), vec![0, 0]);
        assert_eq!(determinant(&red.transform).abs(), 1);
        assert_eq!(red.reduced, m.mul(&red.transform));
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of (2, 4) is spanned by (2, -1), not (4, -2)
        let k = kernel_basis(&mat(&[&[2, 4]], 2));
        assert_eq!(k.len(), 1);
        assert_eq!(primitive(&k[0]), k[0]);
        assert_eq!(rank(&IntMatrix::zeros(3, 2)), 0);
        assert_eq!(kernel_basis(&IntMatrix::zeros(0, 2)).len(), 2);
    }

    #[test]
    fn rays_of_coordinate_arrangement() {
        let rays = arrangement_rays(&[vec![1, 0], vec![0, 1], vec![1, -1]], 2);
        assert_eq!(rays, vec![vec![1, 1], vec![1, 0], vec![0, 1], vec![0, -1], vec![-1, 0], vec![-1, -1]]);
        assert_eq!(arrangement_rays(&[], 1), vec![vec![1], vec![-1]]);
        assert!(arrangement_rays(&[], 2).is_empty());
        // parallel normals never pin down a line in 3d
        assert!(arrangement_rays(&[vec![1, 0, 0], vec![2, 0, 0]], 3).is_empty());
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&mat(&[&[2, 1], &[1, 3]], 2)), 5);
        assert_eq!(determinant(&mat(&[&[0, 1], &[1, 0]], 2)), -1);
        assert_eq!(determinant(&mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]], 3)), -3);
        assert_eq!(determinant(&IntMatrix::zeros(0, 0)), 1);
    }

    #[test]
    fn sparse_rank_counts_independent_rows() {
        let q = |n: i64| BigRational::from_integer(n.into());
        let row = |es: &[(u32, i64)]| es.iter().map(|&(k, v)| (k, q(v))).collect::<BTreeMap<_, _>>();
        let rows = vec![row(&[(0, 1), (1, 2)]), row(&[(0, 2), (1, 4)]), row(&[(1, 1), (3, -1)]), row(&[]), row(&[(0, 1), (3, 2)])];
        assert_eq!(sparse_rank(rows), 2);
        assert_eq!(sparse_rank(vec![row(&[(5, 3)]), row(&[(2, 1), (5, 1)])]), 2);
    }

    #[test]
    fn unimodular_inverse_round_trip() {
        let m = mat(&[&[2, 1, 0], &[1, 1, 0], &[3, 0, 1]], 3);
        let inv = unimodular_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), IntMatrix::identity(3));
        assert!(unimodular_inverse(&mat(&[&[2]], 1)).is_none());
        assert_eq!(unimodular_inverse(&IntMatrix::zeros(0, 0)).unwrap().nrows(), 0);
    }
}

//! Exact linear algebra over the rationals.
//!
//! Two elimination routes live here. Small dense problems (echelon bases of
//! subspaces of `g`, determinants, Killing forms) go through Bareiss
//! fraction-free elimination. Large sparse differentials go through a
//! fraction-free sparse echelon pass on primitive integer vectors. Both are
//! deterministic: pivot choice depends only on the input order.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Dense row-major rational matrix.
pub type Matrix = Vec<Vec<Rational>>;

/// Sorted `(index, value)` pairs with no stored zeros.
pub type SparseVec = Vec<(usize, Rational)>;

pub fn zero_matrix(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity_matrix(n: usize) -> Matrix {
    let mut m = zero_matrix(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zero_matrix(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate().take(inner) {
            if aik.is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn trace(a: &Matrix) -> Rational {
    a.iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (i, row)| acc + &row[i])
}

pub fn is_zero_matrix(a: &Matrix) -> bool {
    a.iter().all(|row| row.iter().all(Zero::is_zero))
}

/// Scale a rational row to a primitive integer row (content 1, leading entry positive).
pub fn primitive_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = row
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    normalize_content(&mut ints);
    ints
}

fn normalize_content(ints: &mut [BigInt]) {
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return;
    }
    let negate = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in ints.iter_mut() {
        *x = &*x / &g;
        if negate {
            *x = -&*x;
        }
    }
}

/// Bareiss fraction-free row echelon form.
///
/// Returns the echelon matrix and its pivot columns. Every intermediate entry
/// is a minor of the input, so the divisions are exact.
pub fn bareiss_echelon(mut m: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Rank of a dense rational matrix via Bareiss.
pub fn dense_rank(a: &Matrix) -> usize {
    let ints = a.iter().map(|row| primitive_row(row)).collect();
    bareiss_echelon(ints).1.len()
}

/// Determinant of a square rational matrix via Bareiss.
pub fn determinant(a: &Matrix) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    let lcm = a
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = Rational::from_integer(lcm.clone());
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| row.iter().map(|x| (x * &scale).to_integer()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det_scaled = Rational::from_integer(sign * &m[n - 1][n - 1]);
    det_scaled / Rational::from_integer(num_traits::pow(lcm, n))
}

/// Reduced row echelon form (rows with leading 1) and pivot columns.
pub fn rref(rows: &[Vec<Rational>]) -> (Matrix, Vec<usize>) {
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive_row(r)).collect();
    let (ech, pivots) = bareiss_echelon(ints);
    let mut out: Matrix = ech
        .into_iter()
        .take(pivots.len())
        .zip(&pivots)
        .map(|(row, &p)| {
            let lead = Rational::from_integer(row[p].clone());
            row.into_iter()
                .map(|x| Rational::from_integer(x) / &lead)
                .collect()
        })
        .collect();
    for k in (0..pivots.len()).rev() {
        let p = pivots[k];
        for i in 0..k {
            let f = out[i][p].clone();
            if f.is_zero() {
                continue;
            }
            let pivot_row = out[k].clone();
            for (x, y) in out[i].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    (out, pivots)
}

/// Basis of the right nullspace `{x : a x = 0}` of a dense matrix.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// A linear subspace of `Q^n`, stored as an RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<Rational>]) -> Self {
        let (basis, pivots) = rref(vectors);
        Subspace { ambient, basis, pivots }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::span(ambient, &identity_matrix(ambient))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let f = w[p].clone();
            if !f.is_zero() {
                for (x, y) in w.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        w.iter().all(Zero::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }
}

/// Column-major sparse rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            columns: (0..n).map(|i| vec![(i, Rational::one())]).collect(),
        }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); cols];
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            *acc[j].entry(i).or_insert_with(Rational::zero) += v;
        }
        SparseMatrix {
            rows,
            columns: acc
                .into_iter()
                .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        let columns = columns
            .into_iter()
            .map(|c| {
                let mut m: BTreeMap<usize, Rational> = BTreeMap::new();
                for (i, v) in c {
                    assert!(i < rows);
                    *m.entry(i).or_insert_with(Rational::zero) += v;
                }
                m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMatrix { rows, columns }
    }

    pub fn from_dense(a: &Matrix) -> Self {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        SparseMatrix::from_triplets(
            rows,
            cols,
            a.iter().enumerate().flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(move |(j, v)| (i, j, v.clone()))
            }),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.columns[j]
            .binary_search_by_key(&i, |(r, _)| *r)
            .map(|k| self.columns[j][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols()
            && self
                .columns
                .iter()
                .enumerate()
                .all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1.is_one())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v)))
    }

    /// `self * v` for a sparse vector `v`.
    pub fn apply(&self, v: &[(usize, Rational)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (k, x) in v {
            for (i, a) in &self.columns[*k] {
                *acc.entry(*i).or_insert_with(Rational::zero) += a * x;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "dimension mismatch in product");
        SparseMatrix {
            rows: self.rows,
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(
            self.cols(),
            self.rows,
            self.triplets().map(|(i, j, v)| (j, i, v.clone())),
        )
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = zero_matrix(self.rows, self.cols());
        for (i, j, v) in self.triplets() {
            m[i][j] = v.clone();
        }
        m
    }

    /// Largest absolute entry of `self - other`, with its position.
    pub fn max_abs_difference(&self, other: &SparseMatrix) -> (Rational, Option<(usize, usize)>) {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let mut diff: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (i, j, v) in self.triplets() {
            *diff.entry((i, j)).or_insert_with(Rational::zero) += v;
        }
        for (i, j, v) in other.triplets() {
            *diff.entry((i, j)).or_insert_with(Rational::zero) -= v;
        }
        let mut best = Rational::zero();
        let mut at = None;
        for (pos, v) in diff {
            let a = v.abs();
            if a > best {
                best = a;
                at = Some(pos);
            }
        }
        (best, at)
    }

    /// Exact rank by fraction-free sparse elimination over the integers.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<(usize, BigInt)>> = HashMap::new();
        for col in &self.columns {
            let mut v = primitive_sparse(col);
            while let Some((lead, _)) = v.first() {
                match pivots.get(lead) {
                    Some(p) => v = eliminate_leading(&v, p),
                    None => {
                        pivots.insert(*lead, v);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

fn primitive_sparse(v: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let lcm = v.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let scale = Rational::from_integer(lcm);
    let mut ints: Vec<(usize, BigInt)> = v.iter().map(|(i, x)| (*i, (x * &scale).to_integer())).collect();
    make_primitive(&mut ints);
    ints
}

fn make_primitive(v: &mut [(usize, BigInt)]) {
    let g = v.iter().fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, x) in v.iter_mut() {
        *x = &*x / &g;
    }
}

/// `a*v - b*p` where `a`, `b` are the leading coefficients of `p` and `v`
/// divided by their gcd; the result has a strictly larger leading index.
fn eliminate_leading(v: &[(usize, BigInt)], p: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
    let g = v[0].1.gcd(&p[0].1);
    let a = &p[0].1 / &g;
    let b = &v[0].1 / &g;
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let (idx, val) = match (v.get(i), p.get(j)) {
            (Some((vi, vx)), Some((pj, px))) if vi == pj => {
                i += 1;
                j += 1;
                (*vi, &a * vx - &b * px)
            }
            (Some((vi, vx)), Some((pj, _))) if vi < pj => {
                i += 1;
                (*vi, &a * vx)
            }
            (Some((vi, vx)), None) => {
                i += 1;
                (*vi, &a * vx)
            }
            (_, Some((pj, px))) => {
                j += 1;
                (*pj, -(&b * px))
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((idx, val));
        }
    }
    make_primitive(&mut out);
    out
}

/// Dot product of two sparse vectors.
pub fn sparse_dot(a: &[(usize, Rational)], b: &[(usize, Rational)]) -> Rational {
    let mut acc = Rational::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};
    use proptest::prelude::*;

    // Plain rational Gauss-Jordan; independent of both elimination routes above.
    fn naive_rank(a: &Matrix) -> usize {
        let mut m = a.clone();
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, p);
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = &m[i][c] / &m[r][c];
                    let pr = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec((-3i64..=3, 1i64..=3), c),
                r,
            )
            .prop_map(|rows| {
                rows.into_iter()
                    .map(|row| row.into_iter().map(|(n, d)| ratio(n, d)).collect())
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn sparse_and_dense_ranks_match_naive(a in small_matrix()) {
            let expected = naive_rank(&a);
            prop_assert_eq!(dense_rank(&a), expected);
            prop_assert_eq!(SparseMatrix::from_dense(&a).rank(), expected);
            prop_assert_eq!(SparseMatrix::from_dense(&a).transpose().rank(), expected);
        }

        #[test]
        fn nullspace_vectors_are_killed(a in small_matrix()) {
            let cols = a[0].len();
            let ns = nullspace(&a, cols);
            prop_assert_eq!(ns.len() + naive_rank(&a), cols);
            for v in ns {
                for row in &a {
                    let s: Rational = row.iter().zip(&v).map(|(x, y)| x * y).sum();
                    prop_assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn determinant_of_small_matrices() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(1), rat(3)]];
        assert_eq!(determinant(&m), rat(5));
        let m = vec![vec![ratio(1, 2), rat(1)], vec![rat(1), rat(2)]];
        assert_eq!(determinant(&m), rat(0));
        let m = vec![
            vec![rat(0), rat(1), rat(0)],
            vec![rat(1), rat(0), rat(0)],
            vec![rat(0), rat(0), ratio(3, 2)],
        ];
        assert_eq!(determinant(&m), ratio(-3, 2));
    }

    #[test]
    fn rref_is_reduced() {
        let rows = vec![
            vec![rat(2), rat(4), rat(6)],
            vec![rat(1), rat(1), rat(1)],
            vec![rat(3), rat(5), rat(7)],
        ];
        let (r, pivots) = rref(&rows);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(r[0], vec![rat(1), rat(0), rat(-1)]);
        assert_eq!(r[1], vec![rat(0), rat(1), rat(2)]);
    }

    #[test]
    fn subspace_membership() {
        let s = Subspace::span(3, &[vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(0), rat(1)]]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[rat(2), rat(2), rat(-5)]));
        assert!(!s.contains(&[rat(1), rat(0), rat(0)]));
    }

    #[test]
    fn sparse_product_and_difference() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, rat(1))]);
        assert!(a.mul(&a).is_zero());
        let (d, at) = a.max_abs_difference(&SparseMatrix::zeros(2, 2));
        assert_eq!(d, rat(1));
        assert_eq!(at, Some((0, 1)));
        assert!(SparseMatrix::identity(3).is_identity());
    }
}

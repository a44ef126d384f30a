//! Chevalley–Eilenberg complexes, truncated Koszul complexes and exact
//! Betti numbers.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lie::{is_nilpotent, LieAlgebra, WeightStructure};
use crate::linalg::{mat_mul, mat_sub, trace, transpose, Matrix, SparseMatrix};
use crate::pbw::{weight_of, MultiIndex, PbwError, TruncationContext};
use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("module action violates the bracket relation at ({0}, {1})")]
    NotAModule(usize, usize),
    #[error("module has {got} action matrices for an algebra of dimension {expected}")]
    ActionCount { expected: usize, got: usize },
    #[error("composite of consecutive differentials is nonzero at degree {0}")]
    NonzeroComposite(i64),
    #[error("{0} requires the opposite module side")]
    WrongSide(&'static str),
    #[error(transparent)]
    Pbw(#[from] PbwError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `ρ(e_i)` acting on column vectors: `e_i·m = ρ_i m` for left modules,
/// `m·e_i = ρ_i m` for right modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleAction {
    pub dim: usize,
    pub side: Side,
    pub matrices: Vec<Matrix>,
}

impl ModuleAction {
    /// The one-dimensional trivial module.
    pub fn trivial(a: &LieAlgebra, side: Side) -> Self {
        ModuleAction { dim: 1, side, matrices: vec![vec![vec![Rational::zero()]]; a.dim()] }
    }

    /// `g` acting on itself by `ad`.
    pub fn adjoint(a: &LieAlgebra) -> Self {
        ModuleAction { dim: a.dim(), side: Side::Left, matrices: (0..a.dim()).map(|i| a.ad(i)).collect() }
    }

    /// Same space, other side, via `X·m = -m·X`.
    pub fn opposite(&self) -> Self {
        let neg = |m: &Matrix| m.iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect();
        ModuleAction {
            dim: self.dim,
            side: match self.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            matrices: self.matrices.iter().map(neg).collect(),
        }
    }

    /// The dual space with `(X·f)(m) = f(m·X)` (right to left) or
    /// `(f·X)(m) = f(X·m)` (left to right); both are transposes.
    pub fn dual(&self) -> Self {
        ModuleAction {
            dim: self.dim,
            side: match self.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            matrices: self.matrices.iter().map(transpose).collect(),
        }
    }

    /// Checks `ρ_i ρ_j - ρ_j ρ_i = ρ([e_i,e_j])` (left) or
    /// `ρ_j ρ_i - ρ_i ρ_j = ρ([e_i,e_j])` (right).
    pub fn check(&self, a: &LieAlgebra) -> Result<(), HomologyError> {
        let n = a.dim();
        if self.matrices.len() != n {
            return Err(HomologyError::ActionCount { expected: n, got: self.matrices.len() });
        }
        for i in 0..n {
            for j in i + 1..n {
                let (x, y) = (&self.matrices[i], &self.matrices[j]);
                let comm = match self.side {
                    Side::Left => mat_sub(&mat_mul(x, y), &mat_mul(y, x)),
                    Side::Right => mat_sub(&mat_mul(y, x), &mat_mul(x, y)),
                };
                let mut target = vec![vec![Rational::zero(); self.dim]; self.dim];
                for (k, c) in a.bracket(i, j) {
                    for (r, row) in target.iter_mut().enumerate() {
                        for (s, v) in row.iter_mut().enumerate() {
                            *v += &c * &self.matrices[k][r][s];
                        }
                    }
                }
                if comm != target {
                    return Err(HomologyError::NotAModule(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Strictly increasing index sets of size `p` from `0..n`, lexicographic.
pub fn wedge_basis(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, p, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, 0, &mut Vec::new(), &mut out);
    out
}

/// Sort an index list with the permutation sign; `None` on a repeat.
pub fn normalize_wedge(indices: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((sign, v))
    }
}

fn sign_rat(s: i64) -> Rational {
    if s % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Matrix of `a(x_1⊗…⊗x_p) = (1/p!) Σ_σ sgn σ x_{σ1}⊗…⊗x_{σp}` on `g^{⊗p}`.
pub fn antisymmetrization(n: usize, p: usize) -> SparseMatrix {
    let size = n.pow(p as u32);
    let perms = permutations(p);
    let fact = Rational::from_integer((1..=p as i64).product::<i64>().into());
    let mut trip = Vec::new();
    for col in 0..size {
        let digits = to_digits(col, n, p);
        for perm in &perms {
            let (sign, _) = normalize_wedge(perm).expect("permutation has no repeats");
            let permuted: Vec<usize> = perm.iter().map(|&k| digits[k]).collect();
            let row = permuted.iter().fold(0, |acc, &d| acc * n + d);
            trip.push((row, col, Rational::from_integer(sign.into()) / &fact));
        }
    }
    SparseMatrix::from_triplets(size, size, trip)
}

fn to_digits(mut x: usize, n: usize, p: usize) -> Vec<usize> {
    let mut d = vec![0; p];
    for k in (0..p).rev() {
        d[k] = x % n;
        x /= n;
    }
    d
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(p - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, p - 1);
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `maps[n] : C_{n+1} → C_n`.
    Chain,
    /// `maps[n] : C^n → C^{n+1}`.
    Cochain,
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub orientation: Orientation,
    pub dims: Vec<usize>,
    pub maps: Vec<SparseMatrix>,
    /// For chain complexes, `ε : C_0 → C_{-1}`.
    pub augmentation: Option<SparseMatrix>,
}

impl ChainComplex {
    /// Every consecutive composite, including the augmentation.
    pub fn composites_vanish(&self) -> Result<(), HomologyError> {
        for n in 0..self.maps.len().saturating_sub(1) {
            let comp = match self.orientation {
                Orientation::Chain => self.maps[n].mul(&self.maps[n + 1]),
                Orientation::Cochain => self.maps[n + 1].mul(&self.maps[n]),
            };
            if !comp.is_zero() {
                return Err(HomologyError::NonzeroComposite(n as i64));
            }
        }
        if let (Some(eps), Some(d0)) = (&self.augmentation, self.maps.first()) {
            if !eps.mul(d0).is_zero() {
                return Err(HomologyError::NonzeroComposite(-1));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

/// Betti numbers indexed from `start` (−1 for augmented complexes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub start: i32,
    pub betti: Vec<usize>,
}

impl BettiTable {
    pub fn at(&self, degree: i32) -> usize {
        usize::try_from(degree - self.start).ok().and_then(|i| self.betti.get(i).copied()).unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if (i as i32 + self.start).rem_euclid(2) == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.betti.iter().all(|&b| b == 0)
    }

    pub fn reversed(&self) -> Vec<usize> {
        self.betti.iter().rev().copied().collect()
    }
}

pub fn homology_dims(c: &ChainComplex) -> Result<BettiTable, HomologyError> {
    c.composites_vanish()?;
    let ranks: Vec<usize> = c.maps.iter().map(SparseMatrix::rank).collect();
    let rank = |n: i64| -> usize { usize::try_from(n).ok().and_then(|i| ranks.get(i).copied()).unwrap_or(0) };
    let len = c.dims.len();
    let mut betti: Vec<usize> = (0..len)
        .map(|p| {
            let p = p as i64;
            // chain: out-map d_{p-1}, in-map d_p; cochain: out-map d^p, in-map d^{p-1}
            c.dims[p as usize] - rank(p - 1) - rank(p)
        })
        .collect();
    match (&c.augmentation, c.orientation) {
        (Some(eps), Orientation::Chain) => {
            let r = eps.rank();
            betti[0] -= r;
            let mut out = vec![eps.rows() - r];
            out.extend(betti);
            Ok(BettiTable { start: -1, betti: out })
        }
        _ => Ok(BettiTable { start: 0, betti }),
    }
}

struct WedgeIndex {
    bases: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl WedgeIndex {
    fn new(n: usize) -> Self {
        let bases: Vec<Vec<Vec<usize>>> = (0..=n).map(|p| wedge_basis(n, p)).collect();
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        WedgeIndex { bases, index }
    }
}

/// `d_n(m ⊗ X_1∧…∧X_{n+1}) = Σ_i (-1)^{i-1} m·X_i ⊗ …X̂_i…
///   + Σ_{i<j} (-1)^{i+j} m ⊗ [X_i,X_j] ∧ …X̂_i…X̂_j…`
/// with basis index `s·dim M + m` for `m ⊗ X_S`.
pub fn ce_chain_complex(a: &LieAlgebra, m: &ModuleAction) -> Result<ChainComplex, HomologyError> {
    if m.side != Side::Right {
        return Err(HomologyError::WrongSide("the chain complex"));
    }
    m.check(a)?;
    let n = a.dim();
    let dm = m.dim;
    let w = WedgeIndex::new(n);
    let dims: Vec<usize> = w.bases.iter().map(|b| b.len() * dm).collect();
    let mut maps = Vec::new();
    for deg in 0..n {
        let mut trip = Vec::new();
        for (si, s) in w.bases[deg + 1].iter().enumerate() {
            for col_m in 0..dm {
                let col = si * dm + col_m;
                for i in 0..s.len() {
                    let rest: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
                    let ri = w.index[deg][&rest];
                    let sg = sign_rat(i as i64);
                    for (row_m, row) in m.matrices[s[i]].iter().enumerate() {
                        let v = &row[col_m];
                        if !v.is_zero() {
                            trip.push((ri * dm + row_m, col, &sg * v));
                        }
                    }
                }
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        let rest: Vec<usize> =
                            s.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                        // 1-based (-1)^{i+j} equals 0-based (-1)^{i+j}
                        let sg = sign_rat((i + j) as i64);
                        for (k, c) in a.bracket(s[i], s[j]) {
                            let mut word = vec![k];
                            word.extend_from_slice(&rest);
                            if let Some((perm, sorted)) = normalize_wedge(&word) {
                                let ti = w.index[deg][&sorted];
                                trip.push((ti * dm + col_m, col, &sg * &c * Rational::from_integer(perm.into())));
                            }
                        }
                    }
                }
            }
        }
        maps.push(SparseMatrix::from_triplets(dims[deg], dims[deg + 1], trip));
    }
    Ok(ChainComplex { orientation: Orientation::Chain, dims, maps, augmentation: None })
}

/// `d^n f(X_1∧…∧X_{n+1}) = Σ_i (-1)^{i-1} X_i·f(…X̂_i…)
///   + Σ_{i<j} (-1)^{i+j} f([X_i,X_j] ∧ …X̂_i…X̂_j…)`
/// with basis index `s·dim M + m` for the cochain `X_S ↦ m`.
pub fn ce_cochain_complex(a: &LieAlgebra, m: &ModuleAction) -> Result<ChainComplex, HomologyError> {
    if m.side != Side::Left {
        return Err(HomologyError::WrongSide("the cochain complex"));
    }
    m.check(a)?;
    let n = a.dim();
    let dm = m.dim;
    let w = WedgeIndex::new(n);
    let dims: Vec<usize> = w.bases.iter().map(|b| b.len() * dm).collect();
    let mut maps = Vec::new();
    for deg in 0..n {
        let mut trip = Vec::new();
        for (ti, t) in w.bases[deg + 1].iter().enumerate() {
            for i in 0..t.len() {
                let rest: Vec<usize> = t.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
                let ri = w.index[deg][&rest];
                let sg = sign_rat(i as i64);
                for (row_m, row) in m.matrices[t[i]].iter().enumerate() {
                    for (col_m, v) in row.iter().enumerate() {
                        if !v.is_zero() {
                            trip.push((ti * dm + row_m, ri * dm + col_m, &sg * v));
                        }
                    }
                }
            }
            for i in 0..t.len() {
                for j in i + 1..t.len() {
                    let rest: Vec<usize> =
                        t.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                    let sg = sign_rat((i + j) as i64);
                    for (k, c) in a.bracket(t[i], t[j]) {
                        let mut word = vec![k];
                        word.extend_from_slice(&rest);
                        if let Some((perm, sorted)) = normalize_wedge(&word) {
                            let si = w.index[deg][&sorted];
                            let f = &sg * &c * Rational::from_integer(perm.into());
                            for mm in 0..dm {
                                trip.push((ti * dm + mm, si * dm + mm, f.clone()));
                            }
                        }
                    }
                }
            }
        }
        maps.push(SparseMatrix::from_triplets(dims[deg + 1], dims[deg], trip));
    }
    Ok(ChainComplex { orientation: Orientation::Cochain, dims, maps, augmentation: None })
}

pub fn lie_homology(a: &LieAlgebra, m: &ModuleAction) -> Result<BettiTable, HomologyError> {
    homology_dims(&ce_chain_complex(a, m)?)
}

pub fn lie_cohomology(a: &LieAlgebra, m: &ModuleAction) -> Result<BettiTable, HomologyError> {
    homology_dims(&ce_cochain_complex(a, m)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareReport {
    pub nilpotent: bool,
    /// Whether `g` acts on `Λ^N g` trivially (all `tr ad` vanish).
    pub unimodular: bool,
    pub cohomology: Vec<usize>,
    /// `H_{N-p}(g, M ⊗ (Λ^N g)^*)`, listed for `p = 0..N`.
    pub twisted_homology_reversed: Vec<usize>,
}

impl PoincareReport {
    pub fn holds(&self) -> bool {
        self.cohomology == self.twisted_homology_reversed
    }
}

/// Compares `H^p(g, M)` with `H_{N-p}(g, M ⊗ (Λ^N g)^*)` for a left module
/// `M`; the twist is trivial when every `ad X` is traceless, in particular
/// for nilpotent `g`.
pub fn poincare_duality_check(a: &LieAlgebra, m: &ModuleAction) -> Result<PoincareReport, HomologyError> {
    if m.side != Side::Left {
        return Err(HomologyError::WrongSide("the duality check"));
    }
    let n = a.dim();
    let traces: Vec<Rational> = (0..n).map(|i| trace(&a.ad(i))).collect();
    // X acts on (Λ^N g)^* by -tr ad X; as a right module m·X = -X·m + tr(ad X) m
    let twisted = ModuleAction {
        dim: m.dim,
        side: Side::Right,
        matrices: (0..n)
            .map(|i| {
                let mut r: Matrix = m.matrices[i].iter().map(|row| row.iter().map(|x| -x.clone()).collect()).collect();
                for (d, row) in r.iter_mut().enumerate() {
                    row[d] += &traces[i];
                }
                r
            })
            .collect(),
    };
    let cohomology = lie_cohomology(a, m)?.betti;
    let homology = lie_homology(a, &twisted)?;
    Ok(PoincareReport {
        nilpotent: is_nilpotent(a),
        unimodular: traces.iter().all(Zero::is_zero),
        cohomology,
        twisted_homology_reversed: homology.reversed(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulCertificate {
    pub cutoff: u64,
    /// Dimensions of the truncated `C_n(g, U)`, `n = 0..N`.
    pub dims: Vec<usize>,
    /// Homology of the augmented complex from degree −1 upward.
    pub homology: BettiTable,
    /// Every differential entry preserves total weight.
    pub weight_preserving: bool,
    /// No differential entry lowers total weight.
    pub weight_nondecreasing: bool,
}

impl KoszulCertificate {
    pub fn exact(&self) -> bool {
        self.homology.is_zero()
    }
}

/// The augmented complex `C ← C_·(g, U(g))` truncated to basis elements
/// `e^α ⊗ X_S` of total weight `w(α) + Σ_{i∈S} w_i ≤ W`. Weight never drops
/// under `d`, so the truncation is a quotient complex.
pub fn koszul_quotient_complex(
    a: &LieAlgebra,
    weights: &WeightStructure,
    cutoff: u64,
) -> Result<(ChainComplex, Vec<Vec<u64>>), HomologyError> {
    let ctx = TruncationContext::new(a, weights, cutoff)?;
    let n = a.dim();
    let wts = &weights.weights;
    let w = WedgeIndex::new(n);
    let mono = ctx.basis();
    // per degree: list of (monomial, subset) with total weight ≤ W
    let mut cells: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut cell_index: Vec<HashMap<(usize, usize), usize>> = Vec::new();
    let mut cell_weights: Vec<Vec<u64>> = Vec::new();
    for p in 0..=n {
        let mut list = Vec::new();
        let mut ws = Vec::new();
        for (si, s) in w.bases[p].iter().enumerate() {
            let sw: u64 = s.iter().map(|&i| u64::from(wts[i])).sum();
            for (mi, alpha) in mono.iter().enumerate() {
                let tw = weight_of(alpha, wts) + sw;
                if tw <= cutoff {
                    list.push((mi, si));
                    ws.push(tw);
                }
            }
        }
        cell_index.push(list.iter().enumerate().map(|(i, c)| (*c, i)).collect());
        cells.push(list);
        cell_weights.push(ws);
    }
    let mono_index: HashMap<&MultiIndex, usize> = mono.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let dims: Vec<usize> = cells.iter().map(Vec::len).collect();
    let mut maps = Vec::new();
    for deg in 0..n {
        let mut trip = Vec::new();
        for (col, &(mi, si)) in cells[deg + 1].iter().enumerate() {
            let s = &w.bases[deg + 1][si];
            for i in 0..s.len() {
                let rest: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
                let ri = w.index[deg][&rest];
                let sg = sign_rat(i as i64);
                for (gamma, c) in ctx.engine().mul_generator(&mono[mi], s[i]).iter() {
                    if let Some(&row) = mono_index.get(gamma).and_then(|g| cell_index[deg].get(&(*g, ri))) {
                        trip.push((row, col, &sg * c));
                    }
                }
            }
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    let rest: Vec<usize> =
                        s.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                    let sg = sign_rat((i + j) as i64);
                    for (k, c) in a.bracket(s[i], s[j]) {
                        let mut word = vec![k];
                        word.extend_from_slice(&rest);
                        if let Some((perm, sorted)) = normalize_wedge(&word) {
                            let ti = w.index[deg][&sorted];
                            if let Some(&row) = cell_index[deg].get(&(mi, ti)) {
                                trip.push((row, col, &sg * &c * Rational::from_integer(perm.into())));
                            }
                        }
                    }
                }
            }
        }
        maps.push(SparseMatrix::from_triplets(dims[deg], dims[deg + 1], trip));
    }
    let unit = cell_index[0][&(0, 0)];
    let augmentation = SparseMatrix::from_triplets(1, dims[0], [(0, unit, Rational::one())]);
    let complex = ChainComplex { orientation: Orientation::Chain, dims, maps, augmentation: Some(augmentation) };
    Ok((complex, cell_weights))
}

pub fn koszul_quotient_exactness(a: &LieAlgebra, weights: &WeightStructure, cutoff: u64) -> Result<KoszulCertificate, HomologyError> {
    let (complex, cell_weights) = koszul_quotient_complex(a, weights, cutoff)?;
    let mut preserving = true;
    let mut nondecreasing = true;
    for (deg, map) in complex.maps.iter().enumerate() {
        for (row, col, _) in map.triplets() {
            let (from, to) = (cell_weights[deg + 1][col], cell_weights[deg][row]);
            preserving &= from == to;
            nondecreasing &= to >= from;
        }
    }
    let homology = homology_dims(&complex)?;
    Ok(KoszulCertificate {
        cutoff,
        dims: complex.dims.clone(),
        homology,
        weight_preserving: preserving,
        weight_nondecreasing: nondecreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::SparseMatrix;
    use crate::rat;

    #[test]
    fn heisenberg_trivial_chain_complex() {
        let h3 = corpus::heisenberg3();
        let c = ce_chain_complex(&h3, &ModuleAction::trivial(&h3, Side::Right)).unwrap();
        assert_eq!(c.dims, vec![1, 3, 3, 1]);
        assert!(c.maps[0].is_zero());
        // d_1(X1∧X2) = -[X1,X2] = -X3; Λ² basis (12),(13),(23)
        assert_eq!(c.maps[1].nnz(), 1);
        assert_eq!(c.maps[1].get(2, 0), rat(-1));
        assert!(c.maps[2].is_zero());
    }

    #[test]
    fn sl2_chain_block() {
        let sl2 = corpus::sl2();
        let c = ce_chain_complex(&sl2, &ModuleAction::trivial(&sl2, Side::Right)).unwrap();
        // d_1(h∧e) = -[h,e] = -2e
        assert_eq!(c.maps[1].get(1, 0), rat(-2));
        assert_eq!(c.maps[1].rank(), 3);
    }

    #[test]
    fn trivial_cochain_formula() {
        let h3 = corpus::heisenberg3();
        let c = ce_cochain_complex(&h3, &ModuleAction::trivial(&h3, Side::Left)).unwrap();
        assert!(c.maps[0].is_zero());
        // d^1 f(X1∧X2) = -f([X1,X2]) = -f(X3)
        assert_eq!(c.maps[1].get(0, 2), rat(-1));
    }

    #[test]
    fn betti_tables() {
        let h3 = corpus::heisenberg3();
        assert_eq!(lie_cohomology(&h3, &ModuleAction::trivial(&h3, Side::Left)).unwrap().betti, vec![1, 2, 2, 1]);
        let sl2 = corpus::sl2();
        assert_eq!(lie_cohomology(&sl2, &ModuleAction::trivial(&sl2, Side::Left)).unwrap().betti, vec![1, 0, 0, 1]);
        let ab = LieAlgebra::abelian(4);
        assert_eq!(lie_homology(&ab, &ModuleAction::trivial(&ab, Side::Right)).unwrap().betti, vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn adjoint_cohomology_of_sl2_vanishes() {
        let sl2 = corpus::sl2();
        let b = lie_cohomology(&sl2, &ModuleAction::adjoint(&sl2)).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn dual_cochain_is_transpose() {
        let h3 = corpus::heisenberg3();
        let right = ModuleAction::adjoint(&h3).opposite();
        let chain = ce_chain_complex(&h3, &right).unwrap();
        let cochain = ce_cochain_complex(&h3, &right.dual()).unwrap();
        for (d, dt) in chain.maps.iter().zip(&cochain.maps) {
            assert_eq!(&d.transpose(), dt);
        }
    }

    #[test]
    fn bad_module_rejected() {
        let h3 = corpus::heisenberg3();
        let mut m = ModuleAction::trivial(&h3, Side::Left);
        m.matrices[0][0][0] = rat(1);
        m.matrices[1][0][0] = rat(1);
        m.matrices[2][0][0] = rat(1);
        assert!(matches!(lie_cohomology(&h3, &m), Err(HomologyError::NotAModule(..))));
    }

    #[test]
    fn nonzero_composite_rejected() {
        let d = SparseMatrix::identity(1);
        let c = ChainComplex {
            orientation: Orientation::Chain,
            dims: vec![1, 1, 1],
            maps: vec![d.clone(), d],
            augmentation: None,
        };
        assert_eq!(homology_dims(&c).unwrap_err(), HomologyError::NonzeroComposite(0));
    }

    #[test]
    fn poincare_on_solvable2() {
        // not unimodular: tr ad X = 1, so the twist matters
        let s = corpus::solvable2();
        let r = poincare_duality_check(&s, &ModuleAction::trivial(&s, Side::Left)).unwrap();
        assert!(!r.unimodular);
        assert_eq!(r.cohomology, vec![1, 1, 0]);
        assert!(r.holds());
    }

    #[test]
    fn antisymmetrizer_is_a_projector() {
        for (n, p) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let a = antisymmetrization(n, p);
            assert_eq!(a.mul(&a), a);
            // its rank is dim Λ^p
            assert_eq!(a.rank(), wedge_basis(n, p).len());
        }
    }

    #[test]
    fn koszul_small() {
        let ab = corpus::abelian(1);
        let c = koszul_quotient_exactness(&ab, &WeightStructure::grading(vec![1]), 3).unwrap();
        assert!(c.exact());
        assert_eq!(c.dims, vec![4, 3]);
        let h3 = corpus::heisenberg3();
        let c = koszul_quotient_exactness(&h3, &WeightStructure::grading(vec![1, 1, 2]), 4).unwrap();
        assert!(c.exact() && c.weight_preserving);
    }
}

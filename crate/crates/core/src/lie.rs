//! Finite-dimensional Lie algebras over the rationals.
//!
//! Structure constants are stored densely as `c[i][j][k]` with
//! `[e_i, e_j] = Σ_k c[i][j][k] e_k`. Basis indices are 0-based in the API;
//! reports print them 1-based.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{determinant, identity_matrix, nullspace, Matrix, SparseVec, Subspace};
use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("a Lie algebra needs at least one basis vector")]
    EmptyBasis,
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("bracket [{0},{1}] of a basis vector with itself")]
    SelfBracket(usize, usize),
    #[error("bracket [{0},{1}] specified twice")]
    DuplicateBracket(usize, usize),
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("unsupported homotopy family: {0}")]
    UnsupportedFamily(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    labels: Vec<String>,
    constants: Vec<Rational>,
}

impl LieAlgebra {
    /// Build from brackets `[e_i, e_j] = Σ c_k e_k`; the `[e_j, e_i]` entries
    /// are filled in by antisymmetry. Pairs with `i > j` are accepted and
    /// flipped with a sign.
    pub fn new<I>(name: impl Into<String>, labels: Vec<String>, brackets: I) -> Result<Self, LieError>
    where
        I: IntoIterator<Item = (usize, usize, SparseVec)>,
    {
        let n = labels.len();
        if n == 0 {
            return Err(LieError::EmptyBasis);
        }
        let mut constants = vec![Rational::zero(); n * n * n];
        let mut seen = BTreeSet::new();
        for (i, j, terms) in brackets {
            for &idx in [i, j].iter().chain(terms.iter().map(|(k, _)| k)) {
                if idx >= n {
                    return Err(LieError::IndexOutOfRange { index: idx, dim: n });
                }
            }
            if i == j {
                return Err(LieError::SelfBracket(i, j));
            }
            let (a, b, sign) = if i < j { (i, j, Rational::one()) } else { (j, i, -Rational::one()) };
            if !seen.insert((a, b)) {
                return Err(LieError::DuplicateBracket(a, b));
            }
            for (k, c) in terms {
                let v = &sign * c;
                constants[(a * n + b) * n + k] += &v;
                constants[(b * n + a) * n + k] -= &v;
            }
        }
        Ok(LieAlgebra { name: name.into(), labels, constants })
    }

    /// Raw table `table[i][j][k]`, stored without antisymmetric completion.
    /// Used to feed deliberately broken data to [`validate_lie_algebra`].
    pub fn from_raw_constants(name: impl Into<String>, labels: Vec<String>, table: Vec<Vec<Vec<Rational>>>) -> Self {
        let n = labels.len();
        let mut constants = vec![Rational::zero(); n * n * n];
        for (i, row) in table.into_iter().enumerate() {
            for (j, col) in row.into_iter().enumerate() {
                for (k, c) in col.into_iter().enumerate() {
                    constants[(i * n + j) * n + k] = c;
                }
            }
        }
        LieAlgebra { name: name.into(), labels, constants }
    }

    pub fn abelian(n: usize) -> Self {
        let labels = default_labels(n);
        LieAlgebra::new(format!("abelian{n}"), labels, std::iter::empty()).expect("abelian algebra is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        let n = self.dim();
        &self.constants[(i * n + j) * n + k]
    }

    /// `[e_i, e_j]` as a sparse vector.
    pub fn bracket(&self, i: usize, j: usize) -> SparseVec {
        (0..self.dim())
            .filter_map(|k| {
                let c = self.constant(i, j, k);
                (!c.is_zero()).then(|| (k, c.clone()))
            })
            .collect()
    }

    /// Bracket of two dense coordinate vectors.
    pub fn bracket_vec(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let f = xi * yj;
                for (k, c) in self.bracket(i, j) {
                    out[k] += &f * c;
                }
            }
        }
        out
    }

    /// Nonzero constants with `i < j`, in lexicographic order of `(i, j, k)`.
    pub fn structure_terms(&self) -> Vec<(usize, usize, usize, Rational)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for (k, c) in self.bracket(i, j) {
                    out.push((i, j, k, c));
                }
            }
        }
        out
    }

    /// Matrix of `ad e_i` in the column convention `ad(e_i) e_j = Σ_k m[k][j] e_k`.
    pub fn ad(&self, i: usize) -> Matrix {
        let n = self.dim();
        (0..n)
            .map(|k| (0..n).map(|j| self.constant(i, j, k).clone()).collect())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.iter().all(Zero::is_zero)
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).collect()
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.name, self.dim())?;
        for (i, j, k, c) in self.structure_terms() {
            write!(f, "; [{},{}] += {} {}", self.labels[i], self.labels[j], c, self.labels[k])?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// `(i, j, k)` with `c[i][j][k] != -c[j][i][k]`, `i <= j`.
    pub antisymmetry: Vec<(usize, usize, usize)>,
    /// Triples `i < j < k` with a nonzero Jacobi sum.
    pub jacobi: Vec<(usize, usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.is_empty()
    }
}

pub fn validate_lie_algebra(a: &LieAlgebra) -> ValidationReport {
    let n = a.dim();
    let mut report = ValidationReport::default();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                if a.constant(i, j, k) != &-a.constant(j, i, k).clone() {
                    report.antisymmetry.push((i, j, k));
                }
            }
        }
    }
    let unit = |i: usize| {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        v
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ei, ej, ek) = (unit(i), unit(j), unit(k));
                let t1 = a.bracket_vec(&ei, &a.bracket_vec(&ej, &ek));
                let t2 = a.bracket_vec(&ej, &a.bracket_vec(&ek, &ei));
                let t3 = a.bracket_vec(&ek, &a.bracket_vec(&ei, &ej));
                if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                    report.jacobi.push((i, j, k));
                }
            }
        }
    }
    report
}

/// A descending chain of ideals, ending at zero or at a stable term.
#[derive(Clone, Debug)]
pub struct Series {
    pub terms: Vec<Subspace>,
}

impl Series {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }

    pub fn reaches_zero(&self) -> bool {
        self.terms.last().is_some_and(|t| t.dim() == 0)
    }
}

fn bracket_span(a: &LieAlgebra, left: &Subspace, right: &Subspace) -> Subspace {
    let mut vectors = Vec::new();
    for x in left.basis() {
        for y in right.basis() {
            let v = a.bracket_vec(x, y);
            if v.iter().any(|c| !c.is_zero()) {
                vectors.push(v);
            }
        }
    }
    Subspace::span(a.dim(), &vectors)
}

fn descend(a: &LieAlgebra, step: impl Fn(&Subspace) -> Subspace) -> Series {
    let mut terms = vec![Subspace::full(a.dim())];
    loop {
        let last = terms.last().expect("series is never empty");
        let next = step(last);
        let stop = next.dim() == 0 || next.dim() == last.dim();
        terms.push(next);
        if stop {
            break;
        }
    }
    Series { terms }
}

/// `g_1 = g`, `g_{n+1} = [g, g_n]`.
pub fn lower_central_series(a: &LieAlgebra) -> Series {
    let full = Subspace::full(a.dim());
    descend(a, |last| bracket_span(a, &full, last))
}

/// `g^(0) = g`, `g^(n+1) = [g^(n), g^(n)]`.
pub fn derived_series(a: &LieAlgebra) -> Series {
    descend(a, |last| bracket_span(a, last, last))
}

pub fn is_nilpotent(a: &LieAlgebra) -> bool {
    lower_central_series(a).reaches_zero()
}

pub fn is_solvable(a: &LieAlgebra) -> bool {
    derived_series(a).reaches_zero()
}

/// Stable flatness of the algebra of analytic functionals over `U(g)` holds
/// exactly when `g` is solvable; this predicate is that criterion.
pub fn analytic_functionals_stably_flat(a: &LieAlgebra) -> bool {
    is_solvable(a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingForm {
    pub matrix: Matrix,
    pub nondegenerate: bool,
}

impl KillingForm {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Zero::is_zero)
    }
}

/// `B(e_i, e_j) = tr(ad e_i ∘ ad e_j)`.
pub fn killing_form(a: &LieAlgebra) -> KillingForm {
    let n = a.dim();
    let ads: Vec<Matrix> = (0..n).map(|i| a.ad(i)).collect();
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // tr(AB) = Σ_{p,q} A[p][q] B[q][p]
            let mut t = Rational::zero();
            for p in 0..n {
                for q in 0..n {
                    if !ads[i][p][q].is_zero() && !ads[j][q][p].is_zero() {
                        t += &ads[i][p][q] * &ads[j][q][p];
                    }
                }
            }
            matrix[i][j] = t;
        }
    }
    let nondegenerate = !determinant(&matrix).is_zero();
    KillingForm { matrix, nondegenerate }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Grading,
    Filtration,
}

/// Positive integer weights on the basis, read either as a grading
/// (`[g_i, g_j] = g_{i+j}` exactly) or a filtration (`⊆ g_{≥ i+j}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightStructure {
    pub kind: WeightKind,
    pub weights: Vec<u32>,
}

impl WeightStructure {
    pub fn grading(weights: Vec<u32>) -> Self {
        WeightStructure { kind: WeightKind::Grading, weights }
    }

    pub fn filtration(weights: Vec<u32>) -> Self {
        WeightStructure { kind: WeightKind::Filtration, weights }
    }

    pub fn max_weight(&self) -> u32 {
        self.weights.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coefficient: String,
    pub target_weight: u32,
    pub source_weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub kind: WeightKind,
    pub length_matches: bool,
    pub positive: bool,
    pub nondecreasing: bool,
    pub violations: Vec<WeightViolation>,
    /// For filtrations of a nilpotent algebra: whether the weights are the
    /// ones induced by the lower central series (the F-basis condition).
    pub matches_lower_central_series: Option<bool>,
}

impl WeightReport {
    pub fn is_valid(&self) -> bool {
        self.length_matches && self.positive && self.nondecreasing && self.violations.is_empty()
    }
}

pub fn verify_weight_structure(a: &LieAlgebra, w: &WeightStructure) -> WeightReport {
    let length_matches = w.weights.len() == a.dim();
    let positive = w.weights.iter().all(|&x| x > 0);
    let nondecreasing = w.weights.windows(2).all(|p| p[0] <= p[1]);
    let mut violations = Vec::new();
    if length_matches {
        for (i, j, k, c) in a.structure_terms() {
            let source = w.weights[i] + w.weights[j];
            let target = w.weights[k];
            let ok = match w.kind {
                WeightKind::Grading => target == source,
                WeightKind::Filtration => target >= source,
            };
            if !ok {
                violations.push(WeightViolation {
                    i,
                    j,
                    k,
                    coefficient: c.to_string(),
                    target_weight: target,
                    source_weight: source,
                });
            }
        }
    }
    let matches_lower_central_series = match w.kind {
        WeightKind::Filtration if length_matches && is_nilpotent(a) => {
            Some(lower_central_weights(a).is_some_and(|l| l == w.weights))
        }
        _ => None,
    };
    WeightReport {
        kind: w.kind,
        length_matches,
        positive,
        nondecreasing,
        violations,
        matches_lower_central_series,
    }
}

/// Weights `w_i = max{n : e_i ∈ g_n}` from the lower central series, provided
/// the basis is adapted to it (`g_n = span{e_i : w_i ≥ n}` for every `n`) and
/// ordered by weight. `None` for non-nilpotent algebras or unadapted bases.
pub fn lower_central_weights(a: &LieAlgebra) -> Option<Vec<u32>> {
    let series = lower_central_series(a);
    if !series.reaches_zero() {
        return None;
    }
    let n = a.dim();
    let weights: Vec<u32> = (0..n)
        .map(|i| {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            series.terms.iter().take_while(|t| t.contains(&e)).count() as u32
        })
        .collect();
    for (level, term) in series.terms.iter().enumerate() {
        let count = weights.iter().filter(|&&w| w as usize > level).count();
        if count != term.dim() {
            return None;
        }
    }
    weights.windows(2).all(|p| p[0] <= p[1]).then_some(weights)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndomorphismCheck {
    pub is_homomorphism: bool,
    /// Pairs `i < j` where `h[e_i, e_j] != [h e_i, h e_j]`.
    pub violations: Vec<(usize, usize)>,
}

/// Checks `h[e_i,e_j] = [h e_i, h e_j]` where column `j` of `h` is `h(e_j)`.
pub fn verify_endomorphism(a: &LieAlgebra, h: &Matrix) -> Result<EndomorphismCheck, LieError> {
    let n = a.dim();
    if h.len() != n || h.iter().any(|r| r.len() != n) {
        return Err(LieError::ShapeMismatch { expected: n * n, got: h.iter().map(Vec::len).sum() });
    }
    let column = |j: usize| -> Vec<Rational> { h.iter().map(|row| row[j].clone()).collect() };
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut lhs = vec![Rational::zero(); n];
            for (k, c) in a.bracket(i, j) {
                for (r, row) in h.iter().enumerate() {
                    lhs[r] += &c * &row[k];
                }
            }
            let rhs = a.bracket_vec(&column(i), &column(j));
            if lhs != rhs {
                violations.push((i, j));
            }
        }
    }
    Ok(EndomorphismCheck { is_homomorphism: violations.is_empty(), violations })
}

pub fn diagonal_matrix(d: &[Rational]) -> Matrix {
    let mut m = identity_matrix(d.len());
    for (i, v) in d.iter().enumerate() {
        m[i][i] = v.clone();
    }
    m
}

/// A monomial identity between parameters, `Π p^lhs = Π p^rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialRelation {
    pub lhs: Vec<i64>,
    pub rhs: Vec<i64>,
    /// The bracket `[e_i, e_j] ∋ e_k` that produced it.
    pub source: (usize, usize, usize),
}

/// Solution set of `h = diag(d_1..d_N)` being a Lie endomorphism.
///
/// Each `d_k` is either a free parameter or a monomial in the parameters.
/// Residual relations between parameters that are known to be nonzero form a
/// lattice in `Z^p`; the torus solutions are `Hom(Z^p / L, C^*)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalSolution {
    pub parameters: Vec<usize>,
    pub nonzero_parameters: Vec<usize>,
    /// `expressions[k][p]` is the exponent of parameter `p` in `d_k`.
    pub expressions: Vec<Vec<i64>>,
    pub relations: Vec<MonomialRelation>,
    /// Relations involving a parameter that may vanish; these are not solved.
    pub conditional: Vec<MonomialRelation>,
    pub lattice_rank: usize,
    /// Index of the relation lattice when it has full rank: the number of
    /// torus solutions.
    pub lattice_index: Option<u64>,
    /// Under the nonzero side condition, the identity is the only solution.
    pub rigid: bool,
}

impl DiagonalSolution {
    pub fn describe(&self, labels: &[String]) -> String {
        let mut parts = Vec::new();
        for (k, e) in self.expressions.iter().enumerate() {
            if let Some(p) = self.parameters.iter().position(|&q| q == k) {
                if e.iter().enumerate().all(|(i, &x)| x == i64::from(i == p)) {
                    parts.push(format!("d({}) free", labels[k]));
                    continue;
                }
            }
            parts.push(format!("d({}) = {}", labels[k], monomial_string(e, &self.parameters, labels)));
        }
        for r in &self.relations {
            parts.push(format!(
                "{} = {}",
                monomial_string(&r.lhs, &self.parameters, labels),
                monomial_string(&r.rhs, &self.parameters, labels)
            ));
        }
        parts.join("; ")
    }
}

fn monomial_string(e: &[i64], params: &[usize], labels: &[String]) -> String {
    let factors: Vec<String> = e
        .iter()
        .zip(params)
        .filter(|(x, _)| **x != 0)
        .map(|(&x, &p)| if x == 1 { format!("d({})", labels[p]) } else { format!("d({})^{x}", labels[p]) })
        .collect();
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

/// Solve for diagonal Lie endomorphisms under the side condition that the
/// entries listed in `nonzero` do not vanish.
pub fn diagonal_endomorphism_solve(a: &LieAlgebra, nonzero: &[usize]) -> DiagonalSolution {
    let n = a.dim();
    let terms = a.structure_terms();
    let mut parameters = Vec::new();
    // exponents over the variables d_0..d_{n-1}; re-indexed to parameters below
    let mut expr: Vec<Option<Vec<i64>>> = vec![None; n];
    let mut used = vec![false; terms.len()];
    for k in 0..n {
        let defining = terms.iter().position(|&(i, j, kk, _)| kk == k && i < k && j < k);
        match defining {
            Some(t) => {
                used[t] = true;
                let (i, j, _, _) = terms[t];
                let ei = expr[i].clone().expect("earlier variables are expressed");
                let ej = expr[j].clone().expect("earlier variables are expressed");
                expr[k] = Some(ei.iter().zip(&ej).map(|(x, y)| x + y).collect());
            }
            None => {
                let mut e = vec![0i64; n];
                e[k] = 1;
                expr[k] = Some(e);
                parameters.push(k);
            }
        }
    }
    let full: Vec<Vec<i64>> = expr.into_iter().map(|e| e.expect("all variables expressed")).collect();
    let expressions: Vec<Vec<i64>> = full.iter().map(|e| parameters.iter().map(|&p| e[p]).collect()).collect();

    let mut nonzero_parameters: BTreeSet<usize> = BTreeSet::new();
    for &v in nonzero {
        if v < n {
            for (pi, &x) in expressions[v].iter().enumerate() {
                if x > 0 {
                    nonzero_parameters.insert(pi);
                }
            }
        }
    }

    let mut relations = Vec::new();
    let mut conditional = Vec::new();
    for (t, &(i, j, k, _)) in terms.iter().enumerate() {
        if used[t] {
            continue;
        }
        let lhs = expressions[k].clone();
        let rhs: Vec<i64> = expressions[i].iter().zip(&expressions[j]).map(|(x, y)| x + y).collect();
        if lhs == rhs {
            continue;
        }
        let rel = MonomialRelation { lhs, rhs, source: (i, j, k) };
        let involved = (0..parameters.len()).any(|p| (rel.lhs[p] != 0 || rel.rhs[p] != 0) && !nonzero_parameters.contains(&p));
        if involved {
            conditional.push(rel);
        } else {
            relations.push(rel);
        }
    }

    let lattice: Vec<Vec<i128>> = relations
        .iter()
        .map(|r| r.lhs.iter().zip(&r.rhs).map(|(x, y)| i128::from(x - y)).collect())
        .collect();
    let (lattice_rank, pivots) = hermite_pivots(lattice, parameters.len());
    let lattice_index = (lattice_rank == parameters.len())
        .then(|| pivots.iter().map(|p| p.unsigned_abs()).product::<u128>())
        .and_then(|x| u64::try_from(x).ok());
    let rigid = conditional.is_empty() && nonzero_parameters.len() == parameters.len() && lattice_index == Some(1);

    DiagonalSolution {
        parameters,
        nonzero_parameters: nonzero_parameters.into_iter().collect(),
        expressions,
        relations,
        conditional,
        lattice_rank,
        lattice_index,
        rigid,
    }
}

/// Integer row echelon form by Euclidean row operations; returns the rank
/// and the pivot entries (whose product is the lattice index at full rank).
fn hermite_pivots(mut rows: Vec<Vec<i128>>, cols: usize) -> (usize, Vec<i128>) {
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        loop {
            let nonzero: Vec<usize> = (r..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            let Some(&best) = nonzero.iter().min_by_key(|&&i| rows[i][c].abs()) else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c] != 0 {
                    let q = rows[i][c].div_euclid(rows[r][c]);
                    let pr = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= q * y;
                    }
                    if rows[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                pivots.push(rows[r][c]);
                r += 1;
                break;
            }
        }
        if r == rows.len() {
            break;
        }
    }
    (pivots.len(), pivots)
}

/// Scalar function of `t ∈ [0,1]` attached to one basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarFunction {
    /// `t^n`
    Power(u32),
    /// `f(scale·t + shift)` for a bump `f` with `f ≡ 0` on `(-∞,0]` and
    /// `f ≡ 1` on `[1,∞)`; nothing else about `f` is used.
    Bump { scale: Rational, shift: Rational },
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Power(0) => write!(f, "1"),
            ScalarFunction::Power(1) => write!(f, "t"),
            ScalarFunction::Power(n) => write!(f, "t^{n}"),
            ScalarFunction::Bump { scale, shift } => {
                let lin = if scale.is_one() { "t".to_string() } else { format!("{scale}t") };
                if shift.is_zero() {
                    write!(f, "f({lin})")
                } else if shift.is_negative() {
                    write!(f, "f({lin}-{})", -shift.clone())
                } else {
                    write!(f, "f({lin}+{shift})")
                }
            }
        }
    }
}

/// A diagonal family `h_t(e_i) = φ_i(t) e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyFamily {
    pub functions: Vec<ScalarFunction>,
}

impl HomotopyFamily {
    /// `h_t = t^{w_i}` on `e_i`.
    pub fn graded(weights: &[u32]) -> Self {
        HomotopyFamily { functions: weights.iter().map(|&w| ScalarFunction::Power(w)).collect() }
    }

    /// `h_t(e_i) = f(K t - s_i)` with `K = max s + 1`.
    pub fn staged_bump(stages: &[u32]) -> Self {
        let k = stages.iter().copied().max().map_or(1, |m| m + 1);
        HomotopyFamily {
            functions: stages
                .iter()
                .map(|&s| ScalarFunction::Bump { scale: Rational::from_integer(k.into()), shift: -Rational::from_integer(s.into()) })
                .collect(),
        }
    }

    /// Diagonal entries of `h_t`, when they are determined by the family's
    /// defining data (always for powers; for bumps only outside the ramp).
    pub fn evaluate(&self, t: &Rational) -> Option<Vec<Rational>> {
        self.functions
            .iter()
            .map(|f| match f {
                ScalarFunction::Power(n) => Some(num_traits::pow(t.clone(), *n as usize)),
                ScalarFunction::Bump { scale, shift } => {
                    let x = scale * t + shift;
                    if x <= Rational::zero() {
                        Some(Rational::zero())
                    } else if x >= Rational::one() {
                        Some(Rational::one())
                    } else {
                        None
                    }
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Monomial,
    Bump,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionCertificate {
    pub kind: FamilyKind,
    pub homomorphism: bool,
    pub starts_at_zero: bool,
    pub ends_at_identity: bool,
    /// Brackets `[e_i, e_j] ∋ e_k` where `φ_k ≠ φ_i φ_j`.
    pub violations: Vec<(usize, usize, usize)>,
    /// One identity per nonzero structure constant, e.g. `t^2 = t*t`.
    pub identities: Vec<String>,
}

impl ContractionCertificate {
    pub fn holds(&self) -> bool {
        self.homomorphism && self.starts_at_zero && self.ends_at_identity
    }
}

// value of one factor on an open subinterval: 0, 1, or an unresolved f(a t + b)
#[derive(Clone, Debug, PartialEq, Eq)]
enum Factor {
    Zero,
    Symbols(Vec<(Rational, Rational)>),
}

impl Factor {
    fn times(&self, other: &Factor) -> Factor {
        match (self, other) {
            (Factor::Symbols(a), Factor::Symbols(b)) => {
                let mut s: Vec<_> = a.iter().chain(b).cloned().collect();
                s.sort();
                Factor::Symbols(s)
            }
            _ => Factor::Zero,
        }
    }
}

pub fn verify_contraction_family(a: &LieAlgebra, family: &HomotopyFamily) -> Result<ContractionCertificate, LieError> {
    let n = a.dim();
    if family.functions.len() != n {
        return Err(LieError::ShapeMismatch { expected: n, got: family.functions.len() });
    }
    let powers: Option<Vec<u32>> = family
        .functions
        .iter()
        .map(|f| match f {
            ScalarFunction::Power(p) => Some(*p),
            ScalarFunction::Bump { .. } => None,
        })
        .collect();
    let labels = |f: &ScalarFunction| f.to_string();
    if let Some(powers) = powers {
        let mut violations = Vec::new();
        let mut identities = Vec::new();
        for (i, j, k, _) in a.structure_terms() {
            let holds = powers[k] == powers[i] + powers[j];
            identities.push(format!(
                "{} {} {}*{}",
                labels(&family.functions[k]),
                if holds { "=" } else { "!=" },
                labels(&family.functions[i]),
                labels(&family.functions[j])
            ));
            if !holds {
                violations.push((i, j, k));
            }
        }
        return Ok(ContractionCertificate {
            kind: FamilyKind::Monomial,
            homomorphism: violations.is_empty(),
            starts_at_zero: powers.iter().all(|&p| p >= 1),
            ends_at_identity: true,
            violations,
            identities,
        });
    }
    let mut affine = Vec::with_capacity(n);
    for f in &family.functions {
        match f {
            ScalarFunction::Bump { scale, shift } if scale.is_positive() => affine.push((scale.clone(), shift.clone())),
            ScalarFunction::Bump { .. } => {
                return Err(LieError::UnsupportedFamily("bump arguments must have positive slope".into()))
            }
            ScalarFunction::Power(_) => {
                return Err(LieError::UnsupportedFamily("cannot mix t^n entries with bump entries".into()))
            }
        }
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let mut cuts: Vec<Rational> = vec![zero.clone(), one.clone()];
    for (s, b) in &affine {
        for level in [&zero, &one] {
            let t = (level - b) / s;
            if t > zero && t < one {
                cuts.push(t);
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    let classify = |idx: usize, t: &Rational| -> Factor {
        let (s, b) = &affine[idx];
        let x = s * t + b;
        if x <= zero {
            Factor::Zero
        } else if x >= one {
            Factor::Symbols(Vec::new())
        } else {
            Factor::Symbols(vec![(s.clone(), b.clone())])
        }
    };
    let two = Rational::from_integer(2.into());
    let mut violations = Vec::new();
    let mut identities = Vec::new();
    for (i, j, k, _) in a.structure_terms() {
        let holds = cuts.windows(2).all(|w| {
            let mid = (&w[0] + &w[1]) / &two;
            classify(k, &mid) == classify(i, &mid).times(&classify(j, &mid))
        });
        identities.push(format!(
            "{} - {}*{} {} 0 on [0,1]",
            labels(&family.functions[k]),
            labels(&family.functions[i]),
            labels(&family.functions[j]),
            if holds { "==" } else { "!=" }
        ));
        if !holds {
            violations.push((i, j, k));
        }
    }
    Ok(ContractionCertificate {
        kind: FamilyKind::Bump,
        homomorphism: violations.is_empty(),
        starts_at_zero: affine.iter().all(|(_, b)| b <= &zero),
        ends_at_identity: affine.iter().all(|(s, b)| s + b >= one),
        violations,
        identities,
    })
}

/// A positive integer grading of the given basis, if one exists
/// (`w_k = w_i + w_j` whenever `c[i][j][k] ≠ 0`, all `w ≥ 1`).
///
/// Feasibility is decided exactly by Fourier–Motzkin elimination over the
/// solution space of the equalities.
pub fn positive_grading(a: &LieAlgebra) -> Option<Vec<u32>> {
    let n = a.dim();
    let eqs: Matrix = a
        .structure_terms()
        .iter()
        .map(|&(i, j, k, _)| {
            let mut row = vec![Rational::zero(); n];
            row[k] += Rational::one();
            row[i] -= Rational::one();
            row[j] -= Rational::one();
            row
        })
        .collect();
    let basis = if eqs.is_empty() { identity_matrix(n) } else { nullspace(&eqs, n) };
    let f = basis.len();
    if f == 0 {
        return None;
    }
    // x = Σ_p y_p basis[p]; constraints x_i ≥ 1.
    let system: Vec<(Vec<Rational>, Rational)> = (0..n)
        .map(|i| ((0..f).map(|p| basis[p][i].clone()).collect(), Rational::one()))
        .collect();
    let y = fourier_motzkin_point(system, f)?;
    let x: Vec<Rational> = (0..n)
        .map(|i| (0..f).fold(Rational::zero(), |acc, p| acc + &basis[p][i] * &y[p]))
        .collect();
    let lcm = x.iter().fold(num_bigint::BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    let ints: Vec<num_bigint::BigInt> = x.iter().map(|v| (v * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, v| num_integer::Integer::gcd(&acc, v));
    ints.iter().map(|v| u32::try_from(v / &g).ok()).collect()
}

/// A point of `{y : a·y ≥ b for each (a, b)}`, or `None` if empty.
fn fourier_motzkin_point(system: Vec<(Vec<Rational>, Rational)>, vars: usize) -> Option<Vec<Rational>> {
    let mut stages = vec![system];
    for v in (0..vars).rev() {
        let current = stages.last().expect("non-empty");
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (coef, b) in current {
            if coef[v].is_positive() {
                lower.push((coef.clone(), b.clone()));
            } else if coef[v].is_negative() {
                upper.push((coef.clone(), b.clone()));
            } else {
                rest.push((coef.clone(), b.clone()));
            }
        }
        for (cl, bl) in &lower {
            for (cu, bu) in &upper {
                // scale so the coefficients of v are +1 and -1, then add
                let sl = cl[v].clone();
                let su = -cu[v].clone();
                let coef: Vec<Rational> = cl.iter().zip(cu).map(|(x, y)| x / &sl + y / &su).collect();
                rest.push((coef, bl / &sl + bu / &su));
            }
        }
        stages.push(rest);
    }
    if stages.last().expect("non-empty").iter().any(|(_, b)| b.is_positive()) {
        return None;
    }
    let mut y = vec![Rational::zero(); vars];
    for v in 0..vars {
        // stage index vars - v holds constraints in y_0..=y_v (with higher ones eliminated)
        let constraints = &stages[vars - 1 - v];
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for (coef, b) in constraints {
            if coef[v].is_zero() {
                continue;
            }
            let partial = (0..v).fold(Rational::zero(), |acc, p| acc + &coef[p] * &y[p]);
            let bound = (b - partial) / &coef[v];
            if coef[v].is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| if bound > l { bound.clone() } else { l }));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| if bound < h { bound.clone() } else { h }));
            }
        }
        y[v] = lo.or(hi).unwrap_or_else(Rational::zero);
    }
    Some(y)
}

/// Stages `s_i` such that `h_t(e_i) = f(K t - s_i)` is a contracting family:
/// every nonzero `c[i][j][k]` needs `s_i ≠ s_j` and `s_k = max(s_i, s_j)`.
/// Returns the lexicographically smallest assignment, if any.
pub fn staged_bump_stages(a: &LieAlgebra) -> Option<Vec<u32>> {
    let n = a.dim();
    let terms: Vec<(usize, usize, usize)> = a.structure_terms().into_iter().map(|(i, j, k, _)| (i, j, k)).collect();
    let mut stages = vec![0u32; n];
    fn consistent(terms: &[(usize, usize, usize)], stages: &[u32], upto: usize) -> bool {
        terms.iter().all(|&(i, j, k)| {
            if i > upto || j > upto || k > upto {
                return true;
            }
            stages[i] != stages[j] && stages[k] == stages[i].max(stages[j])
        })
    }
    fn search(terms: &[(usize, usize, usize)], stages: &mut Vec<u32>, pos: usize) -> bool {
        let n = stages.len();
        if pos == n {
            return true;
        }
        for s in 0..n as u32 {
            stages[pos] = s;
            if consistent(terms, stages, pos) && search(terms, stages, pos + 1) {
                return true;
            }
        }
        false
    }
    search(&terms, &mut stages, 0).then_some(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::{rat, ratio};

    fn broken_jacobi() -> LieAlgebra {
        // [e1,e2]=e3, [e1,e3]=e2, [e2,e3]=e2
        LieAlgebra::new(
            "broken",
            default_labels(3),
            [(0, 1, vec![(2, rat(1))]), (0, 2, vec![(1, rat(1))]), (1, 2, vec![(1, rat(1))])],
        )
        .unwrap()
    }

    #[test]
    fn jacobi_violation_located() {
        // hand evaluation: [e1,[e2,e3]] = [e1,e2] = e3, the other two cyclic terms vanish
        let r = validate_lie_algebra(&broken_jacobi());
        assert!(r.antisymmetry.is_empty());
        assert_eq!(r.jacobi, vec![(0, 1, 2)]);
    }

    #[test]
    fn antisymmetry_violation_located() {
        let mut t = vec![vec![vec![rat(0); 2]; 2]; 2];
        t[0][1][1] = rat(1);
        let a = LieAlgebra::from_raw_constants("bad", default_labels(2), t);
        let r = validate_lie_algebra(&a);
        assert_eq!(r.antisymmetry, vec![(0, 1, 1)]);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(
            LieAlgebra::new("x", default_labels(2), [(0, 0, vec![])]).unwrap_err(),
            LieError::SelfBracket(0, 0)
        );
        assert_eq!(
            LieAlgebra::new("x", default_labels(2), [(0, 1, vec![(2, rat(1))])]).unwrap_err(),
            LieError::IndexOutOfRange { index: 2, dim: 2 }
        );
        assert_eq!(
            LieAlgebra::new("x", default_labels(2), [(0, 1, vec![]), (1, 0, vec![])]).unwrap_err(),
            LieError::DuplicateBracket(0, 1)
        );
        assert_eq!(LieAlgebra::new("x", vec![], []).unwrap_err(), LieError::EmptyBasis);
    }

    #[test]
    fn reversed_pair_is_flipped() {
        let a = LieAlgebra::new("x", default_labels(3), [(1, 0, vec![(2, rat(1))])]).unwrap();
        assert_eq!(a.constant(0, 1, 2), &rat(-1));
        assert_eq!(a.constant(1, 0, 2), &rat(1));
    }

    #[test]
    fn series_dimensions() {
        assert_eq!(lower_central_series(&corpus::heisenberg3()).dims(), vec![3, 1, 0]);
        assert_eq!(lower_central_series(&corpus::favre7()).dims(), vec![7, 5, 4, 3, 2, 1, 0]);
        assert_eq!(lower_central_series(&corpus::sl2()).dims(), vec![3, 3]);
        assert_eq!(derived_series(&corpus::solvable2()).dims(), vec![2, 1, 0]);
        assert_eq!(derived_series(&corpus::sl2()).dims(), vec![3, 3]);
        assert_eq!(derived_series(&LieAlgebra::abelian(4)).dims(), vec![4, 0]);
        assert!(!is_solvable(&corpus::sl2()));
    }

    #[test]
    fn killing_forms() {
        let b = killing_form(&corpus::sl2());
        // basis h, e, f
        assert_eq!(b.matrix[0][0], rat(8));
        assert_eq!(b.matrix[1][2], rat(4));
        assert_eq!(b.matrix[2][1], rat(4));
        assert_eq!(b.matrix[0][1], rat(0));
        assert_eq!(b.matrix[1][1], rat(0));
        assert!(b.nondegenerate);
        let h = killing_form(&corpus::heisenberg3());
        assert!(h.is_zero() && !h.nondegenerate);
        assert!(killing_form(&LieAlgebra::abelian(2)).is_zero());
    }

    #[test]
    fn weight_structures() {
        let h3 = corpus::heisenberg3();
        assert!(verify_weight_structure(&h3, &WeightStructure::grading(vec![1, 1, 2])).is_valid());
        let favre = corpus::favre7();
        let w = vec![1, 1, 2, 3, 4, 5, 6];
        let g = verify_weight_structure(&favre, &WeightStructure::grading(w.clone()));
        assert!(!g.is_valid());
        // [X2,X3] = -X6: 1 + 2 != 5
        assert!(g.violations.iter().any(|v| (v.i, v.j, v.k) == (1, 2, 5)));
        let f = verify_weight_structure(&favre, &WeightStructure::filtration(w.clone()));
        assert!(f.is_valid());
        assert_eq!(f.matches_lower_central_series, Some(true));
        assert_eq!(lower_central_weights(&favre), Some(w));
        for ws in [vec![1, 1, 1], vec![1, 2, 3], vec![5, 1, 1]] {
            let r = verify_weight_structure(&corpus::sl2(), &WeightStructure::filtration(ws));
            assert!(!r.violations.is_empty());
        }
    }

    #[test]
    fn grading_implies_filtration() {
        for (a, w) in [(corpus::heisenberg3(), vec![1, 1, 2]), (LieAlgebra::abelian(3), vec![1, 2, 3])] {
            assert!(verify_weight_structure(&a, &WeightStructure::grading(w.clone())).is_valid());
            assert!(verify_weight_structure(&a, &WeightStructure::filtration(w)).is_valid());
        }
    }

    #[test]
    fn endomorphisms() {
        let h3 = corpus::heisenberg3();
        assert!(verify_endomorphism(&h3, &identity_matrix(3)).unwrap().is_homomorphism);
        let good = diagonal_matrix(&[rat(2), rat(3), rat(6)]);
        assert!(verify_endomorphism(&h3, &good).unwrap().is_homomorphism);
        let bad = verify_endomorphism(&h3, &diagonal_matrix(&[rat(2), rat(3), rat(5)])).unwrap();
        assert_eq!(bad.violations, vec![(0, 1)]);
    }

    #[test]
    fn diagonal_solutions() {
        let favre = diagonal_endomorphism_solve(&corpus::favre7(), &[0, 1]);
        assert_eq!(favre.parameters, vec![0, 1]);
        assert_eq!(favre.expressions[6], vec![5, 1]);
        assert_eq!(favre.lattice_index, Some(1));
        assert!(favre.rigid);

        let h3 = diagonal_endomorphism_solve(&corpus::heisenberg3(), &[0, 1]);
        assert_eq!(h3.parameters, vec![0, 1]);
        assert_eq!(h3.expressions[2], vec![1, 1]);
        assert!(h3.relations.is_empty());
        assert!(!h3.rigid);

        let ab = diagonal_endomorphism_solve(&LieAlgebra::abelian(4), &[0, 1, 2, 3]);
        assert_eq!(ab.parameters.len(), 4);
        assert!(!ab.rigid);
    }

    #[test]
    fn favre_without_side_condition_is_not_rigid() {
        let s = diagonal_endomorphism_solve(&corpus::favre7(), &[0]);
        assert!(!s.rigid);
        assert!(!s.conditional.is_empty());
    }

    #[test]
    fn monomial_families() {
        let h3 = corpus::heisenberg3();
        let c = verify_contraction_family(&h3, &HomotopyFamily::graded(&[1, 1, 2])).unwrap();
        assert!(c.holds());
        assert_eq!(c.identities, vec!["t^2 = t*t".to_string()]);
        let bad = verify_contraction_family(&h3, &HomotopyFamily::graded(&[1, 1, 1])).unwrap();
        assert!(!bad.holds());
        assert_eq!(bad.violations, vec![(0, 1, 2)]);
        let constant = verify_contraction_family(&LieAlgebra::abelian(2), &HomotopyFamily::graded(&[0, 1])).unwrap();
        assert!(!constant.starts_at_zero);
    }

    #[test]
    fn bump_family_on_solvable2() {
        let fam = HomotopyFamily {
            functions: vec![
                ScalarFunction::Bump { scale: rat(2), shift: rat(0) },
                ScalarFunction::Bump { scale: rat(2), shift: rat(-1) },
            ],
        };
        let c = verify_contraction_family(&corpus::solvable2(), &fam).unwrap();
        assert!(c.holds(), "{c:?}");
        assert_eq!(HomotopyFamily::staged_bump(&[0, 1]), fam);
        // the swapped family fails: f(2t) = f(2t-1) f(2t) is false for t < 1/2
        let swapped = HomotopyFamily::staged_bump(&[1, 0]);
        assert!(!verify_contraction_family(&corpus::solvable2(), &swapped).unwrap().holds());
    }

    #[test]
    fn mixed_family_rejected() {
        let fam = HomotopyFamily {
            functions: vec![ScalarFunction::Power(1), ScalarFunction::Bump { scale: rat(1), shift: rat(0) }],
        };
        assert!(matches!(
            verify_contraction_family(&corpus::solvable2(), &fam),
            Err(LieError::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn family_evaluation_agrees_with_endomorphism_check() {
        let h3 = corpus::heisenberg3();
        for weights in [[1u32, 1, 2], [1, 1, 1], [2, 1, 3]] {
            let fam = HomotopyFamily::graded(&weights);
            let cert = verify_contraction_family(&h3, &fam).unwrap();
            for t in [ratio(1, 3), ratio(2, 5), ratio(7, 9)] {
                let d = fam.evaluate(&t).unwrap();
                let e = verify_endomorphism(&h3, &diagonal_matrix(&d)).unwrap();
                assert_eq!(e.is_homomorphism, cert.homomorphism);
            }
        }
    }

    #[test]
    fn grading_search() {
        assert_eq!(positive_grading(&corpus::heisenberg3()), Some(vec![1, 1, 2]));
        assert_eq!(positive_grading(&LieAlgebra::abelian(2)), Some(vec![1, 1]));
        assert_eq!(positive_grading(&corpus::sl2()), None);
        assert_eq!(positive_grading(&corpus::favre7()), None);
        assert_eq!(positive_grading(&corpus::solvable2()), None);
    }

    #[test]
    fn bump_stage_search() {
        assert_eq!(staged_bump_stages(&corpus::solvable2()), Some(vec![0, 1]));
        assert_eq!(staged_bump_stages(&corpus::sl2()), None);
        assert_eq!(staged_bump_stages(&corpus::favre7()), None);
    }

    #[test]
    fn stably_flat_predicate() {
        assert!(!analytic_functionals_stably_flat(&corpus::sl2()));
        assert!(analytic_functionals_stably_flat(&corpus::solvable2()));
        assert!(analytic_functionals_stably_flat(&corpus::heisenberg3()));
    }
}

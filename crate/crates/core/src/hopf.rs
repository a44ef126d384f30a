//! Hopf structure on the quotients `H = U(g)/J_{W+1}`.
//!
//! `H` is not a bialgebra in plain vector spaces: `Δ(ab)` and `Δ(a)Δ(b)`
//! differ by tensors of total weight above `W`. Everything here therefore
//! lives in the truncated tensor category, where `a ⊗ b` with
//! `w(a) + w(b) > W` is zero. All seven axioms hold exactly there, and the
//! linear identities (coassociativity, counit, antipode, `ΦΨ = id`) hold on
//! the full tensor powers as well.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lie::{LieAlgebra, WeightStructure};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::pbw::{multi_factorial, BasisMode, MultiIndex, PbwError, TruncationContext, UElement};
use crate::Rational;

/// Cochain spaces of the bar complexes are capped at this dimension.
pub const BAR_SIZE_CAP: usize = 20_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HopfError {
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error("bar complex in degree {degree} has dimension {dim}, above the cap {cap}")]
    SizeCap { degree: usize, dim: usize, cap: usize },
    #[error("bimodule has {got} action matrices, expected {expected}")]
    ModuleShape { expected: usize, got: usize },
}

/// `Δ(e_γ) = Σ_{α+β=γ} e_α ⊗ e_β` in the divided basis, or
/// `Δ(e^γ) = Σ γ!/(α!β!) e^α ⊗ e^β` in the plain one.
pub fn coproduct(x: &UElement) -> BTreeMap<(MultiIndex, MultiIndex), Rational> {
    let mut out: BTreeMap<(MultiIndex, MultiIndex), Rational> = BTreeMap::new();
    let d = x.to_divided();
    for (gamma, c) in d.terms() {
        for alpha in sub_indices(gamma) {
            let beta: MultiIndex = gamma.iter().zip(&alpha).map(|(g, a)| g - a).collect();
            let coeff = match x.mode() {
                BasisMode::Divided => c.clone(),
                // divided coefficient c at γ gives c/(α!β!) on e^α ⊗ e^β
                BasisMode::Plain => {
                    c / Rational::from_integer(multi_factorial(&alpha) * multi_factorial(&beta))
                }
            };
            let entry = out.entry((alpha, beta)).or_insert_with(Rational::zero);
            *entry += coeff;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// All `α ≤ γ` componentwise.
pub fn sub_indices(gamma: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::with_capacity(gamma.len())];
    for &g in gamma {
        out = out
            .into_iter()
            .flat_map(|prefix: MultiIndex| {
                (0..=g).map(move |a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// Structure tensors of `U(g)/J_{W+1}` in its quotient basis. Index 0 is
/// the unit.
#[derive(Clone, Debug)]
pub struct TruncatedHopf {
    name: String,
    basis: Vec<MultiIndex>,
    weights: Vec<u64>,
    cutoff: u64,
    mul: Vec<Vec<SparseVec>>,
    delta: Vec<Vec<(usize, usize, Rational)>>,
    counit: Vec<Rational>,
    antipode: SparseMatrix,
}

pub fn build_truncated_hopf(ctx: &TruncationContext) -> TruncatedHopf {
    let d = ctx.dim();
    let basis = ctx.basis().to_vec();
    debug_assert!(basis[0].iter().all(|&a| a == 0));
    let mul: Vec<Vec<SparseVec>> = (0..d).map(|a| (0..d).map(|b| ctx.mul_basis(a, b)).collect()).collect();
    let delta = basis
        .iter()
        .map(|g| {
            let x = UElement::monomial(g.clone(), Rational::one(), BasisMode::Plain);
            coproduct(&x)
                .into_iter()
                .map(|((a, b), c)| {
                    let i = ctx.index_of(&a).expect("sub-index has smaller weight");
                    let j = ctx.index_of(&b).expect("sub-index has smaller weight");
                    (i, j, c)
                })
                .collect()
        })
        .collect();
    let mut counit = vec![Rational::zero(); d];
    counit[0] = Rational::one();
    let antipode_columns: Vec<SparseVec> = basis
        .iter()
        .map(|alpha| {
            let mut word = Vec::new();
            for (i, &a) in alpha.iter().enumerate() {
                word.extend(std::iter::repeat_n(i, a as usize));
            }
            let sign = if word.len() % 2 == 0 { Rational::one() } else { -Rational::one() };
            word.reverse();
            let s = ctx.engine().word(&word).scale(&sign);
            s.terms().map(|(g, c)| (ctx.index_of(g).expect("within cutoff"), c.clone())).collect()
        })
        .collect();
    TruncatedHopf {
        name: ctx.algebra().name().to_string(),
        weights: (0..d).map(|i| ctx.basis_weight(i)).collect(),
        basis,
        cutoff: ctx.cutoff(),
        mul,
        delta,
        counit,
        antipode: SparseMatrix::from_columns(d, antipode_columns),
    }
}

impl TruncatedHopf {
    /// `U(g)/J_{W+1}` for an algebra with the given filtration.
    pub fn for_algebra(a: &LieAlgebra, weights: &WeightStructure, cutoff: u64) -> Result<Self, HopfError> {
        let ctx = TruncationContext::new(a, weights, cutoff)?;
        Ok(build_truncated_hopf(&ctx))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn basis_weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.basis.iter().position(|b| b.as_slice() == alpha)
    }

    pub fn product(&self, a: usize, b: usize) -> &SparseVec {
        &self.mul[a][b]
    }

    pub fn coproduct_of(&self, a: usize) -> &[(usize, usize, Rational)] {
        &self.delta[a]
    }

    pub fn counit(&self, a: usize) -> &Rational {
        &self.counit[a]
    }

    pub fn antipode(&self) -> &SparseMatrix {
        &self.antipode
    }

    /// Adds `delta` to the coefficient of `e_i ⊗ e_j` in `Δ(e_a)`; used to
    /// check that the axiom checks notice broken tensors.
    pub fn perturb_coproduct(&mut self, a: usize, i: usize, j: usize, delta: Rational) {
        let entries = &mut self.delta[a];
        match entries.iter_mut().find(|(x, y, _)| (*x, *y) == (i, j)) {
            Some(e) => e.2 += delta,
            None => entries.push((i, j, delta)),
        }
        entries.retain(|(_, _, c)| !c.is_zero());
    }

    pub fn perturb_product(&mut self, a: usize, b: usize, k: usize, delta: Rational) {
        let entries = &mut self.mul[a][b];
        match entries.iter_mut().find(|(x, _)| *x == k) {
            Some(e) => e.1 += delta,
            None => entries.push((k, delta)),
        }
        entries.retain(|(_, c)| !c.is_zero());
    }

    /// Product of two coordinate vectors.
    pub fn mul_vec(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (a, c) in x {
            for (b, d) in y {
                let cd = c * d;
                for (k, m) in &self.mul[*a][*b] {
                    *acc.entry(*k).or_insert_with(Rational::zero) += &cd * m;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    fn antipode_of(&self, a: usize) -> &SparseVec {
        self.antipode.column(a)
    }

    fn label(&self, a: usize) -> String {
        let parts: Vec<String> = self.basis[a]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| if x == 1 { format!("e{}", i + 1) } else { format!("e{}^{x}", i + 1) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Outcome of one identity check: exact zero difference or the largest
/// discrepancy with its location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub holds: bool,
    pub max_violation: Rational,
    /// Basis element whose image shows the largest discrepancy.
    pub failing_basis: Option<usize>,
    pub witness: Option<String>,
}

struct Discrepancy {
    best: Rational,
    at: Option<(usize, String)>,
}

impl Discrepancy {
    fn new() -> Self {
        Discrepancy { best: Rational::zero(), at: None }
    }

    fn compare<K: Ord + std::fmt::Debug + Clone>(&mut self, basis: usize, label: &str, lhs: &BTreeMap<K, Rational>, rhs: &BTreeMap<K, Rational>) {
        let mut diff: BTreeMap<K, Rational> = lhs.clone();
        for (k, v) in rhs {
            *diff.entry(k.clone()).or_insert_with(Rational::zero) -= v;
        }
        for (k, v) in diff {
            let a = v.abs();
            if a > self.best {
                self.best = a;
                self.at = Some((basis, format!("{label}, component {k:?}")));
            }
        }
    }

    fn finish(self, name: &'static str) -> AxiomCheck {
        AxiomCheck {
            name,
            holds: self.best.is_zero(),
            max_violation: self.best,
            failing_basis: self.at.as_ref().map(|(b, _)| *b),
            witness: self.at.map(|(_, w)| w),
        }
    }
}

fn to_map<K: Ord>(items: impl IntoIterator<Item = (K, Rational)>) -> BTreeMap<K, Rational> {
    let mut m = BTreeMap::new();
    for (k, v) in items {
        *m.entry(k).or_insert_with(Rational::zero) += v;
    }
    m.retain(|_, v: &mut Rational| !v.is_zero());
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfReport {
    pub dim: usize,
    pub cutoff: u64,
    /// The seven axioms, in a fixed order.
    pub axioms: Vec<AxiomCheck>,
    pub cocommutative: AxiomCheck,
    pub antipode_involution: AxiomCheck,
}

impl HopfReport {
    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|a| a.holds) && self.cocommutative.holds && self.antipode_involution.holds
    }
}

pub fn verify_hopf_axioms(h: &TruncatedHopf) -> HopfReport {
    let d = h.dim();
    let w = h.cutoff;
    let unit: SparseVec = vec![(0, Rational::one())];
    let basis_vec = |a: usize| -> SparseVec { vec![(a, Rational::one())] };

    let mut assoc = Discrepancy::new();
    for a in 0..d {
        for b in 0..d {
            let ab = &h.mul[a][b];
            for c in 0..d {
                let lhs = h.mul_vec(ab, &basis_vec(c));
                let rhs = h.mul_vec(&basis_vec(a), &h.mul[b][c]);
                let label = format!("({})({})({})", h.label(a), h.label(b), h.label(c));
                assoc.compare(a, &label, &to_map(lhs), &to_map(rhs));
            }
        }
    }

    let mut unit_check = Discrepancy::new();
    for a in 0..d {
        let expect = to_map(basis_vec(a));
        unit_check.compare(a, &format!("1*{}", h.label(a)), &to_map(h.mul_vec(&unit, &basis_vec(a))), &expect);
        unit_check.compare(a, &format!("{}*1", h.label(a)), &to_map(h.mul_vec(&basis_vec(a), &unit)), &expect);
    }

    let mut coassoc = Discrepancy::new();
    let mut counit_check = Discrepancy::new();
    let mut cocomm = Discrepancy::new();
    for a in 0..d {
        let left = to_map(h.delta[a].iter().flat_map(|(x, y, c)| {
            h.delta[*x].iter().map(move |(p, q, e)| ((*p, *q, *y), c * e))
        }));
        let right = to_map(h.delta[a].iter().flat_map(|(x, y, c)| {
            h.delta[*y].iter().map(move |(p, q, e)| ((*x, *p, *q), c * e))
        }));
        coassoc.compare(a, &format!("Δ⊗1 vs 1⊗Δ on {}", h.label(a)), &left, &right);

        let expect = to_map(basis_vec(a));
        let eps_left = to_map(h.delta[a].iter().map(|(x, y, c)| (*y, c * &h.counit[*x])));
        let eps_right = to_map(h.delta[a].iter().map(|(x, y, c)| (*x, c * &h.counit[*y])));
        counit_check.compare(a, &format!("ε⊗1 on {}", h.label(a)), &eps_left, &expect);
        counit_check.compare(a, &format!("1⊗ε on {}", h.label(a)), &eps_right, &expect);

        let flipped = to_map(h.delta[a].iter().map(|(x, y, c)| ((*y, *x), c.clone())));
        let plain = to_map(h.delta[a].iter().map(|(x, y, c)| ((*x, *y), c.clone())));
        cocomm.compare(a, &format!("τΔ on {}", h.label(a)), &flipped, &plain);
    }

    // Δ(ab) against Δ(a)Δ(b) in the truncated tensor square
    let mut delta_mult = Discrepancy::new();
    let mut eps_mult = Discrepancy::new();
    let one_one = to_map([((0usize, 0usize), Rational::one())]);
    delta_mult.compare(0, "Δ(1)", &to_map(h.delta[0].iter().map(|(x, y, c)| ((*x, *y), c.clone()))), &one_one);
    eps_mult.compare(0, "ε(1)", &to_map([((), h.counit[0].clone())]), &to_map([((), Rational::one())]));
    for a in 0..d {
        for b in 0..d {
            let lhs = to_map(
                h.mul[a][b]
                    .iter()
                    .flat_map(|(k, m)| h.delta[*k].iter().map(move |(x, y, c)| ((*x, *y), m * c))),
            );
            let mut rhs_items = Vec::new();
            for (a1, a2, c) in &h.delta[a] {
                for (b1, b2, e) in &h.delta[b] {
                    let ce = c * e;
                    for (p, m) in &h.mul[*a1][*b1] {
                        for (q, n) in &h.mul[*a2][*b2] {
                            if h.weights[*p] + h.weights[*q] <= w {
                                rhs_items.push(((*p, *q), &ce * m * n));
                            }
                        }
                    }
                }
            }
            delta_mult.compare(a, &format!("Δ({}*{})", h.label(a), h.label(b)), &lhs, &to_map(rhs_items));

            let e_ab: Rational = h.mul[a][b].iter().map(|(k, m)| m * &h.counit[*k]).sum();
            eps_mult.compare(
                a,
                &format!("ε({}*{})", h.label(a), h.label(b)),
                &to_map([((), e_ab)]),
                &to_map([((), &h.counit[a] * &h.counit[b])]),
            );
        }
    }

    let mut antipode = Discrepancy::new();
    let mut involution = Discrepancy::new();
    for a in 0..d {
        let expect = to_map([(0usize, h.counit[a].clone())]);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (x, y, c) in &h.delta[a] {
            let sx = h.antipode_of(*x);
            let sy = h.antipode_of(*y);
            for (k, v) in h.mul_vec(sx, &basis_vec(*y)) {
                left.push((k, c * v));
            }
            for (k, v) in h.mul_vec(&basis_vec(*x), sy) {
                right.push((k, c * v));
            }
        }
        antipode.compare(a, &format!("μ(S⊗1)Δ on {}", h.label(a)), &to_map(left), &expect);
        antipode.compare(a, &format!("μ(1⊗S)Δ on {}", h.label(a)), &to_map(right), &expect);
        let ss = h.antipode.apply(h.antipode_of(a));
        involution.compare(a, &format!("S² on {}", h.label(a)), &to_map(ss), &to_map(basis_vec(a)));
    }

    HopfReport {
        dim: d,
        cutoff: w,
        axioms: vec![
            assoc.finish("associativity"),
            unit_check.finish("unit"),
            coassoc.finish("coassociativity"),
            counit_check.finish("counit"),
            delta_mult.finish("coproduct multiplicative"),
            eps_mult.finish("counit multiplicative"),
            antipode.finish("antipode"),
        ],
        cocommutative: cocomm.finish("cocommutativity"),
        antipode_involution: involution.finish("antipode involution"),
    }
}

/// `Φ = (μ⊗1)(1⊗Δ)` on `H⊗H`, index `a·d + b` for `e_a ⊗ e_b`.
pub fn phi_matrix(h: &TruncatedHopf) -> SparseMatrix {
    let d = h.dim();
    let mut trip = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for (x, y, c) in &h.delta[b] {
                for (z, m) in &h.mul[a][*x] {
                    trip.push((z * d + y, a * d + b, c * m));
                }
            }
        }
    }
    SparseMatrix::from_triplets(d * d, d * d, trip)
}

/// `Ψ = (μ⊗1)(1⊗S⊗1)(1⊗Δ)`.
pub fn psi_matrix(h: &TruncatedHopf) -> SparseMatrix {
    let d = h.dim();
    let mut trip = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for (x, y, c) in &h.delta[b] {
                for (s, sv) in h.antipode_of(*x) {
                    for (z, m) in &h.mul[a][*s] {
                        trip.push((z * d + y, a * d + b, c * sv * m));
                    }
                }
            }
        }
    }
    SparseMatrix::from_triplets(d * d, d * d, trip)
}

/// `E = (1⊗S)Δ : H → H⊗H`.
pub fn e_matrix(h: &TruncatedHopf) -> SparseMatrix {
    let d = h.dim();
    let mut trip = Vec::new();
    for a in 0..d {
        for (x, y, c) in &h.delta[a] {
            for (s, sv) in h.antipode_of(*y) {
                trip.push((x * d + s, a, c * sv));
            }
        }
    }
    SparseMatrix::from_triplets(d * d, d, trip)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseProcessReport {
    pub dim: usize,
    pub phi_psi_identity: bool,
    pub psi_phi_identity: bool,
    pub mu_e_equals_eta_epsilon: bool,
    /// Basis vectors where `μE` and `ηε` differ.
    pub mu_e_failures: Vec<usize>,
}

impl InverseProcessReport {
    pub fn holds(&self) -> bool {
        self.phi_psi_identity && self.psi_phi_identity && self.mu_e_equals_eta_epsilon
    }
}

pub fn inverse_process_check(h: &TruncatedHopf) -> InverseProcessReport {
    let d = h.dim();
    let phi = phi_matrix(h);
    let psi = psi_matrix(h);
    let e = e_matrix(h);
    let mut mu_e_failures = Vec::new();
    for a in 0..d {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (row, c) in e.column(a) {
            let (x, s) = (row / d, row % d);
            for (k, m) in &h.mul[x][s] {
                *acc.entry(*k).or_insert_with(Rational::zero) += c * m;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        let expect = to_map([(0usize, h.counit[a].clone())]);
        if acc != expect {
            mu_e_failures.push(a);
        }
    }
    InverseProcessReport {
        dim: d,
        phi_psi_identity: phi.mul(&psi).is_identity(),
        psi_phi_identity: psi.mul(&phi).is_identity(),
        mu_e_equals_eta_epsilon: mu_e_failures.is_empty(),
        mu_e_failures,
    }
}

/// A filtered `H`-bimodule given by action matrices for every basis
/// vector of `H`: `left[a]` is `m ↦ e_a·m`, `right[a]` is `m ↦ m·e_a`.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub dim: usize,
    pub weights: Vec<u64>,
    pub left: Vec<SparseMatrix>,
    pub right: Vec<SparseMatrix>,
}

impl Bimodule {
    /// `H` acting on itself from both sides.
    pub fn regular(h: &TruncatedHopf) -> Self {
        let d = h.dim();
        let left = (0..d).map(|a| SparseMatrix::from_columns(d, (0..d).map(|m| h.mul[a][m].clone()).collect())).collect();
        let right = (0..d).map(|a| SparseMatrix::from_columns(d, (0..d).map(|m| h.mul[m][a].clone()).collect())).collect();
        Bimodule { dim: d, weights: h.weights.clone(), left, right }
    }

    /// `C` with both actions through the counit, in weight 0.
    pub fn trivial(h: &TruncatedHopf) -> Self {
        let acts: Vec<SparseMatrix> =
            (0..h.dim()).map(|a| SparseMatrix::from_triplets(1, 1, [(0, 0, h.counit[a].clone())])).collect();
        Bimodule { dim: 1, weights: vec![0], left: acts.clone(), right: acts }
    }

    /// Left action through `E`: `a·m = Σ a₁ m S(a₂)`.
    pub fn through_e(&self, h: &TruncatedHopf) -> Vec<SparseMatrix> {
        (0..h.dim())
            .map(|a| {
                let mut trip = Vec::new();
                for (x, y, c) in &h.delta[a] {
                    for (s, sv) in h.antipode_of(*y) {
                        let p = self.left[*x].mul(&self.right[*s]);
                        let f = c * sv;
                        for (i, j, v) in p.triplets() {
                            trip.push((i, j, &f * v));
                        }
                    }
                }
                SparseMatrix::from_triplets(self.dim, self.dim, trip)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyComparison {
    /// `dim H^k(H, M)` for `k = 0..=k_max`.
    pub hochschild: Vec<usize>,
    /// `dim Ext^k_H(C, _E M)` for `k = 0..=k_max`.
    pub ext: Vec<usize>,
    /// Dimensions of the filtered cochain spaces `C^0..C^{k_max+1}`.
    pub cochain_dims: Vec<usize>,
}

impl CohomologyComparison {
    pub fn agree(&self) -> bool {
        self.hochschild == self.ext
    }
}

/// Compares Hochschild cohomology with `Ext` over the normalized bar
/// complexes, restricted to filtration-preserving cochains on the truncated
/// tensor powers.
pub fn hochschild_ext_compare(h: &TruncatedHopf, m: &Bimodule, k_max: usize) -> Result<CohomologyComparison, HopfError> {
    hochschild_ext_compare_capped(h, m, k_max, BAR_SIZE_CAP)
}

pub fn hochschild_ext_compare_capped(
    h: &TruncatedHopf,
    m: &Bimodule,
    k_max: usize,
    cap: usize,
) -> Result<CohomologyComparison, HopfError> {
    for acts in [&m.left, &m.right] {
        if acts.len() != h.dim() {
            return Err(HopfError::ModuleShape { expected: h.dim(), got: acts.len() });
        }
    }
    let bar = BarData::new(h, m, k_max + 1, cap)?;
    let e_left = m.through_e(h);
    let mut hoch_ranks = Vec::new();
    let mut ext_ranks = Vec::new();
    for n in 0..=k_max {
        hoch_ranks.push(bar.coboundary(h, &m.left, Some(&m.right), n).rank());
        ext_ranks.push(bar.coboundary(h, &e_left, None, n).rank());
    }
    let betti = |ranks: &[usize]| -> Vec<usize> {
        (0..=k_max)
            .map(|k| bar.cochain_dims[k] - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 })
            .collect()
    };
    Ok(CohomologyComparison {
        hochschild: betti(&hoch_ranks),
        ext: betti(&ext_ranks),
        cochain_dims: bar.cochain_dims.clone(),
    })
}

struct BarData {
    // tuples[n]: nonunit basis tuples of length n with total weight ≤ W
    tuples: Vec<Vec<Vec<usize>>>,
    tuple_index: Vec<HashMap<Vec<usize>, usize>>,
    // per degree: (tuple, module basis) -> cochain coordinate
    coords: Vec<HashMap<(usize, usize), usize>>,
    cochain_dims: Vec<usize>,
    module_weights: Vec<u64>,
}

impl BarData {
    fn new(h: &TruncatedHopf, m: &Bimodule, top: usize, cap: usize) -> Result<Self, HopfError> {
        let nonunit: Vec<usize> = (1..h.dim()).collect();
        let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
        for _ in 0..top {
            let prev = tuples.last().expect("non-empty");
            let mut next = Vec::new();
            for t in prev {
                let w: u64 = t.iter().map(|&a| h.weights[a]).sum();
                for &a in &nonunit {
                    if w + h.weights[a] <= h.cutoff {
                        let mut u = t.clone();
                        u.push(a);
                        next.push(u);
                    }
                }
            }
            tuples.push(next);
        }
        let tuple_index = tuples
            .iter()
            .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
            .collect();
        let tuple_weight: Vec<Vec<u64>> = tuples
            .iter()
            .map(|ts| ts.iter().map(|t| t.iter().map(|&a| h.weights[a]).sum()).collect())
            .collect();
        let mut coords = Vec::new();
        let mut cochain_dims = Vec::new();
        for (n, ws) in tuple_weight.iter().enumerate() {
            let mut map = HashMap::new();
            for (t, &tw) in ws.iter().enumerate() {
                for (j, &mw) in m.weights.iter().enumerate() {
                    if mw >= tw {
                        let next = map.len();
                        map.insert((t, j), next);
                    }
                }
            }
            if map.len() > cap {
                return Err(HopfError::SizeCap { degree: n, dim: map.len(), cap });
            }
            cochain_dims.push(map.len());
            coords.push(map);
        }
        Ok(BarData { tuples, tuple_index, coords, cochain_dims, module_weights: m.weights.clone() })
    }

    /// `δ^n : C^n → C^{n+1}`. With `right = None` the last face is the
    /// counit, which vanishes on nonunit arguments.
    fn coboundary(&self, h: &TruncatedHopf, left: &[SparseMatrix], right: Option<&[SparseMatrix]>, n: usize) -> SparseMatrix {
        let src = &self.coords[n];
        let dst = &self.coords[n + 1];
        let mut trip: Vec<(usize, usize, Rational)> = Vec::new();
        let mut push = |t_new: usize, m_new: usize, t_old: usize, m_old: usize, c: Rational| {
            if c.is_zero() {
                return;
            }
            let Some(&col) = src.get(&(t_old, m_old)) else { return };
            match dst.get(&(t_new, m_new)) {
                Some(&row) => trip.push((row, col, c)),
                None => debug_assert!(false, "coboundary left the filtered cochains"),
            }
        };
        let sign = |k: usize| if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        for (tp, t) in self.tuples[n + 1].iter().enumerate() {
            // a_1 · f(a_2, …)
            let rest = self.tuple_index[n][&t[1..].to_vec()];
            for (mi, mo, v) in left[t[0]].triplets() {
                push(tp, mi, rest, mo, v.clone());
            }
            // Σ (-1)^i f(…, a_i a_{i+1}, …)
            for i in 0..n {
                for (x, c) in &h.mul[t[i]][t[i + 1]] {
                    let mut s = Vec::with_capacity(n);
                    s.extend_from_slice(&t[..i]);
                    s.push(*x);
                    s.extend_from_slice(&t[i + 2..]);
                    let Some(&si) = self.tuple_index[n].get(&s) else { continue };
                    let f = sign(i + 1) * c;
                    for mo in 0..self.module_weights.len() {
                        push(tp, mo, si, mo, f.clone());
                    }
                }
            }
            // (-1)^{n+1} f(a_1, …, a_n) · a_{n+1}
            if let Some(right) = right {
                let head = self.tuple_index[n][&t[..n].to_vec()];
                let s = sign(n + 1);
                for (mi, mo, v) in right[t[n]].triplets() {
                    push(tp, mi, head, mo, &s * v);
                }
            }
        }
        SparseMatrix::from_triplets(self.cochain_dims[n + 1], self.cochain_dims[n], trip)
    }
}

/// `γ!/(α!β!)` as an integer; exposed for tests of the plain coproduct.
pub fn multinomial(alpha: &[u32], beta: &[u32]) -> BigInt {
    let gamma: MultiIndex = alpha.iter().zip(beta).map(|(a, b)| a + b).collect();
    multi_factorial(&gamma) / (multi_factorial(alpha) * multi_factorial(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::pbw::Pbw;
    use crate::rat;

    fn h3(cutoff: u64) -> TruncatedHopf {
        TruncatedHopf::for_algebra(&corpus::heisenberg3(), &WeightStructure::grading(vec![1, 1, 2]), cutoff).unwrap()
    }

    #[test]
    fn coproduct_of_generator_is_primitive() {
        let d = coproduct(&UElement::generator(3, 0));
        let expect: BTreeMap<_, _> =
            [((vec![1, 0, 0], vec![0, 0, 0]), rat(1)), ((vec![0, 0, 0], vec![1, 0, 0]), rat(1))].into_iter().collect();
        assert_eq!(d, expect);
    }

    #[test]
    fn divided_coproduct_of_square() {
        let x = UElement::monomial(vec![2, 0, 0], rat(1), BasisMode::Divided);
        let d = coproduct(&x);
        assert_eq!(d.len(), 3);
        assert_eq!(d[&(vec![2, 0, 0], vec![0, 0, 0])], rat(1));
        assert_eq!(d[&(vec![1, 0, 0], vec![1, 0, 0])], rat(1));
        assert_eq!(d[&(vec![0, 0, 0], vec![2, 0, 0])], rat(1));
    }

    // Oracle: Δ(e^γ) = Π_i Δ(e_i)^{γ_i}, multiplied out in U ⊗ U with PBW products.
    fn coproduct_by_products(p: &Pbw, gamma: &[u32]) -> BTreeMap<(MultiIndex, MultiIndex), Rational> {
        let n = gamma.len();
        let zero = vec![0u32; n];
        let mut acc: BTreeMap<(MultiIndex, MultiIndex), Rational> = [((zero.clone(), zero.clone()), rat(1))].into();
        for (i, &g) in gamma.iter().enumerate() {
            let mut ei = zero.clone();
            ei[i] = 1;
            let prim = [(ei.clone(), zero.clone()), (zero.clone(), ei.clone())];
            for _ in 0..g {
                let mut next: BTreeMap<(MultiIndex, MultiIndex), Rational> = BTreeMap::new();
                for ((a, b), c) in &acc {
                    for (x, y) in &prim {
                        for (l, cl) in p.mul_monomials(a, x).iter() {
                            for (r, cr) in p.mul_monomials(b, y).iter() {
                                *next.entry((l.clone(), r.clone())).or_insert_with(Rational::zero) += c * cl * cr;
                            }
                        }
                    }
                }
                next.retain(|_, v| !v.is_zero());
                acc = next;
            }
        }
        acc
    }

    #[test]
    fn plain_coproduct_matches_product_of_primitives() {
        for a in [corpus::heisenberg3(), corpus::favre7(), corpus::sl2()] {
            let p = Pbw::new(a.clone());
            let n = a.dim();
            for gamma in crate::pbw::quotient_basis(&vec![1; n], 3) {
                let x = UElement::monomial(gamma.clone(), rat(1), BasisMode::Plain);
                assert_eq!(coproduct(&x), coproduct_by_products(&p, &gamma), "{} {:?}", a.name(), gamma);
            }
        }
    }

    #[test]
    fn antipode_of_e1e2() {
        let h = h3(3);
        let e1e2 = h.index_of(&[1, 1, 0]).unwrap();
        let e3 = h.index_of(&[0, 0, 1]).unwrap();
        let mut col = h.antipode().column(e1e2).clone();
        col.sort();
        let mut expect = vec![(e1e2, rat(1)), (e3, rat(-1))];
        expect.sort();
        assert_eq!(col, expect);
    }

    #[test]
    fn axioms_hold_for_h3() {
        let r = verify_hopf_axioms(&h3(3));
        assert_eq!(r.axioms.len(), 7);
        assert!(r.all_hold(), "{r:?}");
        let trivial = verify_hopf_axioms(&h3(0));
        assert_eq!(trivial.dim, 1);
        assert!(trivial.all_hold());
    }

    #[test]
    fn coproduct_is_not_multiplicative_without_truncation() {
        // at W=1: Δ(e1 e2) = 0 in H, but Δ(e1)Δ(e2) contains e1⊗e2 of total weight 2
        let h = h3(1);
        let e1 = h.index_of(&[1, 0, 0]).unwrap();
        let e2 = h.index_of(&[0, 1, 0]).unwrap();
        assert!(h.product(e1, e2).is_empty());
        assert!(h.coproduct_of(e1).iter().any(|&(x, y, _)| (x, y) == (e1, 0)));
        assert!(verify_hopf_axioms(&h).all_hold());
    }

    #[test]
    fn corrupted_coproduct_is_located() {
        // Δ(e1) = 2 e1⊗1 + 1⊗e1: the two sides differ by 2 e1⊗1⊗1
        let mut h = h3(1);
        let e1 = h.index_of(&[1, 0, 0]).unwrap();
        h.perturb_coproduct(e1, e1, 0, rat(1));
        let r = verify_hopf_axioms(&h);
        let coassoc = &r.axioms[2];
        assert!(!coassoc.holds);
        assert_eq!(coassoc.max_violation, rat(2));
        assert_eq!(coassoc.failing_basis, Some(e1));
        assert!(coassoc.witness.as_deref().unwrap().contains("e1"));
        assert!(r.axioms[0].holds && r.axioms[1].holds);
    }

    #[test]
    fn phi_psi_examples() {
        let h = h3(3);
        let d = h.dim();
        let phi = phi_matrix(&h);
        let psi = psi_matrix(&h);
        for a in 0..d {
            assert_eq!(phi.column(a * d), &vec![(a * d, rat(1))]);
        }
        let e1 = h.index_of(&[1, 0, 0]).unwrap();
        let image = phi.column(e1).clone();
        let mut expect = vec![(e1 * d, rat(1)), (e1, rat(1))];
        expect.sort();
        assert_eq!(image, expect);
        assert_eq!(psi.apply(&image), vec![(e1, rat(1))]);
        assert!(inverse_process_check(&h).holds());
    }

    #[test]
    fn hochschild_ext_small() {
        // U(h3)/J_2 = span{1, e1, e2}, m² = 0. Hand computation: both columns (3, 4, 0).
        let h = h3(1);
        let m = Bimodule::regular(&h);
        let c = hochschild_ext_compare(&h, &m, 2).unwrap();
        assert_eq!(c.hochschild, vec![3, 4, 0]);
        assert_eq!(c.ext, vec![3, 4, 0]);
        let t = hochschild_ext_compare(&h, &Bimodule::trivial(&h), 0).unwrap();
        assert_eq!((t.hochschild[0], t.ext[0]), (1, 1));
    }

    #[test]
    fn size_cap_enforced() {
        let h = h3(2);
        let m = Bimodule::regular(&h);
        let err = hochschild_ext_compare_capped(&h, &m, 2, 10).unwrap_err();
        assert!(matches!(err, HopfError::SizeCap { .. }));
    }
}

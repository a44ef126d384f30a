//! PBW normal forms in `U(g)` and its weight quotients `U(g)/J_{W+1}`.
//!
//! Elements are sparse maps from exponent vectors `α` to rationals, read
//! either in the plain basis `e^α = e_1^{α_1}…e_N^{α_N}` or in the divided
//! basis `e_α = e^α/α!`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lie::{is_nilpotent, lower_central_weights, verify_weight_structure, LieAlgebra, WeightReport, WeightStructure};
use crate::Rational;

pub type MultiIndex = Vec<u32>;

type Terms = Vec<(MultiIndex, Rational)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PbwError {
    #[error("weights do not define a filtration of the algebra ({0} violated brackets)")]
    InvalidWeights(usize),
    #[error("expected {expected} weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("algebra is not nilpotent; explicit weights are required")]
    WeightsRequired,
}

/// `Σ w_i α_i`.
pub fn weight_of(alpha: &[u32], weights: &[u32]) -> u64 {
    alpha.iter().zip(weights).map(|(&a, &w)| u64::from(a) * u64::from(w)).sum()
}

/// `α! = Π α_i!`.
pub fn multi_factorial(alpha: &[u32]) -> BigInt {
    alpha
        .iter()
        .fold(BigInt::one(), |acc, &a| (1..=a).fold(acc, |p, k| p * BigInt::from(k)))
}

pub fn degree(alpha: &[u32]) -> u64 {
    alpha.iter().map(|&a| u64::from(a)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisMode {
    Plain,
    Divided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UElement {
    mode: BasisMode,
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl UElement {
    pub fn zero(dim: usize, mode: BasisMode) -> Self {
        UElement { mode, dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        UElement::monomial(vec![0; dim], Rational::one(), BasisMode::Plain)
    }

    pub fn generator(dim: usize, i: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[i] = 1;
        UElement::monomial(alpha, Rational::one(), BasisMode::Plain)
    }

    pub fn monomial(alpha: MultiIndex, c: Rational, mode: BasisMode) -> Self {
        let dim = alpha.len();
        let mut e = UElement::zero(dim, mode);
        e.add_term(alpha, c);
        e
    }

    pub fn from_terms(dim: usize, mode: BasisMode, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut e = UElement::zero(dim, mode);
        for (a, c) in terms {
            assert_eq!(a.len(), dim, "multi-index length");
            e.add_term(a, c);
        }
        e
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_mode(&self, other: &UElement) -> UElement {
        match other.mode {
            m if m == self.mode => other.clone(),
            BasisMode::Plain => other.to_divided(),
            BasisMode::Divided => other.to_plain(),
        }
    }

    pub fn add(&self, other: &UElement) -> UElement {
        let mut out = self.clone();
        for (a, c) in self.same_mode(other).terms {
            out.add_term(a, c);
        }
        out
    }

    pub fn sub(&self, other: &UElement) -> UElement {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> UElement {
        UElement::from_terms(self.dim, self.mode, self.terms.iter().map(|(a, x)| (a.clone(), x * c)))
    }

    /// Coefficients with respect to `e_α = e^α/α!`.
    pub fn to_divided(&self) -> UElement {
        match self.mode {
            BasisMode::Divided => self.clone(),
            BasisMode::Plain => UElement::from_terms(
                self.dim,
                BasisMode::Divided,
                self.terms.iter().map(|(a, c)| (a.clone(), c * Rational::from_integer(multi_factorial(a)))),
            ),
        }
    }

    pub fn to_plain(&self) -> UElement {
        match self.mode {
            BasisMode::Plain => self.clone(),
            BasisMode::Divided => UElement::from_terms(
                self.dim,
                BasisMode::Plain,
                self.terms.iter().map(|(a, c)| (a.clone(), c / Rational::from_integer(multi_factorial(a)))),
            ),
        }
    }

    pub fn min_weight(&self, weights: &[u32]) -> Option<u64> {
        self.terms.keys().map(|a| weight_of(a, weights)).min()
    }

    pub fn max_weight(&self, weights: &[u32]) -> Option<u64> {
        self.terms.keys().map(|a| weight_of(a, weights)).max()
    }
}

impl fmt::Display for UElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (alpha, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = alpha
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("e{}", i + 1) } else { format!("e{}^{a}", i + 1) })
                .collect();
            let mag = c.abs();
            if pos == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", mono.join("*"))?,
            }
            if self.mode == BasisMode::Divided && !mono.is_empty() {
                write!(f, "/{}", multi_factorial(alpha))?;
            }
        }
        Ok(())
    }
}

/// Normal-form engine for one algebra, optionally pruning everything of
/// weight above a cutoff. Pruning is only sound when the weights form a
/// filtration, which [`TruncationContext::new`] checks.
pub struct Pbw {
    algebra: LieAlgebra,
    weights: Vec<u32>,
    cutoff: Option<u64>,
    gen_memo: RwLock<HashMap<(MultiIndex, usize), Arc<Terms>>>,
    mono_memo: RwLock<HashMap<(MultiIndex, MultiIndex), Arc<Terms>>>,
    rewrites: AtomicU64,
}

impl fmt::Debug for Pbw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pbw")
            .field("algebra", &self.algebra.name())
            .field("weights", &self.weights)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl Pbw {
    /// Engine without truncation.
    pub fn new(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        Pbw::with_cutoff(algebra, vec![1; n], None)
    }

    /// Engine dropping every monomial of weight above `cutoff`. The caller
    /// is responsible for `weights` being a filtration.
    pub fn with_cutoff(algebra: LieAlgebra, weights: Vec<u32>, cutoff: Option<u64>) -> Self {
        Pbw {
            algebra,
            weights,
            cutoff,
            gen_memo: RwLock::new(HashMap::new()),
            mono_memo: RwLock::new(HashMap::new()),
            rewrites: AtomicU64::new(0),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn cutoff(&self) -> Option<u64> {
        self.cutoff
    }

    /// Number of distinct adjacent-pair rewrites performed so far.
    pub fn rewrite_count(&self) -> u64 {
        self.rewrites.load(Ordering::Relaxed)
    }

    fn keep(&self, alpha: &[u32]) -> bool {
        self.cutoff.is_none_or(|w| weight_of(alpha, &self.weights) <= w)
    }

    /// Normal form of `e^α e_j`.
    pub fn mul_generator(&self, alpha: &[u32], j: usize) -> Arc<Terms> {
        let key = (alpha.to_vec(), j);
        if let Some(hit) = self.gen_memo.read().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.mul_generator_uncached(alpha, j));
        self.gen_memo.write().expect("memo lock").insert(key, result.clone());
        result
    }

    fn mul_generator_uncached(&self, alpha: &[u32], j: usize) -> Terms {
        let last = alpha.iter().rposition(|&a| a > 0);
        match last {
            Some(last) if j < last => {
                self.rewrites.fetch_add(1, Ordering::Relaxed);
                // e^{α'} e_last e_j = (e^{α'} e_j) e_last + Σ_k c[last][j][k] e^{α'} e_k
                let mut prefix = alpha.to_vec();
                prefix[last] -= 1;
                let mut acc: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
                for (beta, c) in self.mul_generator(&prefix, j).iter() {
                    for (gamma, d) in self.mul_generator(beta, last).iter() {
                        accumulate(&mut acc, gamma, c * d);
                    }
                }
                for (k, ck) in self.algebra.bracket(last, j) {
                    for (gamma, d) in self.mul_generator(&prefix, k).iter() {
                        accumulate(&mut acc, gamma, &ck * d);
                    }
                }
                acc.into_iter().collect()
            }
            _ => {
                let mut gamma = alpha.to_vec();
                gamma[j] += 1;
                if self.keep(&gamma) {
                    vec![(gamma, Rational::one())]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Normal form of `e^α e^β`.
    pub fn mul_monomials(&self, alpha: &[u32], beta: &[u32]) -> Arc<Terms> {
        let key = (alpha.to_vec(), beta.to_vec());
        if let Some(hit) = self.mono_memo.read().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let mut current: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        if self.keep(alpha) {
            current.insert(alpha.to_vec(), Rational::one());
        }
        for (j, &b) in beta.iter().enumerate() {
            for _ in 0..b {
                let mut next = BTreeMap::new();
                for (m, c) in &current {
                    for (gamma, d) in self.mul_generator(m, j).iter() {
                        accumulate(&mut next, gamma, c * d);
                    }
                }
                current = next;
            }
        }
        let result: Arc<Terms> = Arc::new(current.into_iter().collect());
        self.mono_memo.write().expect("memo lock").insert(key, result.clone());
        result
    }

    /// Normal form of `xy`, returned in the basis mode of `x`.
    pub fn product(&self, x: &UElement, y: &UElement) -> UElement {
        let (xp, yp) = (x.to_plain(), y.to_plain());
        let mut out = UElement::zero(x.dim(), BasisMode::Plain);
        for (a, c) in xp.terms() {
            for (b, d) in yp.terms() {
                let cd = c * d;
                for (g, e) in self.mul_monomials(a, b).iter() {
                    out.add_term(g.clone(), &cd * e);
                }
            }
        }
        if x.mode() == BasisMode::Divided {
            out.to_divided()
        } else {
            out
        }
    }

    /// Normal form of a word `e_{i_1} … e_{i_k}`.
    pub fn word(&self, word: &[usize]) -> UElement {
        let n = self.algebra.dim();
        let mut acc = reduce_mod_opt(&UElement::one(n), &self.weights, self.cutoff);
        for &i in word {
            acc = self.product(&acc, &UElement::generator(n, i));
        }
        acc
    }
}

fn accumulate(acc: &mut BTreeMap<MultiIndex, Rational>, key: &MultiIndex, c: Rational) {
    if c.is_zero() {
        return;
    }
    let entry = acc.entry(key.clone()).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        acc.remove(key);
    }
}

/// Drop all terms of weight above `cutoff`.
pub fn reduce_mod(x: &UElement, weights: &[u32], cutoff: u64) -> UElement {
    reduce_mod_opt(x, weights, Some(cutoff))
}

fn reduce_mod_opt(x: &UElement, weights: &[u32], cutoff: Option<u64>) -> UElement {
    UElement::from_terms(
        x.dim(),
        x.mode(),
        x.terms()
            .filter(|(a, _)| cutoff.is_none_or(|w| weight_of(a, weights) <= w))
            .map(|(a, c)| (a.clone(), c.clone())),
    )
}

/// All `α` with `w(α) ≤ cutoff`, ordered by weight and then lexicographically
/// descending (so `e_1` precedes `e_2` in each weight).
pub fn quotient_basis(weights: &[u32], cutoff: u64) -> Vec<MultiIndex> {
    fn rec(weights: &[u32], pos: usize, budget: u64, current: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if pos == weights.len() {
            out.push(current.clone());
            return;
        }
        let w = u64::from(weights[pos]);
        let mut k = 0u32;
        loop {
            current[pos] = k;
            rec(weights, pos + 1, budget - u64::from(k) * w, current, out);
            if u64::from(k + 1) * w > budget {
                break;
            }
            k += 1;
        }
        current[pos] = 0;
    }
    assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
    let mut out = Vec::new();
    rec(weights, 0, cutoff, &mut vec![0; weights.len()], &mut out);
    out.sort_by(|a, b| weight_of(a, weights).cmp(&weight_of(b, weights)).then_with(|| b.cmp(a)));
    out
}

/// Weights for operations that need one: the given structure if any,
/// otherwise the lower-central-series weights of a nilpotent algebra.
pub fn default_weights(a: &LieAlgebra, given: Option<&WeightStructure>) -> Result<WeightStructure, PbwError> {
    if let Some(w) = given {
        return Ok(w.clone());
    }
    if !is_nilpotent(a) {
        return Err(PbwError::WeightsRequired);
    }
    // nilpotent but unadapted basis: fall back to the weakest filtration
    Ok(WeightStructure::filtration(lower_central_weights(a).unwrap_or_else(|| vec![1; a.dim()])))
}

/// `U(g)/J_{W+1}` with its ordered monomial basis.
#[derive(Debug)]
pub struct TruncationContext {
    engine: Pbw,
    weights: WeightStructure,
    basis: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl TruncationContext {
    pub fn new(algebra: &LieAlgebra, weights: &WeightStructure, cutoff: u64) -> Result<Self, PbwError> {
        let report = check_filtration(algebra, weights)?;
        if !report.violations.is_empty() {
            return Err(PbwError::InvalidWeights(report.violations.len()));
        }
        let basis = quotient_basis(&weights.weights, cutoff);
        let index = basis.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(TruncationContext {
            engine: Pbw::with_cutoff(algebra.clone(), weights.weights.clone(), Some(cutoff)),
            weights: weights.clone(),
            basis,
            index,
        })
    }

    pub fn engine(&self) -> &Pbw {
        &self.engine
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.engine.algebra()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights.weights
    }

    pub fn weight_structure(&self) -> &WeightStructure {
        &self.weights
    }

    pub fn cutoff(&self) -> u64 {
        self.engine.cutoff().expect("truncated engine")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn basis_weight(&self, i: usize) -> u64 {
        weight_of(&self.basis[i], self.weights())
    }

    pub fn product(&self, x: &UElement, y: &UElement) -> UElement {
        self.engine.product(x, y)
    }

    pub fn reduce(&self, x: &UElement) -> UElement {
        reduce_mod(x, self.weights(), self.cutoff())
    }

    /// Product of two basis vectors as sparse coordinates.
    pub fn mul_basis(&self, a: usize, b: usize) -> Vec<(usize, Rational)> {
        self.engine
            .mul_monomials(&self.basis[a], &self.basis[b])
            .iter()
            .map(|(g, c)| (self.index[g], c.clone()))
            .collect()
    }

    /// Plain-basis coordinates of the truncation of `x`.
    pub fn to_vector(&self, x: &UElement) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (a, c) in x.to_plain().terms() {
            if let Some(&i) = self.index.get(a) {
                v[i] = c.clone();
            }
        }
        v
    }

    pub fn from_vector(&self, v: &[Rational]) -> UElement {
        UElement::from_terms(
            self.algebra().dim(),
            BasisMode::Plain,
            v.iter().enumerate().map(|(i, c)| (self.basis[i].clone(), c.clone())),
        )
    }
}

fn check_filtration(algebra: &LieAlgebra, w: &WeightStructure) -> Result<WeightReport, PbwError> {
    if w.weights.len() != algebra.dim() {
        return Err(PbwError::WeightLength { expected: algebra.dim(), got: w.weights.len() });
    }
    if w.weights.contains(&0) {
        return Err(PbwError::NonPositiveWeight);
    }
    // a grading is in particular a filtration; J_{W+1} only needs the latter
    Ok(verify_weight_structure(algebra, &WeightStructure::filtration(w.weights.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lie::WeightStructure;
    use crate::{rat, ratio};

    fn mono(a: &[u32]) -> UElement {
        UElement::monomial(a.to_vec(), rat(1), BasisMode::Plain)
    }

    #[test]
    fn heisenberg_products() {
        let p = Pbw::new(corpus::heisenberg3());
        let e1 = UElement::generator(3, 0);
        let e2 = UElement::generator(3, 1);
        assert_eq!(p.product(&e2, &e1), mono(&[1, 1, 0]).sub(&mono(&[0, 0, 1])));
        assert_eq!(p.product(&e1, &e2), mono(&[1, 1, 0]));
        let lhs = p.product(&mono(&[0, 2, 0]), &e1);
        assert_eq!(lhs, mono(&[1, 2, 0]).sub(&mono(&[0, 1, 1]).scale(&rat(2))));
    }

    #[test]
    fn weights_and_basis() {
        assert_eq!(weight_of(&[1, 1, 1], &[1, 1, 2]), 4);
        assert_eq!(weight_of(&[0, 0, 0], &[1, 1, 2]), 0);
        assert_eq!(weight_of(&[0, 0, 0, 0, 0, 0, 1], &[1, 1, 2, 3, 4, 5, 6]), 6);
        let b = quotient_basis(&[1, 1, 2], 2);
        let expect: Vec<MultiIndex> =
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![0, 0, 1]];
        assert_eq!(b, expect);
        assert_eq!(quotient_basis(&[1, 1, 2], 0), vec![vec![0, 0, 0]]);
        assert_eq!(quotient_basis(&[1, 1], 2).len(), 6);
    }

    #[test]
    fn reduction() {
        let w = [1, 1, 2];
        let x = mono(&[1, 1, 0]).sub(&mono(&[0, 0, 1]));
        assert!(reduce_mod(&x, &w, 1).is_zero());
        let y = UElement::one(3).add(&UElement::generator(3, 0));
        assert_eq!(reduce_mod(&y, &w, 0), UElement::one(3));
        let ctx = TruncationContext::new(&corpus::heisenberg3(), &WeightStructure::grading(w.to_vec()), 2).unwrap();
        let z = ctx.product(&mono(&[0, 2, 0]), &UElement::generator(3, 0));
        assert!(z.is_zero());
    }

    #[test]
    fn divided_round_trip() {
        let x = UElement::from_terms(2, BasisMode::Plain, [(vec![2, 1], ratio(3, 4)), (vec![0, 3], rat(-2))]);
        let d = x.to_divided();
        assert_eq!(d.coefficient(&[2, 1]), ratio(3, 2));
        assert_eq!(d.coefficient(&[0, 3]), rat(-12));
        assert_eq!(d.to_plain(), x);
    }

    #[test]
    fn sl2_word() {
        // basis h, e, f with [e,f] = h: f e = e f - h
        let p = Pbw::new(corpus::sl2());
        assert_eq!(p.word(&[2, 1]), mono(&[0, 1, 1]).sub(&mono(&[1, 0, 0])));
        // e h = h e - 2 e
        assert_eq!(p.word(&[1, 0]), mono(&[1, 1, 0]).sub(&mono(&[0, 1, 0]).scale(&rat(2))));
    }

    #[test]
    fn invalid_weights_rejected() {
        let r = TruncationContext::new(&corpus::sl2(), &WeightStructure::filtration(vec![1, 1, 1]), 2);
        assert!(matches!(r, Err(PbwError::InvalidWeights(_))));
        assert_eq!(default_weights(&corpus::sl2(), None).unwrap_err(), PbwError::WeightsRequired);
        assert_eq!(default_weights(&corpus::favre7(), None).unwrap().weights, vec![1, 1, 2, 3, 4, 5, 6]);
    }
}

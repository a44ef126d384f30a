//! Weight sequences `M_α`, the seminorms `‖x‖_r` they define on U(g),
//! the homogeneous norm with its dilations, and graded submultiplicative
//! seminorms built from a quotient `U/J_{n+1}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lie::{LieAlgebra, WeightKind, WeightStructure};
use crate::linalg::dense_rank;
use crate::pbw::{degree, multi_factorial, quotient_basis, weight_of, MultiIndex, PbwError, TruncationContext, UElement};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightFamily {
    /// `M_α = |α|^{-|α|}` with `0^0 = 1`.
    Factorial,
    /// `M_α = 1`.
    Ones,
    /// Explicit values; multi-indices missing from the table are undefined.
    Custom(BTreeMap<MultiIndex, Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSequence {
    pub family: WeightFamily,
    pub weights: Vec<u32>,
}

impl WeightSequence {
    pub fn factorial(n: usize) -> Self {
        WeightSequence { family: WeightFamily::Factorial, weights: vec![1; n] }
    }

    pub fn ones(weights: Vec<u32>) -> Self {
        WeightSequence { family: WeightFamily::Ones, weights }
    }

    pub fn custom(weights: Vec<u32>, table: BTreeMap<MultiIndex, Rational>) -> Self {
        WeightSequence { family: WeightFamily::Custom(table), weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn value(&self, alpha: &[u32]) -> Option<Rational> {
        match &self.family {
            WeightFamily::Factorial => {
                let n = degree(alpha);
                let p: BigInt = BigInt::from(n).pow(n as u32);
                Some(Rational::new(BigInt::one(), p))
            }
            WeightFamily::Ones => Some(Rational::one()),
            WeightFamily::Custom(t) => t.get(alpha).cloned(),
        }
    }

    fn weight(&self, alpha: &[u32]) -> u64 {
        weight_of(alpha, &self.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmultiplicativityViolation {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub gamma: MultiIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSequenceReport {
    pub cutoff: u64,
    pub m0_is_one: bool,
    pub positive: bool,
    /// Multi-indices of weight at most the cutoff missing from a custom table.
    pub undefined: Vec<MultiIndex>,
    pub pairs_checked: usize,
    pub violations: Vec<SubmultiplicativityViolation>,
}

impl WeightSequenceReport {
    pub fn is_valid(&self) -> bool {
        self.m0_is_one && self.positive && self.undefined.is_empty() && self.violations.is_empty()
    }
}

/// Checks `M_γ ≤ M_α M_β` whenever `w(γ) ≥ w(α) + w(β)`, all weights at
/// most `cutoff`.
///
/// For each pair only the largest `M_γ` over admissible `γ` matters, so the
/// scan uses suffix maxima over weight shells.
pub fn validate_weight_sequence(m: &WeightSequence, cutoff: u64) -> WeightSequenceReport {
    let basis = quotient_basis(&m.weights, cutoff);
    let mut undefined = Vec::new();
    let mut values = Vec::with_capacity(basis.len());
    for a in &basis {
        match m.value(a) {
            Some(v) => values.push(v),
            None => {
                undefined.push(a.clone());
                values.push(Rational::zero());
            }
        }
    }
    let zero = vec![0; m.dim()];
    let m0_is_one = m.value(&zero).is_some_and(|v| v.is_one());
    let positive = values.iter().zip(&basis).all(|(v, a)| v.is_positive() || undefined.contains(a));

    // argmax of M_γ over shells of weight ≥ s
    let top = cutoff as usize;
    let mut shell_max: Vec<Option<usize>> = vec![None; top + 2];
    for (idx, a) in basis.iter().enumerate() {
        let w = m.weight(a) as usize;
        if shell_max[w].is_none_or(|b| values[idx] > values[b]) {
            shell_max[w] = Some(idx);
        }
    }
    for w in (0..=top).rev() {
        if let Some(b) = shell_max[w + 1] {
            if shell_max[w].is_none_or(|a| values[b] > values[a]) {
                shell_max[w] = Some(b);
            }
        }
    }

    let mut violations = Vec::new();
    let mut pairs = 0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let s = m.weight(a) + m.weight(b);
            if s > cutoff {
                continue;
            }
            pairs += 1;
            if let Some(g) = shell_max[s as usize] {
                if values[g] > &values[i] * &values[j] {
                    violations.push(SubmultiplicativityViolation {
                        alpha: a.clone(),
                        beta: b.clone(),
                        gamma: basis[g].clone(),
                    });
                }
            }
        }
    }
    WeightSequenceReport { cutoff, m0_is_one, positive, undefined, pairs_checked: pairs, violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entireness {
    Entire,
    NotEntire,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntireRow {
    pub r: Rational,
    /// `Σ_{w(α)=k} M_α r^k` for `k = 0..=cutoff`.
    pub shell_sums: Vec<Rational>,
    pub partial_sums: Vec<Rational>,
    /// Consecutive shell ratios, `None` where the earlier shell is zero.
    pub ratios: Vec<Option<Rational>>,
    /// Shell sums never decrease over the window, so the series cannot be
    /// seen converging. Diagnostic only.
    pub divergence_evidence: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntireDiagnostics {
    pub cutoff: u64,
    pub rows: Vec<EntireRow>,
    /// Known verdict for the two closed-form families; custom tables get none.
    pub known_verdict: Option<Entireness>,
}

pub fn entire_diagnostics(m: &WeightSequence, rs: &[Rational], cutoff: u64) -> EntireDiagnostics {
    let basis = quotient_basis(&m.weights, cutoff);
    let mut shells = vec![Rational::zero(); cutoff as usize + 1];
    for a in &basis {
        if let Some(v) = m.value(a) {
            shells[m.weight(a) as usize] += v;
        }
    }
    let rows = rs
        .iter()
        .map(|r| {
            let mut power = Rational::one();
            let mut shell_sums = Vec::with_capacity(shells.len());
            for s in &shells {
                shell_sums.push(s * &power);
                power *= r;
            }
            let mut acc = Rational::zero();
            let partial_sums = shell_sums
                .iter()
                .map(|s| {
                    acc += s;
                    acc.clone()
                })
                .collect();
            let ratios: Vec<Option<Rational>> = shell_sums
                .windows(2)
                .map(|w| (!w[0].is_zero()).then(|| &w[1] / &w[0]))
                .collect();
            let divergence_evidence = shell_sums.len() > 1
                && shell_sums.iter().any(|s| s.is_positive())
                && shell_sums.windows(2).all(|w| w[1] >= w[0]);
            EntireRow { r: r.clone(), shell_sums, partial_sums, ratios, divergence_evidence }
        })
        .collect();
    let known_verdict = match m.family {
        WeightFamily::Factorial => Some(Entireness::Entire),
        WeightFamily::Ones => Some(Entireness::NotEntire),
        WeightFamily::Custom(_) => None,
    };
    EntireDiagnostics { cutoff, rows, known_verdict }
}

/// `‖x‖_r = Σ |c_α| α! M_α r^{w(α)}` over the plain PBW coefficients of `x`.
/// Returns `None` if a custom table lacks a needed value.
pub fn seminorm_eval(x: &UElement, m: &WeightSequence, r: &Rational) -> Option<Rational> {
    let plain = x.to_plain();
    let mut s = Rational::zero();
    for (a, c) in plain.terms() {
        let ma = m.value(a)?;
        let rw = r.pow(m.weight(a) as i32);
        s += c.abs() * Rational::from_integer(multi_factorial(a)) * ma * rw;
    }
    Some(s)
}

/// `‖f‖'_r = Σ |c_α| r^{|α|}` on polynomials written in the plain basis.
pub fn taylor_seminorm(x: &UElement, r: &Rational) -> Rational {
    x.to_plain()
        .terms()
        .map(|(a, c)| c.abs() * r.pow(degree(a) as i32))
        .fold(Rational::zero(), |s, t| s + t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorialComparison {
    pub nvars: usize,
    pub cutoff: u64,
    pub constant: u64,
    pub checked: usize,
    /// Multi-indices where `α! ≤ |α|^{|α|} ≤ C^{|α|} α!` fails.
    pub failures: Vec<MultiIndex>,
}

impl FactorialComparison {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Integer check of `α! ≤ |α|^{|α|} ≤ (3N)^{|α|} α!` for all `|α| ≤ cutoff`.
pub fn factorial_comparison_check(nvars: usize, cutoff: u64) -> FactorialComparison {
    let c = 3 * nvars as u64;
    let mut failures = Vec::new();
    let basis = quotient_basis(&vec![1; nvars], cutoff);
    for a in &basis {
        let n = degree(a) as u32;
        let fact = multi_factorial(a);
        let nn = BigInt::from(n).pow(n);
        let bound = BigInt::from(c).pow(n) * &fact;
        if !(fact <= nn && nn <= bound) {
            failures.push(a.clone());
        }
    }
    FactorialComparison { nvars, cutoff, constant: c, checked: basis.len(), failures }
}

/// The nonnegative real `radicand^{1/index}`, compared exactly by cross powers.
#[derive(Clone, Debug)]
pub struct RootValue {
    pub radicand: Rational,
    pub index: u32,
}

impl RootValue {
    pub fn new(radicand: Rational, index: u32) -> Self {
        assert!(index > 0 && !radicand.is_negative());
        RootValue { radicand, index }.simplified()
    }

    pub fn rational(x: Rational) -> Self {
        RootValue::new(x.abs(), 1)
    }

    fn simplified(self) -> Self {
        if self.index == 1 {
            return self;
        }
        match exact_root(&self.radicand, self.index) {
            Some(q) => RootValue { radicand: q, index: 1 },
            None => self,
        }
    }

    /// The value as a rational, when it is one.
    pub fn as_rational(&self) -> Option<Rational> {
        (self.index == 1).then(|| self.radicand.clone())
    }

    /// `|z|·v`.
    pub fn scale(&self, z: &Rational) -> RootValue {
        RootValue::new(&self.radicand * z.abs().pow(self.index as i32), self.index)
    }
}

fn exact_root(x: &Rational, k: u32) -> Option<Rational> {
    let root = |n: &BigInt| -> Option<BigInt> {
        let u: BigUint = n.magnitude().clone();
        let r = u.nth_root(k);
        (r.pow(k) == u).then(|| BigInt::from(r))
    };
    Some(Rational::new(root(x.numer())?, root(x.denom())?))
}

impl Ord for RootValue {
    fn cmp(&self, other: &Self) -> Ordering {
        // a^{1/p} vs b^{1/q}  ⇔  a^q vs b^p
        let lhs = self.radicand.pow(other.index as i32);
        let rhs = other.radicand.pow(self.index as i32);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for RootValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for RootValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RootValue {}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 1 {
            write!(f, "{}", self.radicand)
        } else {
            write!(f, "({})^(1/{})", self.radicand, self.index)
        }
    }
}

/// `|g| = max_i |t_i|^{1/w_i}` in exponential coordinates.
pub fn homogeneous_norm(t: &[Rational], weights: &[u32]) -> RootValue {
    assert_eq!(t.len(), weights.len(), "coordinate length");
    t.iter()
        .zip(weights)
        .map(|(x, &w)| RootValue::new(x.abs(), w))
        .max()
        .unwrap_or_else(|| RootValue::rational(Rational::zero()))
}

/// `δ_z`: scales `t_i` by `z^{w_i}`.
pub fn dilate(t: &[Rational], weights: &[u32], z: &Rational) -> Vec<Rational> {
    t.iter().zip(weights).map(|(x, &w)| x * z.pow(w as i32)).collect()
}

/// `p_i(a) = s_i ‖τ_{n+1}(a)‖` with `‖·‖` the ℓ¹ operator norm of left
/// multiplication on `U/J_{n+1}` in the PBW basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeminorm {
    pub designated: u64,
    /// Per-degree scale; degrees beyond the list use scale 1.
    pub scales: Vec<Rational>,
}

impl GradedSeminorm {
    pub fn quotient(n: u64) -> Self {
        GradedSeminorm { designated: n, scales: Vec::new() }
    }

    pub fn zero(n: u64, max_degree: u64) -> Self {
        GradedSeminorm { designated: n, scales: vec![Rational::zero(); max_degree as usize + 1] }
    }

    pub fn with_scale(mut self, degree: u64, s: Rational) -> Self {
        let d = degree as usize;
        if self.scales.len() <= d {
            self.scales.resize(d + 1, Rational::one());
        }
        self.scales[d] = s;
        self
    }

    pub fn scale(&self, degree: u64) -> Rational {
        self.scales.get(degree as usize).cloned().unwrap_or_else(Rational::one)
    }
}

fn l1_operator_norm(ctx: &TruncationContext, x: &[(usize, Rational)]) -> Rational {
    let mut best = Rational::zero();
    for b in 0..ctx.dim() {
        let mut col: BTreeMap<usize, Rational> = BTreeMap::new();
        for (a, c) in x {
            for (k, v) in ctx.mul_basis(*a, b) {
                *col.entry(k).or_insert_with(Rational::zero) += c * v;
            }
        }
        let s = col.values().map(Signed::abs).fold(Rational::zero(), |s, t| s + t);
        if s > best {
            best = s;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeminormViolation {
    pub left: String,
    pub right: String,
    pub product_norm: Rational,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeminormReport {
    pub designated: u64,
    pub cutoff: u64,
    pub pairs_checked: usize,
    pub violations: Vec<SeminormViolation>,
    /// `p_n` is a norm on the degree-`n` component.
    pub norm_at_designated: bool,
}

impl GradedSeminormReport {
    pub fn submultiplicative(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.submultiplicative() && self.norm_at_designated
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SeminormError {
    #[error("a grading of the algebra is required")]
    GradingRequired,
    #[error(transparent)]
    Pbw(#[from] PbwError),
}

/// Checks `p_{i+j}(ab) ≤ p_i(a) p_j(b)` on all homogeneous basis pairs with
/// `i + j ≤ cutoff` plus a fixed-seed sample of homogeneous combinations,
/// and that `p_n` is a norm on `U^n`.
pub fn validate_graded_seminorm(
    a: &LieAlgebra,
    ws: &WeightStructure,
    p: &GradedSeminorm,
    cutoff: u64,
) -> Result<GradedSeminormReport, SeminormError> {
    if ws.kind != WeightKind::Grading {
        return Err(SeminormError::GradingRequired);
    }
    let ctx = TruncationContext::new(a, ws, p.designated)?;
    let w = ctx.weights().to_vec();
    let all = quotient_basis(&w, cutoff);
    let shells: Vec<Vec<MultiIndex>> =
        (0..=cutoff).map(|k| all.iter().filter(|m| weight_of(m, &w) == k).cloned().collect()).collect();

    let engine = ctx.engine();
    let norm = |deg: u64, x: &UElement| -> Rational {
        let v: Vec<(usize, Rational)> =
            ctx.reduce(x).terms().filter_map(|(m, c)| ctx.index_of(m).map(|i| (i, c.clone()))).collect();
        p.scale(deg) * l1_operator_norm(&ctx, &v)
    };
    let label = |x: &UElement| x.to_string();

    let mut samples: Vec<(u64, UElement)> = Vec::new();
    for (k, shell) in shells.iter().enumerate() {
        for m in shell {
            samples.push((k as u64, UElement::monomial(m.clone(), Rational::one(), crate::pbw::BasisMode::Plain)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (k, shell) in shells.iter().enumerate() {
        if shell.len() < 2 {
            continue;
        }
        for _ in 0..2 {
            let terms = shell.iter().map(|m| (m.clone(), Rational::from_integer(rng.gen_range(-3..=3).into())));
            let x = UElement::from_terms(a.dim(), crate::pbw::BasisMode::Plain, terms);
            if !x.is_zero() {
                samples.push((k as u64, x));
            }
        }
    }

    let mut violations = Vec::new();
    let mut pairs = 0;
    for (i, x) in &samples {
        for (j, y) in &samples {
            if i + j > cutoff {
                continue;
            }
            pairs += 1;
            let lhs = norm(i + j, &engine.product(x, y));
            let rhs = norm(*i, x) * norm(*j, y);
            if lhs > rhs {
                violations.push(SeminormViolation { left: label(x), right: label(y), product_norm: lhs, bound: rhs });
            }
        }
    }

    let n = p.designated;
    let component: Vec<MultiIndex> = quotient_basis(&w, n).into_iter().filter(|m| weight_of(m, &w) == n).collect();
    let vectors: Vec<Vec<Rational>> = component
        .iter()
        .map(|m| ctx.to_vector(&UElement::monomial(m.clone(), Rational::one(), crate::pbw::BasisMode::Plain)))
        .collect();
    let injective = dense_rank(&vectors) == component.len();
    let norm_at_designated = p.scale(n).is_positive() && injective;

    Ok(GradedSeminormReport { designated: n, cutoff, pairs_checked: pairs, violations, norm_at_designated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::pbw::BasisMode;
    use crate::{rat, ratio};

    fn brute_force_valid(m: &WeightSequence, cutoff: u64) -> bool {
        let b = quotient_basis(&m.weights, cutoff);
        for a in &b {
            for c in &b {
                for g in &b {
                    let (wa, wc, wg) = (m.weight(a), m.weight(c), m.weight(g));
                    if wg >= wa + wc && m.value(g).unwrap() > m.value(a).unwrap() * m.value(c).unwrap() {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn named_families_validate() {
        let f = WeightSequence::factorial(1);
        assert!(validate_weight_sequence(&f, 8).is_valid());
        assert!(validate_weight_sequence(&WeightSequence::factorial(2), 8).is_valid());
        assert!(validate_weight_sequence(&WeightSequence::ones(vec![1, 1, 2]), 6).is_valid());
        assert!(brute_force_valid(&WeightSequence::factorial(2), 5));
    }

    #[test]
    fn custom_counterexample() {
        let table: BTreeMap<MultiIndex, Rational> =
            [(vec![0], rat(1)), (vec![1], ratio(1, 2)), (vec![2], rat(1))].into_iter().collect();
        let m = WeightSequence::custom(vec![1], table);
        let r = validate_weight_sequence(&m, 2);
        assert!(!r.is_valid());
        assert!(!brute_force_valid(&m, 2));
        assert_eq!(r.violations[0].gamma, vec![2]);
    }

    #[test]
    fn entire_diagnostics_examples() {
        let ones = entire_diagnostics(&WeightSequence::ones(vec![1]), &[rat(1), rat(0)], 10);
        assert!(ones.rows[0].divergence_evidence);
        assert!(ones.rows[0].shell_sums.iter().all(|s| *s == rat(1)));
        assert_eq!(ones.rows[1].partial_sums.last().unwrap(), &rat(1));
        assert_eq!(ones.known_verdict, Some(Entireness::NotEntire));
        let fact = entire_diagnostics(&WeightSequence::factorial(1), &[rat(1)], 6);
        assert!(!fact.rows[0].divergence_evidence);
        assert_eq!(fact.rows[0].shell_sums[3], ratio(1, 27));
        assert_eq!(fact.known_verdict, Some(Entireness::Entire));
    }

    #[test]
    fn seminorm_examples() {
        let ones = WeightSequence::ones(vec![1, 1, 2]);
        assert_eq!(seminorm_eval(&UElement::one(3), &ones, &rat(5)), Some(rat(1)));
        let x = UElement::generator(3, 0).add(&UElement::generator(3, 2));
        assert_eq!(seminorm_eval(&x, &ones, &rat(2)), Some(rat(6)));
        let sq = UElement::monomial(vec![2, 0, 0], rat(1), BasisMode::Plain);
        assert_eq!(seminorm_eval(&sq, &ones, &rat(1)), Some(rat(2)));
    }

    #[test]
    fn factorial_comparison_examples() {
        let c = factorial_comparison_check(1, 10);
        assert!(c.holds());
        assert_eq!(c.constant, 3);
        assert!(factorial_comparison_check(2, 10).holds());
    }

    #[test]
    fn homogeneous_norm_examples() {
        let w = [1, 1, 2];
        let t = [rat(3), rat(0), rat(4)];
        let g = homogeneous_norm(&t, &w);
        assert_eq!(g.as_rational(), Some(rat(3)));
        let d = homogeneous_norm(&dilate(&t, &w, &rat(2)), &w);
        assert_eq!(d.as_rational(), Some(rat(6)));
        assert_eq!(homogeneous_norm(&[rat(0), rat(0), rat(0)], &w).as_rational(), Some(rat(0)));
        let irr = homogeneous_norm(&[rat(1), rat(0), rat(3)], &w);
        assert_eq!(irr.as_rational(), None);
        assert_eq!(irr.to_string(), "(3)^(1/2)");
        assert!(irr > RootValue::rational(rat(1)));
        assert!(irr < RootValue::rational(rat(2)));
    }

    #[test]
    fn quotient_seminorm_on_h3() {
        let a = corpus::heisenberg3();
        let ws = WeightStructure::grading(vec![1, 1, 2]);
        let r = validate_graded_seminorm(&a, &ws, &GradedSeminorm::quotient(2), 3).unwrap();
        assert!(r.holds(), "{:?}", r.violations);
        let z = validate_graded_seminorm(&a, &ws, &GradedSeminorm::zero(2, 3), 3).unwrap();
        assert!(z.submultiplicative());
        assert!(!z.norm_at_designated);
        let bad = GradedSeminorm::quotient(2).with_scale(2, rat(3));
        let r = validate_graded_seminorm(&a, &ws, &bad, 3).unwrap();
        assert!(!r.submultiplicative());
        assert!(r.violations.iter().any(|v| v.left == "e1" && v.right == "e2"));
    }
}

//! The polynomial dual of the enveloping algebra.
//!
//! A continuous functional `f` on U(g) is stored by its values on the divided
//! basis `e_α = e^α/α!`; `kappa` sends it to `Σ f(e_α) z^α`. The left action
//! `(X·a)(x) = a(x X)` makes the polynomials a g-module by derivations, and
//! the matrix `φ_ij = e_i·z_j` is the parallelizability certificate.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::hopf::coproduct;
use crate::linalg::Matrix;
use crate::pbw::{degree, multi_factorial, quotient_basis, weight_of, BasisMode, MultiIndex, PbwError, TruncationContext, UElement};
use crate::poly::{monomials_up_to, Poly};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualError {
    #[error("cutoff {cutoff} too small: weight {required} is needed")]
    CutoffTooSmall { required: u64, cutoff: u64 },
    #[error("expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator index {0} out of range")]
    Generator(usize),
    #[error("prerequisite failed: {0}")]
    Prerequisite(String),
    #[error(transparent)]
    Pbw(#[from] PbwError),
}

/// Values on the divided basis; absent multi-indices are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualFunctional {
    dim: usize,
    values: BTreeMap<MultiIndex, Rational>,
}

impl DualFunctional {
    pub fn zero(dim: usize) -> Self {
        DualFunctional { dim, values: BTreeMap::new() }
    }

    /// The counit: 1 on `e_0`, 0 elsewhere.
    pub fn counit(dim: usize) -> Self {
        DualFunctional::dual_basis(vec![0; dim])
    }

    pub fn dual_basis(alpha: MultiIndex) -> Self {
        DualFunctional::from_values(alpha.len(), [(alpha, Rational::one())])
    }

    pub fn from_values(dim: usize, values: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut f = DualFunctional::zero(dim);
        for (a, c) in values {
            assert_eq!(a.len(), dim, "multi-index length");
            let e = f.values.entry(a.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                f.values.remove(&a);
            }
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.values.iter()
    }

    /// `f(e_α)`.
    pub fn value(&self, alpha: &[u32]) -> Rational {
        self.values.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest `|α|` in the support.
    pub fn degree(&self) -> Option<u64> {
        self.values.keys().map(|a| degree(a)).max()
    }

    pub fn evaluate(&self, x: &UElement) -> Rational {
        let d = x.to_divided();
        d.terms().map(|(a, c)| c * self.value(a)).fold(Rational::zero(), |s, t| s + t)
    }

    /// The convolution `(f*g)(x) = Σ f(x_(1)) g(x_(2))`.
    ///
    /// Evaluated on every plain monomial `e^γ` with `|γ| ≤ deg f + deg g`
    /// through the coproduct, then rescaled to the divided basis.
    pub fn convolve(&self, other: &DualFunctional) -> DualFunctional {
        assert_eq!(self.dim, other.dim);
        let (Some(df), Some(dg)) = (self.degree(), other.degree()) else {
            return DualFunctional::zero(self.dim);
        };
        let mut out = Vec::new();
        for gamma in monomials_up_to(self.dim, df + dg) {
            let x = UElement::monomial(gamma.clone(), Rational::one(), BasisMode::Plain);
            let mut s = Rational::zero();
            for ((a, b), c) in coproduct(&x) {
                let fa = self.value(&a);
                if fa.is_zero() {
                    continue;
                }
                let gb = other.value(&b);
                if gb.is_zero() {
                    continue;
                }
                // values are stored on e_α; plain e^α carries an extra α!
                let scale = Rational::from_integer(multi_factorial(&a) * multi_factorial(&b));
                s += c * fa * gb * scale;
            }
            if !s.is_zero() {
                let g_fact = Rational::from_integer(multi_factorial(&gamma));
                out.push((gamma, s / g_fact));
            }
        }
        DualFunctional::from_values(self.dim, out)
    }
}

pub fn kappa(f: &DualFunctional) -> Poly {
    Poly::from_terms(f.dim, f.values.iter().map(|(a, c)| (a.clone(), c.clone())))
}

pub fn kappa_inverse(p: &Poly) -> DualFunctional {
    DualFunctional::from_values(p.nvars(), p.terms().map(|(a, c)| (a.clone(), c.clone())))
}

/// `⟨e^α, ψ⟩ = D^α ψ(0) = α!` times the coefficient of `z^α`.
pub fn dual_pairing(alpha: &[u32], psi: &Poly) -> Rational {
    assert_eq!(alpha.len(), psi.nvars(), "multi-index length");
    psi.coefficient(alpha) * Rational::from_integer(multi_factorial(alpha))
}

/// Truncation cutoff at which every coefficient of `e_i·a` is resolved.
pub fn required_cutoff(weights: &[u32], a: &Poly) -> u64 {
    a.terms().map(|(b, _)| weight_of(b, weights)).max().unwrap_or(0)
}

/// `e_i·a`, with coefficient at `z^α` equal to `a(e_α e_i)`.
pub fn dual_action(ctx: &TruncationContext, i: usize, a: &Poly) -> Result<Poly, DualError> {
    let n = ctx.algebra().dim();
    if a.nvars() != n {
        return Err(DualError::DimensionMismatch { expected: n, got: a.nvars() });
    }
    if i >= n {
        return Err(DualError::Generator(i));
    }
    let w = ctx.weights();
    let top = required_cutoff(w, a);
    if top > ctx.cutoff() {
        return Err(DualError::CutoffTooSmall { required: top, cutoff: ctx.cutoff() });
    }
    let wi = u64::from(w[i]);
    let mut out = Poly::zero(n);
    if a.is_zero() || top < wi {
        return Ok(out);
    }
    for alpha in quotient_basis(w, top - wi) {
        let mut s = Rational::zero();
        for (beta, c) in ctx.engine().mul_generator(&alpha, i).iter() {
            let ab = a.coefficient(beta);
            if !ab.is_zero() {
                s += c * ab * Rational::from_integer(multi_factorial(beta));
            }
        }
        if !s.is_zero() {
            let af = Rational::from_integer(multi_factorial(&alpha));
            out.add_term(alpha, s / af);
        }
    }
    Ok(out)
}

type PolyMatrix = Vec<Vec<Poly>>;

fn poly_matrix_mul(a: &PolyMatrix, b: &PolyMatrix, nvars: usize, cap: u64) -> PolyMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Poly::zero(nvars), |s, k| s.add(&a[i][k].mul(&b[k][j]).truncate_degree(cap)))
                })
                .collect()
        })
        .collect()
}

fn poly_identity(n: usize) -> PolyMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Poly::one(n) } else { Poly::zero(n) }).collect()).collect()
}

/// Matrix of `e_i·z_j`, untruncated.
pub fn phi_matrix(ctx: &TruncationContext) -> Result<PolyMatrix, DualError> {
    let n = ctx.algebra().dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(dual_action(ctx, i, &Poly::var(n, j))?);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct ParallelizabilityCertificate {
    pub degree_bound: u64,
    pub cutoff: u64,
    /// `φ_ij = e_i·z_j` truncated at degree `D`.
    pub phi: PolyMatrix,
    pub unitriangular: bool,
    /// `φ^{-1}` computed modulo monomials of degree above `D`.
    pub inverse: Option<PolyMatrix>,
    /// `∂_k(z_j) = δ_kj` for `∂ = φ^{-1} d^0`.
    pub partials_dual: bool,
    pub violations: Vec<String>,
}

impl ParallelizabilityCertificate {
    pub fn holds(&self) -> bool {
        self.unitriangular && self.partials_dual
    }
}

pub fn parallelizability_certificate(ctx: &TruncationContext, degree_bound: u64) -> Result<ParallelizabilityCertificate, DualError> {
    let n = ctx.algebra().dim();
    let phi: PolyMatrix = phi_matrix(ctx)?
        .into_iter()
        .map(|row| row.into_iter().map(|p| p.truncate_degree(degree_bound)).collect())
        .collect();
    let mut violations = Vec::new();
    let labels = ctx.algebra().labels();
    for i in 0..n {
        for j in 0..n {
            let ok = match i.cmp(&j) {
                std::cmp::Ordering::Greater => phi[i][j].is_zero(),
                std::cmp::Ordering::Equal => phi[i][j] == Poly::one(n),
                std::cmp::Ordering::Less => true,
            };
            if !ok {
                violations.push(format!("{}.z{} = {}", labels[i], j + 1, phi[i][j]));
            }
        }
    }
    let unitriangular = violations.is_empty();
    let mut inverse = None;
    let mut partials_dual = false;
    if unitriangular {
        // φ = 1 + N with N strictly upper triangular, so φ^{-1} = Σ (-N)^k
        let neg_n: PolyMatrix = (0..n)
            .map(|i| (0..n).map(|j| if j > i { phi[i][j].scale(&-Rational::one()) } else { Poly::zero(n) }).collect())
            .collect();
        let mut inv = poly_identity(n);
        let mut power = poly_identity(n);
        for _ in 1..n {
            power = poly_matrix_mul(&power, &neg_n, n, degree_bound);
            for i in 0..n {
                for j in 0..n {
                    inv[i][j] = inv[i][j].add(&power[i][j]);
                }
            }
        }
        partials_dual = true;
        for k in 0..n {
            for j in 0..n {
                let mut s = Poly::zero(n);
                for i in 0..n {
                    let act = dual_action(ctx, i, &Poly::var(n, j))?;
                    s = s.add(&inv[k][i].mul(&act).truncate_degree(degree_bound));
                }
                let expected = if k == j { Poly::one(n) } else { Poly::zero(n) };
                if s != expected {
                    partials_dual = false;
                    violations.push(format!("d{}(z{}) = {}", k + 1, j + 1, s));
                }
            }
        }
        inverse = Some(inv);
    }
    Ok(ParallelizabilityCertificate {
        degree_bound,
        cutoff: ctx.cutoff(),
        phi,
        unitriangular,
        inverse,
        partials_dual,
        violations,
    })
}

/// Cutoff needed to act on every polynomial of degree at most `d`.
pub fn cutoff_for_degree(weights: &[u32], d: u64) -> u64 {
    d * weights.iter().copied().max().map(u64::from).unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeIsoCertificate {
    pub degree_bound: u64,
    pub polynomials_checked: usize,
    pub forms_checked: usize,
    /// `e_i·a = Σ_j φ_ij ∂a/∂z_j`.
    pub degree0: bool,
    /// The coboundary of the cochain of `f dz_j` is the cochain of `df ∧ dz_j`.
    pub degree1: bool,
    pub failures: Vec<String>,
}

impl CeIsoCertificate {
    pub fn holds(&self) -> bool {
        self.degree0 && self.degree1
    }
}

/// Compares the Chevalley–Eilenberg differential of the polynomial module
/// with the de Rham differential transported through `φ`, in degrees 0 and 1,
/// on all monomials of degree at most `D`.
pub fn ce_iso_de_rham_check(ctx: &TruncationContext, degree_bound: u64) -> Result<CeIsoCertificate, DualError> {
    let n = ctx.algebra().dim();
    let w = ctx.weights();
    let need = cutoff_for_degree(w, degree_bound);
    if need > ctx.cutoff() {
        return Err(DualError::CutoffTooSmall { required: need, cutoff: ctx.cutoff() });
    }
    let pc = parallelizability_certificate(ctx, degree_bound)?;
    if !pc.holds() {
        return Err(DualError::Prerequisite(format!("parallelizability: {}", pc.violations.join("; "))));
    }
    let phi = phi_matrix(ctx)?;
    let a = ctx.algebra();
    let mut failures = Vec::new();
    let monomials = monomials_up_to(n, degree_bound);

    for alpha in &monomials {
        let f = Poly::monomial(alpha.clone(), Rational::one());
        for i in 0..n {
            let lhs = dual_action(ctx, i, &f)?;
            let rhs = (0..n).fold(Poly::zero(n), |s, j| s.add(&phi[i][j].mul(&f.derivative(j))));
            if lhs != rhs {
                failures.push(format!("degree 0: e{}.{} = {} but φ∂ gives {}", i + 1, f, lhs, rhs));
            }
        }
    }
    let degree0 = failures.is_empty();

    // cochain of f dz_j is X_i ↦ f φ_ij
    let mut forms = 0;
    for alpha in monomials.iter().filter(|a| degree(a) < degree_bound) {
        let f = Poly::monomial(alpha.clone(), Rational::one());
        for j in 0..n {
            forms += 1;
            let c: Vec<Poly> = (0..n).map(|i| f.mul(&phi[i][j])).collect();
            let df: Vec<Poly> = (0..n).map(|k| f.derivative(k)).collect();
            for p in 0..n {
                for q in p + 1..n {
                    let mut lhs = dual_action(ctx, p, &c[q])?.sub(&dual_action(ctx, q, &c[p])?);
                    for (k, coeff) in a.bracket(p, q) {
                        lhs = lhs.sub(&c[k].scale(&coeff));
                    }
                    // (df ∧ dz_j)(X_p, X_q) with dz_k(X_i) = φ_ik
                    let mut rhs = Poly::zero(n);
                    for k in 0..n {
                        if df[k].is_zero() {
                            continue;
                        }
                        let det = phi[p][k].mul(&phi[q][j]).sub(&phi[p][j].mul(&phi[q][k]));
                        rhs = rhs.add(&df[k].mul(&det));
                    }
                    if lhs != rhs {
                        failures.push(format!("degree 1: {} dz{} on (e{}, e{}): {} vs {}", f, j + 1, p + 1, q + 1, lhs, rhs));
                    }
                }
            }
        }
    }
    let degree1 = failures.iter().all(|s| s.starts_with("degree 0"));
    Ok(CeIsoCertificate {
        degree_bound,
        polynomials_checked: monomials.len(),
        forms_checked: forms,
        degree0,
        degree1,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocActCertificate {
    /// Constant term of `e_i·z_j`.
    pub constants: Matrix,
    pub identity: bool,
}

pub fn loc_act_check(ctx: &TruncationContext) -> Result<LocActCertificate, DualError> {
    let n = ctx.algebra().dim();
    let phi = phi_matrix(ctx)?;
    let constants: Matrix = phi.iter().map(|row| row.iter().map(Poly::constant_term).collect()).collect();
    let identity = constants
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, c)| *c == if i == j { Rational::one() } else { Rational::zero() }));
    debug_assert_eq!(constants.len(), n);
    Ok(LocActCertificate { constants, identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lie::{lower_central_weights, WeightStructure};
    use crate::{rat, ratio};

    fn ctx_for(a: &crate::lie::LieAlgebra, ws: &WeightStructure, w: u64) -> TruncationContext {
        TruncationContext::new(a, ws, w).unwrap()
    }

    fn z(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&DualFunctional::counit(2)), Poly::one(2));
        assert_eq!(kappa(&DualFunctional::dual_basis(vec![2, 1])), Poly::monomial(vec![2, 1], rat(1)));
        let f = DualFunctional::dual_basis(vec![1]);
        let ff = f.convolve(&f);
        assert_eq!(kappa(&ff), z(1, 0).mul(&z(1, 0)));
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(dual_pairing(&[1, 0], &z(2, 0)), rat(1));
        assert_eq!(dual_pairing(&[2, 0], &z(2, 0).mul(&z(2, 0))), rat(2));
        assert_eq!(dual_pairing(&[1, 0], &z(2, 1)), rat(0));
    }

    #[test]
    fn convolution_uses_divided_coproduct() {
        // ε is the unit for convolution
        let f = DualFunctional::from_values(2, [(vec![1, 2], ratio(3, 2)), (vec![0, 1], rat(-1))]);
        assert_eq!(f.convolve(&DualFunctional::counit(2)), f);
        let g = DualFunctional::from_values(2, [(vec![1, 0], rat(2))]);
        assert_eq!(kappa(&f.convolve(&g)), kappa(&f).mul(&kappa(&g)));
    }

    #[test]
    fn h3_actions() {
        let a = corpus::heisenberg3();
        let ws = WeightStructure::grading(vec![1, 1, 2]);
        let ctx = ctx_for(&a, &ws, 4);
        assert!(dual_action(&ctx, 0, &Poly::one(3)).unwrap().is_zero());
        assert_eq!(dual_action(&ctx, 0, &z(3, 2)).unwrap(), z(3, 1).scale(&rat(-1)));
        assert_eq!(dual_action(&ctx, 0, &z(3, 0)).unwrap(), Poly::one(3));
        let big = z(3, 2).mul(&z(3, 2)).mul(&z(3, 2));
        assert_eq!(
            dual_action(&ctx, 0, &big),
            Err(DualError::CutoffTooSmall { required: 6, cutoff: 4 })
        );
    }

    #[test]
    fn h3_phi() {
        let a = corpus::heisenberg3();
        let ws = WeightStructure::grading(vec![1, 1, 2]);
        let cert = parallelizability_certificate(&ctx_for(&a, &ws, 2), 2).unwrap();
        let minus_z2 = z(3, 1).scale(&rat(-1));
        let expected = vec![
            vec![Poly::one(3), Poly::zero(3), minus_z2.clone()],
            vec![Poly::zero(3), Poly::one(3), Poly::zero(3)],
            vec![Poly::zero(3), Poly::zero(3), Poly::one(3)],
        ];
        assert_eq!(cert.phi, expected);
        assert!(cert.holds(), "{:?}", cert.violations);
        let inv = cert.inverse.unwrap();
        assert_eq!(inv[0][2], z(3, 1));
    }

    #[test]
    fn abelian_phi_is_identity() {
        let a = corpus::abelian(3);
        let ws = WeightStructure::grading(vec![1, 1, 1]);
        let cert = parallelizability_certificate(&ctx_for(&a, &ws, 1), 3).unwrap();
        assert_eq!(cert.phi, poly_identity(3));
        let loc = loc_act_check(&ctx_for(&a, &ws, 1)).unwrap();
        assert!(loc.identity);
    }

    #[test]
    fn h3_loc_act() {
        let a = corpus::heisenberg3();
        let ws = WeightStructure::grading(vec![1, 1, 2]);
        let loc = loc_act_check(&ctx_for(&a, &ws, 2)).unwrap();
        assert!(loc.identity);
        assert_eq!(loc.constants[0][2], rat(0));
    }

    #[test]
    fn h3_ce_iso() {
        let a = corpus::heisenberg3();
        let ws = WeightStructure::grading(vec![1, 1, 2]);
        let ctx = ctx_for(&a, &ws, 6);
        let cert = ce_iso_de_rham_check(&ctx, 3).unwrap();
        assert!(cert.holds(), "{:?}", cert.failures);
        let d0: Vec<Poly> = (0..3).map(|i| dual_action(&ctx, i, &z(3, 2)).unwrap()).collect();
        assert_eq!(d0, vec![z(3, 1).scale(&rat(-1)), Poly::zero(3), Poly::one(3)]);
    }

    #[test]
    fn favre_phi_unitriangular() {
        let a = corpus::favre7();
        let ws = WeightStructure::filtration(vec![1, 1, 2, 3, 4, 5, 6]);
        let cert = parallelizability_certificate(&ctx_for(&a, &ws, 6), 3).unwrap();
        assert!(cert.holds(), "{:?}", cert.violations);
    }

    #[test]
    fn bracket_and_leibniz_on_h3() {
        let a = corpus::heisenberg3();
        let ws = WeightStructure::grading(lower_central_weights(&a).unwrap());
        let ctx = ctx_for(&a, &ws, 8);
        let p = z(3, 2).mul(&z(3, 0)).add(&z(3, 1).mul(&z(3, 1)));
        let q = z(3, 2).add(&z(3, 0).scale(&ratio(1, 3)));
        for i in 0..3 {
            let lhs = dual_action(&ctx, i, &p.mul(&q)).unwrap();
            let rhs = dual_action(&ctx, i, &p).unwrap().mul(&q).add(&p.mul(&dual_action(&ctx, i, &q).unwrap()));
            assert_eq!(lhs, rhs);
        }
        // e1·(e2·a) - e2·(e1·a) = [e1,e2]·a = e3·a
        let x = dual_action(&ctx, 0, &dual_action(&ctx, 1, &p).unwrap()).unwrap();
        let y = dual_action(&ctx, 1, &dual_action(&ctx, 0, &p).unwrap()).unwrap();
        assert_eq!(x.sub(&y), dual_action(&ctx, 2, &p).unwrap());
    }
}

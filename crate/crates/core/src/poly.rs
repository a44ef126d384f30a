//! Sparse polynomials and polynomial differential forms over the rationals,
//! with the de Rham complex and its radial contracting homotopy.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::homology::{normalize_wedge, wedge_basis, ChainComplex, Orientation};
use crate::linalg::SparseMatrix;
use crate::pbw::{degree, MultiIndex};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Poly::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// The coordinate `z_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut a = vec![0; nvars];
        a[i] = 1;
        Poly::monomial(a, Rational::one())
    }

    pub fn monomial(alpha: MultiIndex, c: Rational) -> Self {
        let mut p = Poly::zero(alpha.len());
        p.add_term(alpha, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (a, c) in terms {
            assert_eq!(a.len(), nvars, "exponent length");
            p.add_term(a, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(|a| degree(a)).max()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(alpha.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(a, x)| (a.clone(), x * c)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let g: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(g, c * d);
            }
        }
        out
    }

    /// `∂/∂z_i`.
    pub fn derivative(&self, i: usize) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(a, _)| a[i] > 0).map(|(a, c)| {
                let mut b = a.clone();
                b[i] -= 1;
                (b, c * Rational::from_integer(a[i].into()))
            }),
        )
    }

    /// Drop every monomial of degree above `d`.
    pub fn truncate_degree(&self, d: u64) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().filter(|(a, _)| degree(a) <= d).map(|(a, c)| (a.clone(), c.clone())))
    }
}

fn monomial_string(alpha: &[u32], var: &str) -> String {
    alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| if a == 1 { format!("{var}{}", i + 1) } else { format!("{var}{}^{a}", i + 1) })
        .collect::<Vec<_>>()
        .join("*")
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, &'a Rational)>,
) -> fmt::Result {
    let mut any = false;
    for (pos, (mono, c)) in terms.enumerate() {
        any = true;
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
            (false, true) => write!(f, "{mono}")?,
            (false, false) => write!(f, "{mag}*{mono}")?,
        }
    }
    if !any {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // highest degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| degree(b).cmp(&degree(a)).then_with(|| b.cmp(a)));
        write_terms(f, terms.into_iter().map(|(a, c)| (monomial_string(a, "z"), c)))
    }
}

/// `Σ c z^α dz_{i_1}∧…∧dz_{i_p}` with strictly increasing index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForm {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<(MultiIndex, Vec<usize>), Rational>,
}

impl PolyForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        PolyForm { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn from_poly(p: &Poly) -> Self {
        PolyForm::from_terms(p.nvars(), 0, p.terms().map(|(a, c)| (a.clone(), Vec::new(), c.clone())))
    }

    /// Terms may list indices in any order; they are sorted with sign and
    /// repeated indices vanish.
    pub fn from_terms(nvars: usize, degree: usize, terms: impl IntoIterator<Item = (MultiIndex, Vec<usize>, Rational)>) -> Self {
        let mut f = PolyForm::zero(nvars, degree);
        for (a, idx, c) in terms {
            assert_eq!(idx.len(), degree, "form degree");
            f.add_term(a, &idx, c);
        }
        f
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, Vec<usize>), &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, indices: &[usize], c: Rational) {
        let Some((sign, sorted)) = normalize_wedge(indices) else { return };
        let c = if sign < 0 { -c } else { c };
        if c.is_zero() {
            return;
        }
        let key = (alpha, sorted);
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for ((a, i), c) in &other.terms {
            out.add_term(a.clone(), i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> PolyForm {
        PolyForm::from_terms(self.nvars, self.degree, self.terms.iter().map(|((a, i), x)| (a.clone(), i.clone(), x * c)))
    }

    /// Exterior derivative `d(z^α dz_I) = Σ_j α_j z^{α-e_j} dz_j ∧ dz_I`.
    pub fn d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars, self.degree + 1);
        for ((a, idx), c) in &self.terms {
            for j in 0..self.nvars {
                if a[j] == 0 {
                    continue;
                }
                let mut b = a.clone();
                b[j] -= 1;
                let mut word = vec![j];
                word.extend_from_slice(idx);
                out.add_term(b, &word, c * Rational::from_integer(a[j].into()));
            }
        }
        out
    }

    /// Radial homotopy `h(z^α dz_I) = (|α|+p)^{-1} Σ_k (-1)^{k-1} z_{i_k} z^α dz_{I∖i_k}`;
    /// zero on 0-forms.
    pub fn h(&self) -> PolyForm {
        if self.degree == 0 {
            return PolyForm::zero(self.nvars, 0);
        }
        let mut out = PolyForm::zero(self.nvars, self.degree - 1);
        for ((a, idx), c) in &self.terms {
            let total = Rational::from_integer((degree(a) + idx.len() as u64).into());
            for (k, &i) in idx.iter().enumerate() {
                let mut b = a.clone();
                b[i] += 1;
                let rest: Vec<usize> = idx.iter().enumerate().filter(|&(m, _)| m != k).map(|(_, &x)| x).collect();
                let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
                out.add_term(b, &rest, sign * c / &total);
            }
        }
        out
    }

    /// Value at the origin of a 0-form, as a constant 0-form.
    pub fn evaluate_at_origin(&self) -> PolyForm {
        assert_eq!(self.degree, 0);
        let zero = vec![0; self.nvars];
        let c = self.terms.get(&(zero.clone(), Vec::new())).cloned().unwrap_or_else(Rational::zero);
        PolyForm::from_terms(self.nvars, 0, [(zero, Vec::new(), c)])
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms.iter().map(|((a, idx), c)| {
                let mono = monomial_string(a, "z");
                let wedge: Vec<String> = idx.iter().map(|i| format!("dz{}", i + 1)).collect();
                let s = match (mono.is_empty(), wedge.is_empty()) {
                    (true, true) => String::new(),
                    (true, false) => wedge.join("^"),
                    (false, true) => mono,
                    (false, false) => format!("{mono} {}", wedge.join("^")),
                };
                (s, c)
            }),
        )
    }
}

/// All monomials in `nvars` variables of total degree at most `max`.
pub fn monomials_up_to(nvars: usize, max: u64) -> Vec<MultiIndex> {
    crate::pbw::quotient_basis(&vec![1; nvars], max)
}

/// The de Rham complex on forms `z^α dz_I` with `|α| + |I| ≤ D`.
#[derive(Clone, Debug)]
pub struct DeRhamComplex {
    pub nvars: usize,
    pub degree_cap: u64,
    pub bases: Vec<Vec<(MultiIndex, Vec<usize>)>>,
    pub complex: ChainComplex,
}

pub fn de_rham_complex(nvars: usize, degree_cap: u64) -> DeRhamComplex {
    let mut bases: Vec<Vec<(MultiIndex, Vec<usize>)>> = Vec::new();
    for p in 0..=nvars {
        let mut b = Vec::new();
        if p as u64 <= degree_cap {
            for idx in wedge_basis(nvars, p) {
                for a in monomials_up_to(nvars, degree_cap - p as u64) {
                    b.push((a, idx.clone()));
                }
            }
        }
        bases.push(b);
    }
    let index: Vec<BTreeMap<(MultiIndex, Vec<usize>), usize>> = bases
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect())
        .collect();
    let mut maps = Vec::new();
    for p in 0..nvars {
        let mut trip = Vec::new();
        for (col, (a, idx)) in bases[p].iter().enumerate() {
            let form = PolyForm::from_terms(nvars, p, [(a.clone(), idx.clone(), Rational::one())]);
            for (key, c) in form.d().terms() {
                trip.push((index[p + 1][key], col, c.clone()));
            }
        }
        maps.push(SparseMatrix::from_triplets(bases[p + 1].len(), bases[p].len(), trip));
    }
    let dims = bases.iter().map(Vec::len).collect();
    DeRhamComplex {
        nvars,
        degree_cap,
        bases,
        complex: ChainComplex { orientation: Orientation::Cochain, dims, maps, augmentation: None },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyCertificate {
    pub nvars: usize,
    pub degree_cap: u64,
    pub forms_checked: usize,
    pub d_squared_zero: bool,
    /// `dh + hd = id` in positive degrees and `hd = id - ev_0` in degree 0.
    pub homotopy_identity: bool,
    pub failures: Vec<String>,
}

impl HomotopyCertificate {
    pub fn holds(&self) -> bool {
        self.d_squared_zero && self.homotopy_identity
    }
}

pub fn poincare_homotopy_check(nvars: usize, degree_cap: u64) -> HomotopyCertificate {
    let dr = de_rham_complex(nvars, degree_cap);
    let d_squared_zero = dr.complex.composites_vanish().is_ok();
    let mut failures = Vec::new();
    let mut count = 0;
    for (p, basis) in dr.bases.iter().enumerate() {
        for (a, idx) in basis {
            count += 1;
            let w = PolyForm::from_terms(nvars, p, [(a.clone(), idx.clone(), Rational::one())]);
            let dd = w.d().d();
            if !dd.is_zero() {
                failures.push(format!("d(d({w})) = {dd}"));
            }
            let lhs = if p == 0 { w.d().h() } else { w.h().d().add(&w.d().h()) };
            let rhs = if p == 0 { w.sub(&w.evaluate_at_origin()) } else { w.clone() };
            if lhs != rhs {
                failures.push(format!("(dh + hd)({w}) = {lhs}"));
            }
        }
    }
    HomotopyCertificate {
        nvars,
        degree_cap,
        forms_checked: count,
        d_squared_zero: d_squared_zero && failures.iter().all(|f| !f.starts_with("d(d(")),
        homotopy_identity: failures.iter().all(|f| f.starts_with("d(d(")),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    fn form(n: usize, p: usize, terms: &[(&[u32], &[usize], Rational)]) -> PolyForm {
        PolyForm::from_terms(n, p, terms.iter().map(|(a, i, c)| (a.to_vec(), i.to_vec(), c.clone())))
    }

    #[test]
    fn exterior_derivative_examples() {
        let z1 = PolyForm::from_poly(&Poly::var(2, 0));
        assert_eq!(z1.d(), form(2, 1, &[(&[0, 0], &[0], rat(1))]));
        let z1z2 = PolyForm::from_poly(&Poly::var(2, 0).mul(&Poly::var(2, 1)));
        assert_eq!(z1z2.d(), form(2, 1, &[(&[0, 1], &[0], rat(1)), (&[1, 0], &[1], rat(1))]));
        let a = form(2, 1, &[(&[1, 0], &[1], rat(1))]);
        assert_eq!(a.d(), form(2, 2, &[(&[0, 0], &[0, 1], rat(1))]));
        let b = form(2, 1, &[(&[0, 1], &[0], rat(1))]);
        assert_eq!(b.d(), form(2, 2, &[(&[0, 0], &[0, 1], rat(-1))]));
    }

    #[test]
    fn homotopy_examples() {
        let w = form(1, 1, &[(&[1], &[0], rat(1))]);
        let hw = w.h();
        assert_eq!(hw, form(1, 0, &[(&[2], &[], ratio(1, 2))]));
        assert_eq!(hw.d(), w);
        let one = PolyForm::from_poly(&Poly::one(1));
        assert!(one.d().h().is_zero());
        let sq = PolyForm::from_poly(&Poly::monomial(vec![2], rat(1)));
        assert_eq!(sq.d().h(), sq);
    }

    #[test]
    fn small_homotopy_certificate() {
        let c = poincare_homotopy_check(3, 3);
        assert!(c.holds(), "{:?}", c.failures);
    }

    #[test]
    fn de_rham_cohomology_is_trivial() {
        let dr = de_rham_complex(3, 4);
        let b = crate::homology::homology_dims(&dr.complex).unwrap();
        assert_eq!(b.betti, vec![1, 0, 0, 0]);
    }

    #[test]
    fn poly_arithmetic() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p, x.mul(&x).sub(&y.mul(&y)));
        assert_eq!(p.derivative(0), x.scale(&rat(2)));
        assert_eq!(p.to_string(), "z1^2 - z2^2");
    }
}

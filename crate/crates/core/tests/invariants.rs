use envlab_core::corpus;
use envlab_core::dual::dual_action;
use envlab_core::lie::{verify_weight_structure, LieAlgebra, WeightStructure};
use envlab_core::pbw::{quotient_basis, reduce_mod, weight_of, BasisMode, MultiIndex, Pbw, TruncationContext, UElement};
use envlab_core::poly::{Poly, PolyForm};
use envlab_core::weights::{
    dilate, homogeneous_norm, seminorm_eval, taylor_seminorm, validate_weight_sequence, WeightSequence,
};
use envlab_core::{rat, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=6).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn multi_index(n: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, n)
}

fn element(n: usize, max_entry: u32) -> impl Strategy<Value = UElement> {
    prop::collection::vec((multi_index(n, max_entry), small_rational()), 1..=3)
        .prop_map(move |t| UElement::from_terms(n, BasisMode::Plain, t))
}

fn poly(n: usize, max_entry: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((multi_index(n, max_entry), small_rational()), 1..=3)
        .prop_map(move |t| Poly::from_terms(n, t))
}

/// The four bundled non-abelian algebras with their weights.
fn weighted(k: usize) -> (LieAlgebra, Vec<u32>) {
    match k {
        0 => (corpus::heisenberg3(), vec![1, 1, 2]),
        1 => (corpus::favre7(), vec![1, 1, 2, 3, 4, 5, 6]),
        2 => (corpus::solvable2(), vec![1, 1]),
        _ => (corpus::sl2(), vec![1, 1, 1]),
    }
}

fn weighted_element(algebras: std::ops::Range<usize>, max_entry: u32) -> impl Strategy<Value = (usize, UElement, UElement, UElement)> {
    algebras.prop_flat_map(move |k| {
        let n = weighted(k).0.dim();
        (Just(k), element(n, max_entry), element(n, max_entry), element(n, max_entry))
    })
}

thread_local! {
    static H3: TruncationContext =
        TruncationContext::new(&corpus::heisenberg3(), &WeightStructure::grading(vec![1, 1, 2]), 8).unwrap();
    static FAVRE: TruncationContext =
        TruncationContext::new(&corpus::favre7(), &WeightStructure::filtration(vec![1, 1, 2, 3, 4, 5, 6]), 8).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pbw_product_is_associative((k, x, y, z) in weighted_element(0..4, 1)) {
        let p = Pbw::new(weighted(k).0);
        prop_assert_eq!(p.product(&p.product(&x, &y), &z), p.product(&x, &p.product(&y, &z)));
    }

    #[test]
    fn reduction_is_multiplicative((k, x, y, _z) in weighted_element(0..2, 2), cutoff in 0u64..=5) {
        let (a, w) = weighted(k);
        let p = Pbw::new(a);
        let lhs = reduce_mod(&p.product(&x, &y), &w, cutoff);
        let rhs = reduce_mod(&p.product(&reduce_mod(&x, &w, cutoff), &reduce_mod(&y, &w, cutoff)), &w, cutoff);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn products_respect_weights(k in 0usize..2, a in multi_index(7, 2), b in multi_index(7, 2)) {
        let (alg, w) = weighted(k);
        let n = alg.dim();
        let (a, b) = (&a[..n], &b[..n]);
        let source = weight_of(a, &w) + weight_of(b, &w);
        let p = Pbw::new(alg);
        for (g, c) in p.mul_monomials(a, b).iter() {
            prop_assert!(!c.is_zero());
            let target = weight_of(g, &w);
            if k == 0 {
                prop_assert_eq!(target, source);
            } else {
                prop_assert!(target >= source);
            }
        }
    }

    #[test]
    fn grading_implies_filtration(k in 0usize..4, w in prop::collection::vec(1u32..=4, 7)) {
        let a = weighted(k).0;
        let w = w[..a.dim()].to_vec();
        if verify_weight_structure(&a, &WeightStructure::grading(w.clone())).violations.is_empty() {
            prop_assert!(verify_weight_structure(&a, &WeightStructure::filtration(w)).violations.is_empty());
        }
    }

    #[test]
    fn weight_validation_is_monotone_in_cutoff(
        values in prop::collection::vec(positive_rational(), 15),
        c1 in 0u64..=4,
        c2 in 0u64..=4,
    ) {
        let (lo, hi) = (c1.min(c2), c1.max(c2));
        let basis = quotient_basis(&[1, 1], 4);
        let mut table: BTreeMap<MultiIndex, Rational> = basis.into_iter().zip(values).collect();
        table.insert(vec![0, 0], rat(1));
        let m = WeightSequence::custom(vec![1, 1], table);
        if validate_weight_sequence(&m, hi).is_valid() {
            prop_assert!(validate_weight_sequence(&m, lo).is_valid());
        }
    }

    #[test]
    fn seminorm_is_homogeneous_and_monotone(
        x in element(2, 4),
        lambda in small_rational(),
        r1 in positive_rational(),
        r2 in positive_rational(),
    ) {
        let m = WeightSequence::factorial(2);
        let at = |x: &UElement, r: &Rational| seminorm_eval(x, &m, r).unwrap();
        prop_assert_eq!(at(&x.scale(&lambda), &r1), lambda.abs() * at(&x, &r1));
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(at(&x, &lo) <= at(&x, &hi));
    }

    #[test]
    fn factorial_seminorm_is_squeezed_by_taylor(n in 1usize..=3, x in element(3, 3), r in positive_rational()) {
        let x = UElement::from_terms(n, BasisMode::Plain, x.terms().map(|(a, c)| (a[..n].to_vec(), c.clone())));
        let c = Rational::from_integer((3 * n as i64).into());
        let f = seminorm_eval(&x, &WeightSequence::factorial(n), &r).unwrap();
        prop_assert!(taylor_seminorm(&x, &(&r / &c)) <= f);
        prop_assert!(f <= taylor_seminorm(&x, &r));
    }

    #[test]
    fn dilations_compose_and_scale_the_norm(
        t in prop::collection::vec(small_rational(), 7),
        z1 in small_rational(),
        z2 in small_rational(),
        k in 0usize..2,
    ) {
        let w = weighted(k).1;
        let t = &t[..w.len()];
        prop_assert_eq!(dilate(&dilate(t, &w, &z1), &w, &z2), dilate(t, &w, &(&z1 * &z2)));
        prop_assert_eq!(homogeneous_norm(&dilate(t, &w, &z1), &w), homogeneous_norm(t, &w).scale(&z1));
    }

    #[test]
    fn dual_action_is_a_derivation_on_h3(p in poly(3, 1), q in poly(3, 1), i in 0usize..3) {
        H3.with(|ctx| {
            let lhs = dual_action(ctx, i, &p.mul(&q)).unwrap();
            let rhs = dual_action(ctx, i, &p).unwrap().mul(&q).add(&p.mul(&dual_action(ctx, i, &q).unwrap()));
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })?;
    }

    #[test]
    fn dual_action_represents_the_bracket(p in poly(7, 1), i in 0usize..7, j in 0usize..7) {
        FAVRE.with(|ctx| {
            let a = ctx.algebra();
            // keep the support within the context cutoff
            let p = Poly::from_terms(7, p.terms().filter(|(al, _)| weight_of(al, ctx.weights()) <= 6).map(|(al, c)| (al.clone(), c.clone())));
            let act = |k: usize, f: &Poly| dual_action(ctx, k, f).unwrap();
            let lhs = act(i, &act(j, &p)).sub(&act(j, &act(i, &p)));
            let mut rhs = Poly::zero(7);
            for (k, c) in a.bracket(i, j).iter() {
                rhs = rhs.add(&act(*k, &p).scale(c));
            }
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })?;
    }

    #[test]
    fn de_rham_differential_squares_to_zero_and_h_is_a_homotopy(
        n in 1usize..=4,
        p in 0usize..=4,
        terms in prop::collection::vec((multi_index(4, 3), prop::collection::vec(0usize..4, 4), small_rational()), 1..=4),
    ) {
        let p = p.min(n);
        let terms = terms.into_iter().map(|(a, idx, c)| (a[..n].to_vec(), idx.into_iter().map(|i| i % n).take(p).collect::<Vec<_>>(), c));
        let f = PolyForm::from_terms(n, p, terms);
        prop_assert!(f.d().d().is_zero());
        if p == 0 {
            prop_assert_eq!(f.d().h(), f.sub(&f.evaluate_at_origin()));
        } else {
            prop_assert_eq!(f.d().h().add(&f.h().d()), f);
        }
    }
}

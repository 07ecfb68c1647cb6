use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use local_bundles::cech::{
    h0_neighborhood, h1_neighborhood, split_h0_level, split_h1_level, CechOptions,
};
use local_bundles::geometry::{Bundle, ExtensionBundle, SplitBundle, TotalSpace};
use local_bundles::laurent::{LaurentPoly, Monomial};

const O: CechOptions = CechOptions { window_scale: 1, depth: None };

fn poly(n: usize) -> impl Strategy<Value = LaurentPoly> {
    let term = (-4i64..=4, prop::collection::vec(0u32..=2, n), -5i64..=5, 1i64..=3);
    prop::collection::vec(term, 0..5).prop_map(move |terms| {
        let mut p = LaurentPoly::zero(n);
        for (k, u, a, b) in terms {
            p.add_term(Monomial::new(k, u), BigRational::new(BigInt::from(a), BigInt::from(b)));
        }
        p
    })
}

/// Polynomials with no constant-in-u term, so the class vanishes on `Z`.
fn fiber_poly(n: usize) -> impl Strategy<Value = LaurentPoly> {
    poly(n).prop_map(|p| {
        let level0 = p.truncate_u(0);
        &p - &level0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn split_bundles_match_level_sums(
        twists in prop::collection::vec(-1i64..=3, 1..=2),
        degrees in prop::collection::vec(-4i64..=3, 1..=2),
        m in 0u32..=2,
    ) {
        let space = TotalSpace::new(twists).unwrap();
        let bundle: Bundle = SplitBundle::new(space.clone(), degrees.clone()).unwrap().into();
        let h1: u64 = (0..=m).map(|t| split_h1_level(&space, &degrees, t, false)).sum();
        let h0: u64 = (0..=m).map(|t| split_h0_level(&space, &degrees, t)).sum();
        prop_assert_eq!(h1_neighborhood(&space, &bundle, m, &O).unwrap(), h1);
        prop_assert_eq!(h0_neighborhood(&space, &bundle, m, &O).unwrap(), h0);
    }

    #[test]
    fn extension_h1_is_monotone_and_gauge_invariant(j in 0u32..=3, p in fiber_poly(2)) {
        let space = TotalSpace::w(1);
        let e = ExtensionBundle::new(space.clone(), j, p).unwrap();
        let reduced: Bundle = e.with_p(e.reduced_class()).into();
        let bundle: Bundle = e.into();
        let mut prev = 0;
        for m in 0..=3 {
            let h = h1_neighborhood(&space, &bundle, m, &O).unwrap();
            prop_assert!(h >= prev);
            prop_assert_eq!(h, h1_neighborhood(&space, &reduced, m, &O).unwrap());
            prev = h;
        }
    }

    #[test]
    fn h1_is_bounded_by_the_split_bundle(j in 0u32..=4, p in fiber_poly(2), m in 0u32..=3) {
        let space = TotalSpace::w(1);
        let bundle: Bundle = ExtensionBundle::new(space.clone(), j, p).unwrap().into();
        let j = i64::from(j);
        let split: u64 = (0..=m).map(|t| split_h1_level(&space, &[j, -j], t, false)).sum();
        prop_assert!(h1_neighborhood(&space, &bundle, m, &O).unwrap() <= split);
    }

    #[test]
    fn reduction_is_idempotent_and_kills_coboundaries(
        j in 0u32..=4,
        p in fiber_poly(2),
        alpha in poly(2),
        m in 0u32..=4,
    ) {
        let space = TotalSpace::w(2);
        let e = ExtensionBundle::new(space.clone(), j, p.clone()).unwrap();
        let r = e.reduce_extension_class(m);
        prop_assert_eq!(e.with_p(r.clone()).reduce_extension_class(m), r.clone());
        // adding z^j α with α regular on U does not change the class
        let regular = LaurentPoly::from_terms(
            2,
            alpha.terms().map(|(mono, c)| (Monomial::new(mono.z_exp.abs(), mono.u_exps.clone()), c.clone())),
        );
        let shifted = &p + &regular.shift(i64::from(j), &[0, 0]);
        prop_assert_eq!(e.with_p(shifted).reduce_extension_class(m), r);
    }

    #[test]
    fn parse_print_round_trip(p in poly(3)) {
        let text = p.to_string();
        prop_assert_eq!(LaurentPoly::parse(&text, 3).unwrap(), p);
    }

    #[test]
    fn ring_axioms(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn chart_change_is_an_involution(p in poly(2), b in prop::collection::vec(-3i64..=3, 2)) {
        prop_assert_eq!(p.chart_substitute(&b).chart_substitute(&b), p.clone());
    }
}

#[test]
fn table_bundle_h1_by_level() {
    let space = TotalSpace::w(1);
    let p = LaurentPoly::parse("z^3*u1^2", 2).unwrap();
    let bundle: Bundle = ExtensionBundle::new(space.clone(), 5, p).unwrap().into();
    let cumulative: Vec<u64> = (0..=5).map(|m| h1_neighborhood(&space, &bundle, m, &O).unwrap()).collect();
    assert_eq!(*cumulative.last().unwrap(), 16);
    assert!(cumulative.windows(2).all(|w| w[0] <= w[1]));
}

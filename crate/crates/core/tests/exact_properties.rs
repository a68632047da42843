use ed_slra::chow::{ed_generic_determinantal, ed_generic_determinantal_all};
use ed_slra::eddegree::{
    hankel_ed_generic, hankel_ed_polynomial, sectional_ed_corank1, sectional_ed_rank1,
    segre_polar_classes, stabilization_bound, sylvester_ed_generic,
};
use ed_slra::polyarith::{ExactPoly, RationalSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn small_poly() -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, 3), -5i64..=5), 0..5).prop_map(|terms| {
        ExactPoly::from_terms(&VARS, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))).unwrap()
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn series_of_polynomial_is_coefficient(a in small_poly(), e in prop::collection::vec(0u32..4, 3)) {
        let s = RationalSeries::polynomial(a.clone());
        prop_assert_eq!(s.coeff(&e).unwrap(), a.coeff(&e).unwrap());
    }
}

#[test]
fn rank1_closed_form_matches_intersection_theory() {
    for m in 2..=5 {
        for n in m..=5 {
            assert_eq!(
                sectional_ed_rank1(m, n, 0).unwrap(),
                ed_generic_determinantal(m, n, 1, 0).unwrap(),
                "({m},{n})"
            );
        }
    }
}

#[test]
fn rank1_all_sections_match_intersection_theory() {
    for m in 2..=3 {
        for n in m..=4 {
            let all = ed_generic_determinantal_all(m, n, 1).unwrap();
            for (s, v) in all.iter().enumerate() {
                assert_eq!(&sectional_ed_rank1(m, n, s).unwrap(), v, "({m},{n},{s})");
            }
        }
    }
}

#[test]
fn corank1_closed_form_matches_intersection_theory() {
    for m in 2..=4 {
        for n in m..=4 {
            let all = ed_generic_determinantal_all(m, n, m - 1).unwrap();
            for (s, v) in all.iter().enumerate() {
                assert_eq!(&sectional_ed_corank1(m, n, s).unwrap(), v, "({m},{n},{s})");
            }
        }
    }
}

#[test]
fn transposition_symmetry() {
    for (m, n, r) in [(2, 3, 1), (2, 4, 1), (3, 4, 2), (2, 5, 1), (3, 5, 2), (4, 5, 2)] {
        let a = ed_generic_determinantal_all(m, n, r).unwrap();
        let b = ed_generic_determinantal_all(n, m, r).unwrap();
        assert_eq!(a, b, "({m},{n},{r})");
    }
}

#[test]
fn constant_below_stabilization_bound() {
    for (m, n, r) in [(4, 4, 2), (3, 4, 2), (3, 5, 2)] {
        let all = ed_generic_determinantal_all(m, n, r).unwrap();
        let b = stabilization_bound(m, n, r);
        assert!(all[..b].iter().all(|v| *v == all[0]), "({m},{n},{r})");
        assert!(all[b] < all[0], "({m},{n},{r})");
    }
}

#[test]
fn hankel_polynomial_reproduces_values() {
    for r in 1..=4 {
        let p = hankel_ed_polynomial(r).unwrap();
        for d in 2 * r..=12 {
            assert_eq!(
                p.eval(&BigRational::from_integer(d.into())),
                BigRational::from_integer(hankel_ed_generic(d, r).unwrap())
            );
        }
    }
}

#[test]
fn square_sylvester_closed_form() {
    for m in 2..=6 {
        for n in m..=6 {
            assert_eq!(
                sylvester_ed_generic(m, n, m).unwrap(),
                BigInt::from(4 * (m + n) - 2),
                "({m},{n})"
            );
        }
    }
}

#[test]
fn polar_class_totals_are_generic_ed_degrees() {
    for m in 2..=4 {
        for n in m..=4 {
            assert_eq!(
                segre_polar_classes(m, n).total(),
                ed_generic_determinantal(m, n, 1, 0).unwrap()
            );
        }
    }
}

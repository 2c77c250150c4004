use proptest::prelude::*;

use typea::clifford::{CliffordAlgebra, QuadraticForm};
use typea::grading::{degrees_equal, normalize_degree, Degree, GradingDatum};
use typea::groebner::{buchberger, ideals_equal, is_groebner_basis, MonomialOrder};
use typea::linalg::Matrix;
use typea::poly::{Mono, Poly};
use typea::scalar::Scalar;

fn degree(n: usize) -> impl Strategy<Value = Degree> {
    (-20i64..20, prop::collection::vec(-10i64..10, n)).prop_map(|(t, c)| Degree::new(t, c))
}

fn datum() -> impl Strategy<Value = GradingDatum> {
    (4usize..=6).prop_flat_map(|n| (Just(n), 1i64..n as i64)).prop_map(|(n, a)| GradingDatum::new(n, a).unwrap())
}

/// Polynomials in three variables with small integer coefficients and degree at most three.
fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-3i64..=3, 0u16..=3, 0u16..=3, 0u16..=3), 0..4).prop_map(|terms| {
        let mut p = Poly::zero();
        for (c, x, y, z) in terms {
            if x + y + z <= 3 {
                p.add_term(Mono::from_exps(&[x, y, z]), &Scalar::int(c));
            }
        }
        p
    })
}

fn order() -> impl Strategy<Value = MonomialOrder> {
    prop_oneof![Just(MonomialOrder::lex(vec![0, 1, 2])), Just(MonomialOrder::deglex(vec![0, 1, 2])), Just(MonomialOrder::deglex(vec![2, 0, 1]))]
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Scalar::frac(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent((g, d) in datum().prop_flat_map(|g| { let n = g.n; (Just(g), degree(n)) })) {
        let once = normalize_degree(&d, &g).unwrap();
        prop_assert_eq!(normalize_degree(&once, &g).unwrap(), once.clone());
        prop_assert!(degrees_equal(&d, &once, &g).unwrap());
    }

    #[test]
    fn normalize_respects_addition((g, x, y) in datum().prop_flat_map(|g| { let n = g.n; (Just(g), degree(n), degree(n)) })) {
        let direct = normalize_degree(&x.add(&y), &g).unwrap();
        let via = normalize_degree(&normalize_degree(&x, &g).unwrap().add(&normalize_degree(&y, &g).unwrap()), &g).unwrap();
        prop_assert_eq!(direct, via);
    }

    #[test]
    fn relation_is_trivial((g, d, k) in datum().prop_flat_map(|g| { let n = g.n; (Just(g), degree(n), -3i64..=3) })) {
        prop_assert!(degrees_equal(&d, &d.add(&g.relation().scale(k)), &g).unwrap());
    }

    #[test]
    fn sign_is_additive(x in degree(5), y in degree(5)) {
        prop_assert_eq!(x.add(&y).sigma(), (x.sigma() + y.sigma()) % 2);
    }

    #[test]
    fn polynomial_ring_laws(f in poly(), g in poly(), h in poly()) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn derivative_is_a_derivation(f in poly(), g in poly(), var in 0usize..3) {
        prop_assert_eq!((&f * &g).diff(var), &(&f.diff(var) * &g) + &(&f * &g.diff(var)));
    }

    #[test]
    fn normal_form_is_a_congruence(gens in prop::collection::vec(poly(), 1..=3), f in poly(), g in poly(), h in poly(), ord in order()) {
        let gb = buchberger(&gens, &ord);
        let fg = &f * &g;
        prop_assert_eq!(gb.normal_form(&(&fg + &h)), gb.normal_form(&(&gb.normal_form(&fg) + &h)));
    }

    #[test]
    fn buchberger_output_is_a_reduced_groebner_basis(gens in prop::collection::vec(poly(), 1..=3), ord in order()) {
        let gb = buchberger(&gens, &ord);
        prop_assert!(is_groebner_basis(&gb.polys, &ord).is_groebner);
        prop_assert!(gb.contains_all(&gens));
        let mut reversed = gens.clone();
        reversed.reverse();
        prop_assert_eq!(buchberger(&reversed, &ord).polys, gb.polys.clone());
    }

    #[test]
    fn ideal_equality_is_an_equivalence(a in prop::collection::vec(poly(), 1..=2), b in prop::collection::vec(poly(), 1..=2), ord in order()) {
        prop_assert!(ideals_equal(&a, &a, &ord));
        prop_assert_eq!(ideals_equal(&a, &b, &ord), ideals_equal(&b, &a, &ord));
        let gb = buchberger(&a, &ord).polys;
        prop_assert!(ideals_equal(&a, &gb, &ord));
        if ideals_equal(&a, &b, &ord) {
            prop_assert!(ideals_equal(&gb, &b, &ord));
        }
    }

    #[test]
    fn clifford_generators_square_to_the_form(
        diag in prop::collection::vec(-3i64..=3, 3),
        off in -2i64..=2,
        v in prop::collection::vec(rational(), 3),
    ) {
        let mut b = Matrix::zeros(3, 3);
        for (i, d) in diag.iter().enumerate() {
            b[(i, i)] = Scalar::int(*d);
        }
        b[(0, 1)] = Scalar::frac(off, 2);
        b[(1, 0)] = Scalar::frac(off, 2);
        let cl = CliffordAlgebra::new(QuadraticForm::new(b).unwrap()).unwrap();
        prop_assert!(cl.square_defect(&v).iter().all(Scalar::is_zero));
    }
}

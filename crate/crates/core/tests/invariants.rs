//! Invariants checked over whole parameter grids.

use typea::grading::{enumerate_cochain_supports, GradingDatum, SupportBounds, SupportKind};
use typea::groebner::{buchberger, ideals_equal};
use typea::jacobian::{beta_relations, build_potentials, paper_family, verify_paper_groebner};
use typea::matfact::build_k;
use typea::poly::Poly;
use typea::matfact::report::{default_upsilon, type_check_with_tables};
use typea::matfact::ModelBounds;
use typea::quantum::spectrum_matching;
use typea::scalar::Scalar;
use typea::superpotential::{critical_points, gamma_action_check, hessian_at, shift, PointKind};

const GRID: [(usize, u32); 4] = [(4, 2), (4, 3), (5, 3), (5, 4)];

fn wide_grid() -> Vec<(usize, u32)> {
    (4..=6).flat_map(|n| (2..n as u32).map(move |a| (n, a))).collect()
}

#[test]
fn length_one_cochains_of_degree_one_only_see_the_top_generator() {
    for (n, a) in wide_grid() {
        let g = GradingDatum::new(n, a as i64).unwrap();
        let supports = enumerate_cochain_supports(&g, SupportKind::Length1 { t: 1 }, &SupportBounds::default_for(&g));
        for s in &supports {
            assert_eq!(s.k_in.len(), n, "({n},{a}) {s:?}");
            assert!(s.k_out.is_empty(), "({n},{a}) {s:?}");
        }
        if a == 2 {
            assert!(supports.is_empty());
        }
    }
}

#[test]
fn truncated_polyvectors_of_degree_two() {
    for (n, a) in wide_grid() {
        let g = GradingDatum::new(n, a as i64).unwrap();
        let kind = SupportKind::Polyvector { total: 2, truncated: true };
        let defaults = SupportBounds::default_for(&g);
        let higher = enumerate_cochain_supports(&g, kind, &SupportBounds { min_j: 2, ..defaults });
        assert!(higher.is_empty(), "({n},{a}) {higher:?}");
        let first = enumerate_cochain_supports(&g, kind, &SupportBounds { min_j: 1, max_j: 1, ..defaults });
        assert_eq!(first.len(), n);
        for s in &first {
            let j = s.c.iter().position(|&c| c == 1).unwrap();
            let mut b = vec![0; n];
            b[j] = a as i64;
            assert_eq!(s.b, b, "({n},{a})");
            assert!(s.k_in.is_empty() && s.k_out.is_empty());
        }
    }
}

#[test]
fn paper_family_and_buchberger_agree() {
    for (n, a) in [(4, 2), (4, 3), (5, 3)] {
        let fam = build_potentials(n, a).unwrap();
        let ord = fam.homogeneous_lex_order();
        // The family matches the partials after r_j -> r_j / a.
        let mut images: Vec<Poly> = (0..2 * n).map(Poly::var).collect();
        for j in 0..n {
            images[fam.r(j)] = Poly::var(fam.r(j)).scale(&Scalar::frac(1, a as i64));
        }
        let rescaled: Vec<Poly> = fam.partials_tilde.iter().map(|p| p.compose(&images)).collect();
        let direct = buchberger(&rescaled, &ord);
        assert!(ideals_equal(&direct.polys, &paper_family(&fam), &ord), "({n},{a})");
        assert!(verify_paper_groebner(n, a).unwrap().passed());
    }
}

#[test]
fn beta_relations_on_the_grid() {
    for (n, a) in GRID {
        let b = beta_relations(n, a).unwrap();
        assert!(b.beta_independent_of_index && b.product_identity_holds && b.relation_holds, "({n},{a})");
    }
}

#[test]
fn critical_points_on_the_grid() {
    for (n, a) in wide_grid() {
        let (w, points) = critical_points(n, a).unwrap();
        let small: Vec<_> = points.iter().filter(|p| p.kind == PointKind::Small).collect();
        let fiber = (a as usize).pow(n as u32 - 1);
        assert_eq!(points.len(), 1 + (n - a as usize) * fiber, "({n},{a})");
        // Small values are (n-a) xi + shift with xi^(n-a) = a^a, one per root.
        let k = n as i64 - a as i64;
        let shift = Scalar::int(shift(n, a));
        let mut values: Vec<&Scalar> = Vec::new();
        for p in &small {
            let xi = &(&p.value - &shift) * &Scalar::frac(1, k);
            assert_eq!(xi.pow(k as u64), Scalar::int((a as i64).pow(a)), "({n},{a})");
            if !values.contains(&&p.value) {
                values.push(&p.value);
            }
        }
        assert_eq!(values.len(), k as usize);
        let gamma = gamma_action_check(n, a).unwrap();
        assert!(gamma.passed() && gamma.fibers.values().all(|&f| f == fiber), "({n},{a})");
        if n <= 5 {
            for p in &small {
                assert!(!hessian_at(&w, &p.coords).unwrap().determinant.is_zero());
            }
        }
    }
}

#[test]
fn spectra_match_critical_values() {
    for (n, a) in wide_grid() {
        let m = spectrum_matching(n, a).unwrap();
        assert!(m.matches, "({n},{a}) {m:?}");
        assert_eq!(m.big_multiplicity, a as usize - 1);
        assert!(m.small_multiplicities.iter().all(|&k| k == 1));
    }
}

#[test]
fn koszul_factorizations_square_to_the_potential() {
    for (n, a) in GRID {
        assert!(build_k(n, a).unwrap().certificate().passed(), "({n},{a})");
    }
}

#[test]
fn transferred_structures_on_the_grid() {
    for (n, a) in GRID {
        let bounds = ModelBounds { rho: Some(1), upsilon: Some(default_upsilon(n)), arity: n };
        let (t, _) = type_check_with_tables(n, a, bounds, false).unwrap();
        assert!(t.passed(), "({n},{a})");
        assert_eq!(t.grading.violations.len(), 0);
    }
}

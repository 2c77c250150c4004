//! Acceptance suite. Every criterion is checked exactly and against its time
//! limit, and prints one PASS/FAIL line. Runs with its own harness so the
//! lines are visible under `cargo test`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use typea::clifford::{hh_bar_bruteforce, CliffordAlgebra, QuadraticForm, SignConvention};
use typea::jacobian::{beta_relations, invariant_and_local_checks, verify_paper_groebner};
use typea::matfact::build_k;
use typea::matfact::report::{default_upsilon, type_check_with_tables};
use typea::matfact::suites::{gauge_suite, group_suite, wbc_suite};
use typea::matfact::ModelBounds;
use typea::quantum::{cubic_surface_suite, lines_and_semisimplicity, spectrum_matching};
use typea::scalar::Scalar;
use typea::superpotential::{critical_points, gamma_action_check, hessian_at, PointKind};
use typea::Result;

const GRID: [(usize, u32); 4] = [(4, 2), (4, 3), (5, 3), (5, 4)];

/// Outcome of one criterion: whether every exact check held, plus a short note.
type Outcome = Result<(bool, String)>;

fn matrix_factorizations() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, a) in GRID {
        let start = Instant::now();
        let c = build_k(n, a)?.certificate();
        let t = start.elapsed();
        ok &= c.passed() && t < Duration::from_secs(1);
        notes.push(format!("({n},{a}) {:.2}s", t.as_secs_f64()));
    }
    Ok((ok, notes.join(", ")))
}

fn groebner_family() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, a) in [(4, 3), (5, 3)] {
        let start = Instant::now();
        let c = verify_paper_groebner(n, a)?;
        let t = start.elapsed();
        ok &= c.is_groebner && c.partials_in_family_ideal && c.family_in_jacobian_ideal && t < Duration::from_secs(30);
        notes.push(format!("({n},{a}) {} S-pairs, λ = {:?}", c.s_pairs_checked, c.rescaling.lambda));
    }
    Ok((ok, notes.join("; ")))
}

fn beta_relation() -> Outcome {
    let mut ok = true;
    for (n, a) in GRID {
        let b = beta_relations(n, a)?;
        ok &= b.relation_holds && b.powers_are_standard.len() == n - 1 && b.powers_are_standard.iter().all(|&x| x);
    }
    Ok((ok, "grid (4,2) (4,3) (5,3) (5,4)".into()))
}

fn invariant_ring() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, a) in [(4, 3), (4, 2)] {
        let r = invariant_and_local_checks(n, a)?;
        ok &= r.q_of_beta_in_ideal && r.local_power_witness && r.beta_power_a_minus_1_local_zero && r.beta_power_a_minus_2_local_nonzero;
        notes.push(format!("({n},{a}) local quotient dim {}", r.quotient_dimension));
    }
    Ok((ok, notes.join(", ")))
}

fn value_fibers(n: usize, a: u32) -> Result<BTreeMap<String, usize>> {
    let (_, points) = critical_points(n, a)?;
    let mut fibers = BTreeMap::new();
    for p in points.iter().filter(|p| p.kind == PointKind::Small) {
        *fibers.entry(p.value.render()).or_insert(0) += 1;
    }
    Ok(fibers)
}

fn critical_point_suite() -> Outcome {
    let (w, points) = critical_points(4, 3)?;
    let big: Vec<_> = points.iter().filter(|p| p.kind == PointKind::Big).collect();
    let small: Vec<_> = points.iter().filter(|p| p.kind == PointKind::Small).collect();
    let mut ok = big.len() == 1 && small.len() == 27 && small.iter().all(|p| p.value == Scalar::int(21));
    let gamma = gamma_action_check(4, 3)?;
    ok &= gamma.free && gamma.transitive;
    for p in &small {
        ok &= hessian_at(&w, &p.coords)?.nondegenerate;
    }
    let fibers = value_fibers(4, 2)?;
    let expected: BTreeMap<String, usize> = [(Scalar::int(4).render(), 8), (Scalar::int(-4).render(), 8)].into_iter().collect();
    ok &= fibers == expected;
    Ok((ok, format!("(4,3) 1 + {} points; (4,2) fibers {fibers:?}", small.len())))
}

fn spectra() -> Outcome {
    let mut ok = true;
    for (n, a) in GRID {
        let m = spectrum_matching(n, a)?;
        ok &= m.matches && m.complete && m.big_multiplicity == a as usize - 1;
    }
    Ok((ok, "grid (4,2) (4,3) (5,3) (5,4)".into()))
}

fn cubic_surface() -> Outcome {
    let c = cubic_surface_suite();
    let l = lines_and_semisimplicity()?;
    let spectrum = vec![("-6".to_string(), 8), ("21".to_string(), 1)];
    let ok = c.frobenius.passed()
        && c.spectrum == spectrum
        && c.relation_holds
        && l.line_count_matches
        && l.lines_at_minus_6 == "27"
        && l.discriminants_match
        && l.discriminants_vanish_at_minus_6;
    Ok((ok, format!("spectrum {:?}, lines {} = {}", c.spectrum, l.line_count, l.lines_at_minus_6)))
}

fn clifford_hh() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (form, hh0) in [("diag:1", 2), ("diag:1,1", 1)] {
        let cl = CliffordAlgebra::new(QuadraticForm::parse(form)?)?;
        let h = hh_bar_bruteforce(&cl.alg, 4, SignConvention::Plain);
        ok &= h.total(0) == hh0 && (1..=4).all(|s| h.total(s) == 0);
        notes.push(format!("{form}: {:?}", (0..=4).map(|s| h.total(s)).collect::<Vec<_>>()));
    }
    let lambda = CliffordAlgebra::new(QuadraticForm::parse("diag:0")?)?;
    let h = hh_bar_bruteforce(&lambda.alg, 4, SignConvention::Plain);
    ok &= (0..=4).all(|s| h.total(s) > 0);
    notes.push(format!("Λ(θ): {:?}", (0..=4).map(|s| h.total(s)).collect::<Vec<_>>()));
    Ok((ok, notes.join("; ")))
}

fn minimal_model() -> Outcome {
    let bounds = ModelBounds { rho: Some(1), upsilon: Some(default_upsilon(4)), arity: 4 };
    let (t, _) = type_check_with_tables(4, 3, bounds, true)?;
    let ok = t.verify.passed
        && t.strict_unit
        && t.mu0_zero
        && t.mu1_zero
        && t.order0_exterior
        && t.first_order_ok
        && t.potential.matched()
        && t.stability.as_ref().is_some_and(|s| s.stable());
    Ok((ok, format!("{} entries, first order {}", t.table_entries, t.first_order_readoff)))
}

fn weak_bounding_cochains() -> Outcome {
    let w = wbc_suite(4, 3, None)?;
    let points = w.points.iter().all(|p| {
        p.mu1_vanishes_off_f && p.mu1_f_ok && p.symmetrized_is_scalar && p.hessian_is_potential_hessian && p.hessian_matches_superpotential
    });
    let homotopy = w.homotopy.as_ref().is_some_and(|h| h.verified && h.d_squared_zero);
    let ok = w.mc_residual_zero && !w.points.is_empty() && points && homotopy;
    Ok((ok, format!("{} small critical points", w.points.len())))
}

fn group_action() -> Outcome {
    let g = group_suite(4, 3, 2, None)?;
    let units = !g.character_units.is_empty() && g.character_units.iter().all(|c| c.passed());
    let ok = g.strict && g.fourier.passed && g.fourier.exhaustive && units;
    Ok((ok, format!("|Γ*| = {}, {} characters", g.group_order, g.character_units.len())))
}

fn gauge() -> Outcome {
    let g = gauge_suite(4, 3, 3, 11)?;
    let ok = g.random_terms > 0 && g.perturbed_verify.passed && g.round_trip.solved() && !g.flipped.solved() && g.readoff_matches && g.class_nonzero;
    Ok((ok, format!("{} gauge terms, obstruction {}", g.random_terms, g.predicted_readoff)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("1 matrix factorization δ_K² = Z̃·id", matrix_factorizations, 4),
        ("2 Gröbner family and rescaling", groebner_family, 60),
        ("3 β-relation and independent powers", beta_relation, 10),
        ("4 invariant-ring identities", invariant_ring, 10),
        ("5 critical points", critical_point_suite, 5),
        ("6 spectrum matching", spectra, 5),
        ("7 cubic surface", cubic_surface, 5),
        ("8 Clifford Hochschild cohomology", clifford_hh, 60),
        ("9 minimal model (4,3)", minimal_model, 600),
        ("10 weak bounding cochains", weak_bounding_cochains, 120),
        ("11 group action", group_action, 60),
        ("12 gauge round trip", gauge, 120),
    ];
    let mut failures = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let (ok, note) = match outcome {
            Ok((ok, note)) => (ok && in_time, note),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        let late = if in_time { String::new() } else { format!(" over the {limit}s limit") };
        println!("criterion {name}: {status} in {:.2}s{late} ({note})", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

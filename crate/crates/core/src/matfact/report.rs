//! Type-A certificate for the transferred model: order-0 exterior structure,
//! first-order read-off, pre-disk potential against the superpotential up to
//! diagonal rescaling, grading of every entry, and stability under bounds.

use serde::Serialize;

use super::{build_k, end_dga, entry_degree_ok, DgaCertificate, MfCertificate, MinimalModel, ModelBounds};
use crate::ainfinity::wbc::pre_disk_potential;
use crate::ainfinity::{ainf_verify, AInfAlgebra, Cochain, VerifyCertificate};
use crate::clifford::{verify_generator_images, CliffordAlgebra, GradedAlgebra, QuadraticForm};
use crate::error::{Error, Result};
use crate::grading::GradingDatum;
use crate::linalg::{rank_of_vectors, Matrix};
use crate::poly::{Mono, Poly, Vars};
use crate::scalar::Scalar;
use crate::superpotential::Superpotential;

/// Default u-degree bound on intermediates.
pub fn default_upsilon(n: usize) -> u32 {
    2 * n as u32
}

pub fn default_bounds(n: usize) -> ModelBounds {
    ModelBounds { rho: Some(1), upsilon: Some(default_upsilon(n)), arity: n }
}

pub fn r_vars(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn u_vars(n: usize) -> Vec<usize> {
    (n..2 * n).collect()
}

pub fn v_vars(n: usize) -> Vec<usize> {
    (2 * n..3 * n).collect()
}

/// Basis indices of the odd generators `t1..tn`.
pub fn generators(n: usize) -> Vec<usize> {
    (0..n).map(|j| 1usize << j).collect()
}

/// `Z~ = -v1..vn + sum r_j v_j^a` in the model variables.
pub fn z_tilde_in_v(n: usize, a: u32) -> Poly {
    let mut exps = [0u16; crate::poly::MAX_VARS];
    for j in 0..n {
        exps[2 * n + j] = 1;
    }
    let mut z = Poly::term(Scalar::int(-1), Mono(exps));
    for j in 0..n {
        z.add_term(Mono::var(j).mul(&Mono::var_pow(2 * n + j, a as u16)), &Scalar::one());
    }
    z
}

/// Sum over generator tuples of the coefficient of `e`, times `u_{i_s}..u_{i_1}`.
pub fn generator_readoff(alg: &AInfAlgebra, n: usize, vars: &[usize]) -> Poly {
    let gens = generators(n);
    let mut out = Poly::zero();
    for (key, outs) in &alg.mu.terms {
        if key.is_empty() || !key.iter().all(|k| gens.contains(k)) {
            continue;
        }
        if let Some(p) = outs.get(&0) {
            let mut m = Mono::one();
            for k in key {
                m = m.mul(&Mono::var(vars[k.trailing_zeros() as usize]));
            }
            out.add_scaled_shifted(p, &Scalar::one(), &m);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Rescaling {
    /// `lambda_j` with `P'(lambda v) = Z~(v)`.
    pub lambda: Vec<String>,
    pub pure_signs: bool,
    /// `P'(lambda v)` at `r = 1`, plus the constant shift, equals `W(v)`.
    pub matches_w: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialComparison {
    pub potential: String,
    pub support: Vec<String>,
    pub coefficients_are_units: bool,
    pub rescaling: Option<Rescaling>,
    /// First monomial of `P'(v) - Z~(v)` when no rescaling matches.
    pub offending_monomial: Option<String>,
}

impl PotentialComparison {
    pub fn matched(&self) -> bool {
        self.rescaling.as_ref().is_some_and(|r| r.matches_w)
    }
}

fn rescale(p: &Poly, n: usize, lambda: &[Scalar]) -> Poly {
    let mut images: Vec<Poly> = (0..crate::poly::MAX_VARS).map(Poly::var).collect();
    for j in 0..n {
        images[2 * n + j] = Poly::term(lambda[j].clone(), Mono::var(2 * n + j));
    }
    p.compose(&images)
}

/// `P'` at `r = 1` written in the superpotential's variables `u1..un`.
pub fn potential_at_r_one(p: &Poly, n: usize) -> Poly {
    let mut images = vec![Poly::zero(); crate::poly::MAX_VARS];
    for j in 0..n {
        images[j] = Poly::one();
        images[2 * n + j] = Poly::var(j);
    }
    p.compose(&images)
}

/// Candidate `lambda` vectors: all sign vectors first, then all vectors with
/// entries `+-z^k`, `z` a primitive `a(n-a)`-th root of unity.
fn rescaling_candidates(n: usize, w: &Superpotential) -> impl Iterator<Item = (Vec<Scalar>, bool)> {
    let m = 2 * w.root_order() as usize;
    let z = w.field.z();
    let units: Vec<Scalar> = (0..m / 2).flat_map(|k| [z.pow(k as u64), -&z.pow(k as u64)]).collect();
    let signs = (0..1usize << n).map(move |bits| ((0..n).map(|j| if bits >> j & 1 == 1 { Scalar::int(-1) } else { Scalar::one() }).collect(), true));
    let roots = (0..m.pow(n as u32)).map(move |mut idx| {
        let lam = (0..n)
            .map(|_| {
                let k = idx % m;
                idx /= m;
                units[k].clone()
            })
            .collect();
        (lam, false)
    });
    signs.chain(roots)
}

/// Finds `lambda` with `P'(lambda v) = Z~(v)`, preferring pure signs.
pub fn compare_potential(n: usize, a: u32, potential: &Poly) -> Result<PotentialComparison> {
    let vars = super::model_vars(n);
    let w = Superpotential::new(n, a)?;
    let target = z_tilde_in_v(n, a);
    let support: Vec<String> = potential.terms.keys().map(|m| vars.render_mono(m)).collect();
    let units = potential.terms.values().all(|c| c.is_one() || (-c).is_one());
    let mut rescaling = None;
    for (lam, pure) in rescaling_candidates(n, &w) {
        if rescale(potential, n, &lam) != target {
            continue;
        }
        let mut on_w = potential_at_r_one(&rescale(potential, n, &lam), n);
        on_w.add_term(Mono::one(), &Scalar::int(w.shift));
        rescaling = Some(Rescaling { lambda: lam.iter().map(Scalar::render).collect(), pure_signs: pure, matches_w: on_w == w.w });
        break;
    }
    let offending_monomial = if rescaling.is_none() {
        let mut diff = potential.clone();
        diff.add_scaled(&target, &Scalar::int(-1));
        diff.terms.iter().next().map(|(mono, c)| format!("{}*{}", c.render(), vars.render_mono(mono)))
    } else {
        None
    };
    Ok(PotentialComparison { potential: potential.render(&vars), support, coefficients_are_units: units, rescaling, offending_monomial })
}

/// The rescaling found by [`compare_potential`] as field elements.
pub fn rescaling_scalars(n: usize, a: u32, potential: &Poly) -> Result<Vec<Scalar>> {
    let w = Superpotential::new(n, a)?;
    let target = z_tilde_in_v(n, a);
    rescaling_candidates(n, &w)
        .map(|(lam, _)| lam)
        .find(|lam| rescale(potential, n, lam) == target)
        .ok_or_else(|| Error::Verification("pre-disk potential is not a diagonal rescaling of the superpotential".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingCertificate {
    pub entries: usize,
    pub monomials: usize,
    /// Entries whose `G^n_1` degree is wrong, or that fail the scalar equation
    /// `(n-2)(m - sum|K_t| + s - 2) = 2(2-s) + 2(a-n)j`.
    pub violations: Vec<String>,
}

impl GradingCertificate {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn grading_certificate(alg: &AInfAlgebra, n: usize, a: u32) -> Result<GradingCertificate> {
    let g = GradingDatum::new(n, 1)?;
    let (mut entries, mut monos, mut violations) = (0, 0, Vec::new());
    for (key, outs) in &alg.mu.terms {
        let s = key.len() as i64;
        let masks: Vec<u32> = key.iter().map(|&k| k as u32).collect();
        let k_total: i64 = masks.iter().map(|m| m.count_ones() as i64).sum();
        for (o, p) in outs {
            entries += 1;
            for mono in p.terms.keys() {
                monos += 1;
                let c: Vec<u16> = mono.0[..n].to_vec();
                let j: i64 = c.iter().map(|&x| x as i64).sum();
                let others = mono.0[n..].iter().any(|&e| e > 0);
                let m = o.count_ones() as i64;
                let scalar_ok = (n as i64 - 2) * (m - k_total + s - 2) == 2 * (2 - s) + 2 * (a as i64 - n as i64) * j;
                if others || !scalar_ok || !entry_degree_ok(&g, a as i64, &masks, *o as u32, &c, 2 - s) {
                    violations.push(format!("mu{s}({}) -> {}*{}", alg.tuple_labels(key).join(","), alg.vars.render_mono(mono), alg.labels[*o]));
                }
            }
        }
    }
    Ok(GradingCertificate { entries, monomials: monos, violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityRun {
    pub bounds: ModelBounds,
    /// Entries with arity and r-degree inside the original bounds that differ.
    pub changed_entries: usize,
    pub first_change: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityCertificate {
    pub runs: Vec<StabilityRun>,
    /// Whether the u-bound dropped any term in the original run.
    pub upsilon_hit: bool,
    pub max_u_degree_seen: u32,
}

impl StabilityCertificate {
    pub fn stable(&self) -> bool {
        self.runs.iter().all(|r| r.changed_entries == 0)
    }
}

fn restrict(c: &Cochain, arity: usize, rho: Option<u32>, n: usize) -> Cochain {
    let c = c.arity_part_at_most(arity);
    match rho {
        Some(r) => c.map_coeffs(|p| p.truncate(&r_vars(n), r)),
        None => c,
    }
}

fn compare_tables(base: &AInfAlgebra, other: &AInfAlgebra, bounds: &ModelBounds, n: usize) -> (usize, Option<String>) {
    let x = restrict(&base.mu, bounds.arity, bounds.rho, n);
    let mut y = restrict(&other.mu, bounds.arity, bounds.rho, n);
    y.add(&x, &Scalar::int(-1));
    let first = y.terms.iter().next().map(|(k, outs)| {
        let (o, p) = outs.iter().next().expect("nonempty entry");
        format!("mu{}({}) -> ({})*{}", k.len(), base.tuple_labels(k).join(","), p.render(&base.vars), base.labels[*o])
    });
    (y.nnz(), first)
}

/// Reruns with `rho + 1`, doubled `upsilon` and `arity + 1`.
pub fn stability_certificate(n: usize, a: u32, bounds: ModelBounds, base: &AInfAlgebra, stats: (u32, bool)) -> Result<StabilityCertificate> {
    let variants = [
        ModelBounds { rho: bounds.rho.map(|r| r + 1), ..bounds },
        ModelBounds { upsilon: bounds.upsilon.map(|u| 2 * u), ..bounds },
        ModelBounds { arity: bounds.arity + 1, ..bounds },
    ];
    let mut runs = Vec::new();
    for b in variants {
        let other = MinimalModel::new(n, a, b)?.tables();
        let (changed_entries, first_change) = compare_tables(base, &other, &bounds, n);
        runs.push(StabilityRun { bounds: b, changed_entries, first_change });
    }
    Ok(StabilityCertificate { runs, upsilon_hit: stats.1, max_u_degree_seen: stats.0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    pub n: usize,
    pub a: u32,
    pub bounds: ModelBounds,
    pub matrix_factorization: MfCertificate,
    pub dga: DgaCertificate,
    pub table_entries: usize,
    pub verify: VerifyCertificate,
    pub strict_unit: bool,
    pub mu0_zero: bool,
    pub mu1_zero: bool,
    /// `mu^2` at `r = 0` is the exterior product, so the normalizing gauge is the identity.
    pub order0_exterior: bool,
    /// Generator read-off of the r-degree-0 part of the tables.
    pub order0_readoff: String,
    /// Generator read-off of the r-degree-1 part of the tables.
    pub first_order_readoff: String,
    /// The read-off is `sum c_j r_j u_j^a` with every `c_j = +-1`.
    pub first_order_ok: bool,
    pub potential: PotentialComparison,
    pub grading: GradingCertificate,
    pub stability: Option<StabilityCertificate>,
}

impl TypeReport {
    pub fn passed(&self) -> bool {
        self.matrix_factorization.passed()
            && self.dga.passed()
            && self.verify.passed
            && self.strict_unit
            && self.mu0_zero
            && self.mu1_zero
            && self.order0_exterior
            && self.first_order_ok
            && self.potential.matched()
            && self.grading.passed()
            && self.stability.as_ref().is_none_or(StabilityCertificate::stable)
    }
}

fn first_order_shape(p: &Poly, n: usize, a: u32) -> bool {
    let mut seen = vec![false; n];
    for (mono, c) in &p.terms {
        if !(c.is_one() || (-c).is_one()) {
            return false;
        }
        let Some(j) = (0..n).find(|&j| mono.0[j] == 1) else { return false };
        if *mono != Mono::var(j).mul(&Mono::var_pow(n + j, a as u16)) {
            return false;
        }
        seen[j] = true;
    }
    seen.iter().all(|&b| b)
}

/// Full certificate for the model at `bounds`; the pre-disk potential comes
/// from the untruncated model at arity `n`, which is exact because all-odd
/// generator inputs only reach arity `n - (n-a)j`.
pub fn type_check_and_disk_potential(n: usize, a: u32, bounds: ModelBounds, stability: bool) -> Result<TypeReport> {
    type_check_with_tables(n, a, bounds, stability).map(|(r, _)| r)
}

/// As [`type_check_and_disk_potential`], also returning the checked tables.
pub fn type_check_with_tables(n: usize, a: u32, bounds: ModelBounds, stability: bool) -> Result<(TypeReport, AInfAlgebra)> {
    let mf = build_k(n, a)?.certificate();
    let dga = end_dga(n, a)?.certificate(40);
    let model = MinimalModel::new(n, a, bounds)?;
    let tables = model.tables();
    let stats = model.dga.u_degree_stats();
    let verify = ainf_verify(&tables, None);
    let strict_unit = tables.strict_unit_check().is_ok();
    let mu0_zero = tables.mu.arity_part(0).is_zero();
    let mu1_zero = tables.mu.arity_part(1).is_zero();
    let rv = r_vars(n);
    let order0 = tables.mu.arity_part(2).map_coeffs(|p| p.homogeneous_part(&rv, 0));
    let order0_exterior = order0 == AInfAlgebra::exterior(n).mu.arity_part(2);
    let uv = u_vars(n);
    let readoff = generator_readoff(&tables, n, &uv);
    let r0 = readoff.homogeneous_part(&rv, 0);
    let r1 = readoff.homogeneous_part(&rv, 1);
    let vars = model.vars();
    let full = MinimalModel::new(n, a, ModelBounds { rho: None, upsilon: None, arity: n })?;
    if vars.names.len() < 3 * n {
        return Err(Error::Unsupported(format!("no room for formal coordinates at n = {n}")));
    }
    let pdp = pre_disk_potential(&full, 0, &generators(n), &v_vars(n), n)?;
    let potential = compare_potential(n, a, &pdp.potential)?;
    let grading = grading_certificate(&tables, n, a)?;
    let stability = if stability { Some(stability_certificate(n, a, bounds, &tables, stats)?) } else { None };
    let report = TypeReport {
        n,
        a,
        bounds,
        matrix_factorization: mf,
        dga,
        table_entries: tables.mu.nnz(),
        verify,
        strict_unit,
        mu0_zero,
        mu1_zero,
        order0_exterior,
        order0_readoff: r0.render(&vars),
        first_order_readoff: r1.render(&vars),
        first_order_ok: first_order_shape(&r1, n, a),
        potential,
        grading,
        stability,
    };
    Ok((report, tables))
}

#[derive(Clone, Debug, Serialize)]
pub struct CliffordCohomology {
    pub n: usize,
    pub a: u32,
    pub associative: bool,
    /// Anticommutators of the generators are multiples of the unit.
    pub anticommutators_scalar: bool,
    /// `B_ij = (t_i t_j + t_j t_i) / 2`.
    pub form: Vec<Vec<String>>,
    pub nondegenerate: bool,
    /// Ordered words in the generators span the whole algebra.
    pub generated: bool,
    /// The generators satisfy the relations of `Cl(B)` and their words are a basis.
    pub isomorphic_to_clifford: bool,
}

impl CliffordCohomology {
    pub fn passed(&self) -> bool {
        self.associative && self.anticommutators_scalar && self.nondegenerate && self.generated && self.isomorphic_to_clifford
    }
}

/// Product `x y = (-1)^|y| mu^2(x, y)` of the model at `r_j = 1`, compared with
/// the Clifford algebra of the anticommutator form of the generators.
pub fn cohomology_at_r_one(n: usize, a: u32) -> Result<CliffordCohomology> {
    let ones = vec![Scalar::one(); n];
    let model = MinimalModel::specialized(n, a, &ones, ModelBounds { rho: None, upsilon: None, arity: 2 })?;
    let tables = model.tables();
    if !tables.mu.arity_part(1).is_zero() {
        return Err(Error::Verification("mu^1 does not vanish at r = 1".into()));
    }
    let d = 1usize << n;
    let mut table = vec![vec![Vec::new(); d]; d];
    for x in 0..d {
        for y in 0..d {
            let sign = if y.count_ones() % 2 == 1 { Scalar::int(-1) } else { Scalar::one() };
            if let Some(outs) = tables.mu.terms.get(&vec![x, y]) {
                for (o, p) in outs {
                    if !p.is_constant() {
                        return Err(Error::Verification(format!("non-numeric product coefficient at ({x}, {y})")));
                    }
                    table[x][y].push((*o, &p.constant_term() * &sign));
                }
            }
        }
    }
    let alg = GradedAlgebra::new(tables.labels.clone(), tables.parity.clone(), None, table)?;
    let associative = alg.is_associative();
    let gens: Vec<Vec<Scalar>> = generators(n).iter().map(|&g| alg.basis(g)).collect();
    let mut b = Matrix::zeros(n, n);
    let mut scalar = true;
    for i in 0..n {
        for j in 0..n {
            let x = alg.mul(&gens[i], &gens[j]);
            let y = alg.mul(&gens[j], &gens[i]);
            let s: Vec<Scalar> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
            scalar &= s.iter().skip(1).all(Scalar::is_zero);
            b[(i, j)] = &s[0] * &Scalar::frac(1, 2);
        }
    }
    let form = QuadraticForm::new(b.clone())?;
    let nondegenerate = form.is_nondegenerate();
    let words: Vec<Vec<Scalar>> = (0..d as u32).map(|m| (0..n).filter(|i| m >> i & 1 == 1).fold(alg.unit(), |acc, i| alg.mul(&acc, &gens[i]))).collect();
    let generated = rank_of_vectors(&words) == d;
    let cl = CliffordAlgebra::new(form)?;
    let isomorphic_to_clifford = verify_generator_images(&cl, &alg, &gens);
    let render = |m: &Matrix| (0..n).map(|i| (0..n).map(|j| m[(i, j)].render()).collect()).collect();
    Ok(CliffordCohomology { n, a, associative, anticommutators_scalar: scalar, form: render(&b), nondegenerate, generated, isomorphic_to_clifford })
}

/// Variables of the model with the superpotential's field attached, for rendering.
pub fn field_vars(n: usize, a: u32) -> Result<Vars> {
    Ok(super::model_vars(n).with_field(Superpotential::new(n, a)?.field))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readoff_and_potential_small() {
        let r = type_check_and_disk_potential(3, 2, ModelBounds { rho: Some(1), upsilon: Some(6), arity: 3 }, false).unwrap();
        assert!(r.verify.passed && r.strict_unit && r.mu1_zero && r.order0_exterior, "{r:?}");
        assert!(r.first_order_ok, "{}", r.first_order_readoff);
        assert!(r.grading.passed(), "{:?}", r.grading.violations);
        assert!(r.potential.matched(), "{:?}", r.potential);
    }

    #[test]
    fn rescaling_detects_mismatch() {
        let vars = super::super::model_vars(4);
        let p = vars.parse("-v1*v2*v3*v4 - r1*v1^3 - r2*v2^3 - r3*v3^3 - 2*r4*v4^3").unwrap();
        let c = compare_potential(4, 3, &p).unwrap();
        assert!(c.rescaling.is_none());
        assert!(c.offending_monomial.is_some());
        let p = vars.parse("-v1*v2*v3*v4 - r1*v1^3 - r2*v2^3 - r3*v3^3 - r4*v4^3").unwrap();
        let c = compare_potential(4, 3, &p).unwrap();
        let resc = c.rescaling.unwrap();
        assert!(resc.pure_signs && resc.matches_w);
    }
}

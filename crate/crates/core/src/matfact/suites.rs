//! Weak bounding cochains, group actions and gauge reconstruction run on the
//! transferred model.

use serde::Serialize;

use super::report::{generator_readoff, generators, potential_at_r_one, r_vars, rescaling_scalars, u_vars, v_vars};
use super::{MinimalModel, ModelBounds};
use crate::ainfinity::gauge::{gauge_reconstruct, pushforward_first_order, linear_gauge_candidates, type_a_gauge_candidates, GaugeCertificate, GaugeOutcome};
use crate::ainfinity::group::{character_unit_check, fourier_check, CharacterUnitCertificate, FourierCertificate, GroupAction};
use crate::ainfinity::wbc::{contracting_homotopy, iota, mc_residual, pre_disk_potential, twisted_report, HomotopyCertificate, Twistable, UnitExtension};
use crate::ainfinity::{ainf_verify, basis_elem, elem_is_zero, AInf, Cochain, Elem, VerifyCertificate};
use crate::clifford::{hessian_clifford, verify_generator_images, CliffordAlgebra, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Mono, Poly};
use crate::scalar::Scalar;
use crate::superpotential::{critical_points, hessian_at, PointKind};

/// Fixed-seed linear congruential stream for reproducible samples.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn small(&mut self, range: i64) -> i64 {
        (self.next() % (2 * range as u64 + 1)) as i64 - range
    }
}

/// Arity reached by twisted operations with `p` inputs of total size `k`:
/// the degree equations give `s <= ((n-2)(k-p) + 2n) / 2`.
pub fn twisted_arity_bound(n: usize, k: usize, p: usize) -> usize {
    ((n as i64 - 2) * (k as i64 - p as i64) + 2 * n as i64).max(0) as usize / 2
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCheck {
    /// `u_j = s z^(e_j)` of the superpotential's critical point.
    pub exponents: Vec<u32>,
    pub value: String,
    pub mu1_vanishes_off_f: bool,
    pub mu1_f_ok: bool,
    pub cohomology_rank: usize,
    pub symmetrized_is_scalar: bool,
    /// Symmetrized `mu^2_alpha` equals `Hess P'` at the point.
    pub hessian_is_potential_hessian: bool,
    /// ... and equals `lambda_i^-1 lambda_j^-1 Hess W` at the superpotential's point.
    pub hessian_matches_superpotential: bool,
    /// `Cl(-Hess P')` maps onto the clifford module's `Cl(-Hess W)` by `t_i -> e_i / lambda_i`.
    pub clifford_matches: bool,
}

impl PointCheck {
    pub fn passed(&self, dim: usize) -> bool {
        self.mu1_vanishes_off_f
            && self.mu1_f_ok
            && self.cohomology_rank == dim
            && self.symmetrized_is_scalar
            && self.hessian_is_potential_hessian
            && self.hessian_matches_superpotential
            && self.clifford_matches
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WbcReport {
    pub n: usize,
    pub a: u32,
    /// `sum mu^s(iota(v)..) - P'(v) e+` with formal `v` and symbolic `r`.
    pub mc_residual_zero: bool,
    pub derivative_samples: usize,
    /// Coefficient of `e` in `mu^1_{iota(v)}(t_i)` equals `dP'/dv_i (v)` at `r = 1`.
    pub derivative_identity: bool,
    pub lambda: Vec<String>,
    pub max_total: usize,
    pub points: Vec<PointCheck>,
    pub homotopy: Option<HomotopyCertificate>,
}

impl WbcReport {
    pub fn passed(&self) -> bool {
        let dim = 1usize << self.n;
        self.mc_residual_zero
            && self.derivative_identity
            && !self.points.is_empty()
            && self.points.iter().all(|p| p.passed(dim))
            && self.homotopy.as_ref().is_some_and(|h| h.verified && h.d_squared_zero)
    }
}

fn matrix_at(polys: &[Vec<Poly>], point: &[Scalar]) -> Matrix {
    Matrix::from_rows(polys.iter().map(|row| row.iter().map(|p| p.eval(point)).collect()).collect())
}

/// Symbolic Maurer-Cartan check with formal `v`, then checks at the small
/// critical points of the model at `r = 1`. `max_points` limits how many
/// points are visited.
pub fn wbc_suite(n: usize, a: u32, max_points: Option<usize>) -> Result<WbcReport> {
    let gens = generators(n);
    let vv = v_vars(n);
    let full = MinimalModel::new(n, a, ModelBounds { rho: None, upsilon: None, arity: n })?;
    let potential = pre_disk_potential(&full, 0, &gens, &vv, n)?.potential;
    let ext = UnitExtension::new(&full, 0);
    let coords: Vec<Poly> = vv.iter().map(|&v| Poly::var(v)).collect();
    let alpha = iota(&ext, &gens, &coords, &potential);
    let mc_residual_zero = elem_is_zero(&mc_residual(&ext, &alpha, &potential, n));

    let lambda = rescaling_scalars(n, a, &potential)?;
    let ones = vec![Scalar::one(); n];
    let model = MinimalModel::specialized(n, a, &ones, ModelBounds { rho: None, upsilon: None, arity: n })?;
    let ext = UnitExtension::new(&model, 0);
    let p1 = potential_at_r_one(&potential, n);
    let nvars = crate::poly::MAX_VARS;
    let point_of = |v: &[Scalar]| -> Vec<Scalar> {
        let mut p = vec![Scalar::zero(); nvars];
        p[..n].clone_from_slice(v);
        p
    };

    let samples = 50;
    let mut rng = Lcg(0x2545f4914f6cdd1d);
    let mut derivative_identity = true;
    for _ in 0..samples {
        let v: Vec<Scalar> = (0..n).map(|_| Scalar::frac(rng.small(5), rng.next() as i64 % 3 + 1)).collect();
        let val = p1.eval(&point_of(&v));
        let a_v = iota(&ext, &gens, &v.iter().map(|c| Poly::constant(c.clone())).collect::<Vec<_>>(), &Poly::constant(val));
        for i in 0..n {
            let x = basis_elem(ext.dim(), gens[i]);
            let r = ext.twisted(&[&a_v, &a_v], &[&x], twisted_arity_bound(n, 1, 1));
            derivative_identity &= r[0].is_constant() && r[0].constant_term() == p1.diff(i).eval(&point_of(&v));
        }
    }

    let (w, pts) = critical_points(n, a)?;
    let hess_p: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| p1.diff(i).diff(j)).collect()).collect();
    let max_total = twisted_arity_bound(n, n, 1).max(twisted_arity_bound(n, 2, 2));
    let d = 1usize << n;
    // f and e+ enter only mu^1 and mu^2.
    let bound = |inputs: &[usize]| -> usize {
        if inputs.iter().any(|&b| b >= d) {
            2
        } else {
            twisted_arity_bound(n, inputs.iter().map(|b| b.count_ones() as usize).sum(), inputs.len())
        }
    };
    let mut points = Vec::new();
    let mut alphas: Vec<(Vec<Scalar>, Scalar, Elem)> = Vec::new();
    let small: Vec<_> = pts.iter().filter(|p| p.kind == PointKind::Small).collect();
    for pt in small.iter().take(max_points.unwrap_or(usize::MAX)) {
        let v: Vec<Scalar> = pt.coords.iter().zip(&lambda).map(|(c, l)| c * l).collect();
        let value = p1.eval(&point_of(&v));
        let a_v = iota(&ext, &gens, &v.iter().map(|c| Poly::constant(c.clone())).collect::<Vec<_>>(), &Poly::constant(value.clone()));
        let rep = twisted_report(&ext, &a_v, &gens, &bound)?;
        let hp = matrix_at(&hess_p, &point_of(&v));
        let hw = hessian_at(&w, &pt.coords)?.matrix;
        let inv: Vec<Scalar> = lambda.iter().map(Scalar::inv).collect();
        let conj = (0..n).all(|i| (0..n).all(|j| hp[(i, j)] == &(&inv[i] * &inv[j]) * &hw[(i, j)]));
        let neg = hp.scale(&Scalar::int(-1));
        let clifford_matches = match (QuadraticForm::new(neg).and_then(CliffordAlgebra::new), hessian_clifford(&w, &pt.coords)) {
            (Ok(src), Ok(tgt)) => {
                let images: Vec<Vec<Scalar>> = (0..n).map(|i| tgt.generator(i).iter().map(|c| c * &inv[i]).collect()).collect();
                verify_generator_images(&src, &tgt.alg, &images)
            }
            _ => false,
        };
        points.push(PointCheck {
            exponents: pt.exponents.clone(),
            value: value.render(),
            mu1_vanishes_off_f: rep.mu1_vanishes_off_f,
            mu1_f_ok: rep.mu1_f_ok,
            cohomology_rank: rep.cohomology_rank,
            symmetrized_is_scalar: rep.symmetrized_is_scalar,
            hessian_is_potential_hessian: rep.hessian == hp,
            hessian_matches_superpotential: conj,
            clifford_matches,
        });
        alphas.push((v, value, a_v));
    }
    let mut homotopy = None;
    'outer: for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            if alphas[i].1 == alphas[j].1 {
                let (_, cert) = contracting_homotopy(&ext, &alphas[i].0, &alphas[j].0, &alphas[i].1, &alphas[j].1, &alphas[i].2, &alphas[j].2, &bound)?;
                homotopy = Some(cert);
                break 'outer;
            }
        }
    }
    Ok(WbcReport {
        n,
        a,
        mc_residual_zero,
        derivative_samples: samples,
        derivative_identity,
        lambda: lambda.iter().map(Scalar::render).collect(),
        max_total,
        points,
        homotopy,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub n: usize,
    pub a: u32,
    pub group_order: usize,
    pub strict: bool,
    pub fourier: FourierCertificate,
    pub character_units: Vec<CharacterUnitCertificate>,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        self.strict
            && self.fourier.passed
            && !self.character_units.is_empty()
            && self.character_units.iter().all(CharacterUnitCertificate::passed)
    }
}

/// `Gamma^n_a` acting on the model tables through a primitive root of the
/// group exponent in the superpotential's field.
pub fn type_a_action(n: usize, a: u32) -> Result<GroupAction> {
    let w = crate::superpotential::Superpotential::new(n, a)?;
    let gamma = crate::ainfinity::group::FiniteAbelian::type_a(n, a);
    let e = gamma.exponent();
    let m = w.root_order();
    if m % e != 0 {
        return Err(Error::Unsupported(format!("exponent {e} does not divide the root order {m}")));
    }
    GroupAction::type_a_on_subsets(n, a, w.field.z().pow((m / e) as u64))
}

/// Strictness of the grading, Fourier comparison up to `fourier_arity`
/// (exhaustive unless `fourier_limit` caps the tuples per arity), and unit
/// compositions for every character at a small critical point.
pub fn group_suite(n: usize, a: u32, fourier_arity: usize, fourier_limit: Option<usize>) -> Result<GroupReport> {
    let action = type_a_action(n, a)?;
    let model = MinimalModel::new(n, a, ModelBounds { rho: Some(1), upsilon: None, arity: n })?;
    let tables = model.tables();
    let strict = action.check_strict(&tables).is_ok();
    let fourier = fourier_check(&tables, &action, fourier_arity, fourier_limit);
    let ones = vec![Scalar::one(); n];
    let spec = MinimalModel::specialized(n, a, &ones, ModelBounds { rho: None, upsilon: None, arity: n })?;
    let gens = generators(n);
    let potential = pre_disk_potential(&MinimalModel::new(n, a, ModelBounds { rho: None, upsilon: None, arity: n })?, 0, &gens, &v_vars(n), n)?.potential;
    let lambda = rescaling_scalars(n, a, &potential)?;
    let (_, pts) = critical_points(n, a)?;
    let pt = pts.iter().find(|p| p.kind == PointKind::Small).ok_or_else(|| Error::Verification("no small critical point".into()))?;
    let mut alpha = vec![Poly::zero(); spec.dim()];
    for (j, g) in gens.iter().enumerate() {
        alpha[*g] = Poly::constant(&pt.coords[j] * &lambda[j]);
    }
    let character_units = (0..action.num_characters())
        .filter(|&c| c != action.char_one())
        .map(|chi| character_unit_check(&spec, &action, 0, &alpha, chi, twisted_arity_bound(n, 0, 2).max(2)))
        .collect();
    Ok(GroupReport { n, a, group_order: action.gamma.order(), strict, fourier, character_units })
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeReport {
    pub n: usize,
    pub a: u32,
    /// `G^n_1`-homogeneous first-order candidates up to the gauge arity.
    pub graded_candidates: usize,
    /// Parity-preserving linear candidates `theta^K -> r_j theta^L`.
    pub linear_candidates: usize,
    pub identity: GaugeCertificate,
    /// Number of linear candidates combined into the random gauge.
    pub random_terms: usize,
    pub perturbed_verify: VerifyCertificate,
    pub round_trip: GaugeCertificate,
    pub flipped: GaugeCertificate,
    /// Predicted obstruction: `-2` times the `r_1` part of the model's read-off.
    pub predicted_readoff: String,
    pub readoff_matches: bool,
    /// `u_1^a` is not in the Jacobian ideal of `u_1..u_n`, so the class is nonzero.
    pub class_nonzero: bool,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.identity.solved() && self.random_terms > 0 && self.perturbed_verify.passed && self.round_trip.solved() && !self.flipped.solved() && self.readoff_matches && self.class_nonzero
    }
}

fn flip_r1(c: &Cochain) -> Cochain {
    let mut images: Vec<Poly> = (0..crate::poly::MAX_VARS).map(Poly::var).collect();
    images[0] = Poly::var(0).scale(&Scalar::int(-1));
    c.map_coeffs(|p| p.compose(&images))
}

/// Identity, random round trip, and the `r_1 -> -r_1` obstruction.
pub fn gauge_suite(n: usize, a: u32, gauge_arity: usize, seed: u64) -> Result<GaugeReport> {
    let model = MinimalModel::new(n, a, ModelBounds { rho: Some(1), upsilon: None, arity: n })?;
    let base = model.tables();
    let mut candidates = type_a_gauge_candidates(n, a, gauge_arity)?;
    let graded_candidates = candidates.len();
    let linear = linear_gauge_candidates(n);
    candidates.extend(linear.iter().cloned());
    let (rv, uv, gens) = (r_vars(n), u_vars(n), generators(n));
    let identity = gauge_reconstruct(&base, &base, &rv, &candidates, &gens, &uv, n)?;
    let mut rng = Lcg(seed);
    let random_terms = 6.min(linear.len());
    let mut x = Cochain::new();
    for _ in 0..random_terms {
        let c = &linear[rng.next() as usize % linear.len()];
        x.add(c, &Scalar::int(rng.next() as i64 % 3 + 1));
    }
    let mut perturbed = base.clone();
    perturbed.mu = pushforward_first_order(&base.mu, &x, &base.parity, n, &base.trunc);
    let perturbed_verify = ainf_verify(&perturbed, None);
    let round_trip = gauge_reconstruct(&base, &perturbed, &rv, &candidates, &gens, &uv, n)?;
    let mut flipped_alg = base.clone();
    flipped_alg.mu = flip_r1(&base.mu);
    let flipped = gauge_reconstruct(&base, &flipped_alg, &rv, &candidates, &gens, &uv, n)?;
    let readoff = generator_readoff(&base, n, &uv).homogeneous_part(&rv, 1);
    let r1_part = Poly { terms: readoff.terms.iter().filter(|(m, _)| m.0[0] == 1).map(|(m, c)| (*m, c.clone())).collect() };
    let predicted = r1_part.scale(&Scalar::int(-2));
    let predicted_readoff = predicted.render(&base.vars);
    let readoff_matches = matches!(&flipped.outcome, GaugeOutcome::Obstructed { readoff, cocycle: true, .. } if *readoff == predicted_readoff);
    let power = Mono::var_pow(n, a as u16);
    let class_nonzero = (0..n).all(|j| {
        let mut g = Mono::one();
        for k in (0..n).filter(|&k| k != j) {
            g = g.mul(&Mono::var(n + k));
        }
        !g.divides(&power)
    });
    Ok(GaugeReport {
        n,
        a,
        graded_candidates,
        linear_candidates: linear.len(),
        identity,
        random_terms,
        perturbed_verify,
        round_trip,
        flipped,
        predicted_readoff,
        readoff_matches,
        class_nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_bounds() {
        assert_eq!(twisted_arity_bound(4, 4, 1), 7);
        assert_eq!(twisted_arity_bound(4, 2, 2), 4);
        assert_eq!(twisted_arity_bound(4, 1, 1), 4);
    }

    #[test]
    fn random_stream_is_reproducible() {
        let mut x = Lcg(7);
        let mut y = Lcg(7);
        assert_eq!((0..5).map(|_| x.next()).collect::<Vec<_>>(), (0..5).map(|_| y.next()).collect::<Vec<_>>());
    }
}

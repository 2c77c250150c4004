//! Mirror potentials `Z~ = -u1...un + sum r_j u_j^a`, their Jacobian ideals,
//! and the Gröbner-basis identities behind the Hochschild computations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groebner::{buchberger, is_groebner_basis, quotient_standard_monomials, reduce_by, BlockKind, GroebnerBasis, MonomialOrder};
use crate::linalg::Matrix;
use crate::poly::{Mono, Poly, Vars};
use crate::scalar::Scalar;

/// Potentials for fixed `(n, a)`. In `S = Q[r, u]` the variable `r_j` has
/// index `j` and `u_j` has index `n + j` (zero-based `j`); the specialized
/// potential lives in `Q[u]` with `u_j` at index `j`.
#[derive(Clone, Debug)]
pub struct PotentialFamily {
    pub n: usize,
    pub a: u32,
    pub z_tilde: Poly,
    pub z: Poly,
    pub partials_tilde: Vec<Poly>,
    pub partials: Vec<Poly>,
    pub beta: Poly,
    pub t: Poly,
}

impl PotentialFamily {
    pub fn r(&self, j: usize) -> usize {
        j
    }

    pub fn u(&self, j: usize) -> usize {
        self.n + j
    }

    pub fn vars(&self) -> Vars {
        Vars::ru(self.n)
    }

    /// Elimination order: r-block first, deglex inside blocks.
    pub fn elimination_order(&self) -> MonomialOrder {
        let n = self.n;
        MonomialOrder::new(vec![((0..n).rev().collect(), BlockKind::DegLex), ((n..2 * n).rev().collect(), BlockKind::DegLex)])
    }

    /// Homogeneous lex in `u` with `u_i > u_j` iff `i > j`, then the r-block.
    pub fn homogeneous_lex_order(&self) -> MonomialOrder {
        let n = self.n;
        MonomialOrder::new(vec![((n..2 * n).rev().collect(), BlockKind::DegLex), ((0..n).rev().collect(), BlockKind::DegLex)])
    }

    /// Order on `Q[u]` for the specialized ideal.
    pub fn u_order(&self) -> MonomialOrder {
        MonomialOrder::deglex((0..self.n).rev().collect())
    }
}

fn mono_poly(c: i64, exps: &[(usize, u16)]) -> Poly {
    let mut m = Mono::one();
    for &(v, e) in exps {
        m.0[v] += e;
    }
    Poly::term(Scalar::int(c), m)
}

pub fn build_potentials(n: usize, a: u32) -> Result<PotentialFamily> {
    if n < 4 || a < 2 || a as usize > n - 1 || 2 * n > crate::poly::MAX_VARS {
        return Err(Error::Invalid(format!("need n >= 4, 2 <= a <= n-1 and n <= 8, got n={n}, a={a}")));
    }
    let a16 = a as u16;
    let all_u: Vec<(usize, u16)> = (0..n).map(|j| (n + j, 1)).collect();
    let mut z_tilde = mono_poly(-1, &all_u);
    for j in 0..n {
        z_tilde = &z_tilde + &mono_poly(1, &[(j, 1), (n + j, a16)]);
    }
    let partials_tilde: Vec<Poly> = (0..n).map(|j| z_tilde.diff(n + j)).collect();
    let u_only: Vec<(usize, u16)> = (0..n).map(|j| (j, 1)).collect();
    let mut z = mono_poly(-1, &u_only);
    for j in 0..n {
        z = &z + &mono_poly(1, &[(j, a16)]);
    }
    let partials: Vec<Poly> = (0..n).map(|j| z.diff(j)).collect();
    let beta = mono_poly(1, &[(0, 1), (n, a16)]);
    let t = mono_poly(1, &(0..n).map(|j| (j, 1)).collect::<Vec<_>>());
    Ok(PotentialFamily { n, a, z_tilde, z, partials_tilde, partials, beta, t })
}

/// The three-shape family in variables `r, u`:
/// `u_{[n]-1} - r1 u1^(a-1)`, `r_j u_j^a - r1 u1^a` (j != 1), and
/// `(r1 u1^a)^(|Kc|-1) u_K - r_Kc u_Kc^(a-1)` for `1 in K`, `K != [n]`.
pub fn paper_family(fam: &PotentialFamily) -> Vec<Poly> {
    let n = fam.n;
    let a = fam.a as u16;
    let mut out = Vec::new();
    let ubar1: Vec<(usize, u16)> = (1..n).map(|k| (n + k, 1)).collect();
    out.push(&mono_poly(1, &ubar1) - &mono_poly(1, &[(0, 1), (n, a - 1)]));
    for j in 1..n {
        out.push(&mono_poly(1, &[(j, 1), (n + j, a)]) - &mono_poly(1, &[(0, 1), (n, a)]));
    }
    for mask in 0u32..(1 << n) {
        if mask & 1 == 0 || mask == (1 << n) - 1 {
            continue;
        }
        let kc: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
        let k: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let e = (kc.len() - 1) as u16;
        let mut lead: Vec<(usize, u16)> = vec![(0, e), (n, a * e)];
        lead.extend(k.iter().map(|&i| (n + i, 1)));
        let mut tail: Vec<(usize, u16)> = kc.iter().map(|&i| (i, 1)).collect();
        tail.extend(kc.iter().map(|&i| (n + i, a - 1)));
        out.push(&mono_poly(1, &lead) - &mono_poly(1, &tail));
    }
    out
}

/// Diagonal rescaling `u_j -> lambda_j u_j`, `r_j -> rho_j r_j`.
#[derive(Clone, Debug, Serialize)]
pub struct Rescaling {
    pub lambda: Vec<String>,
    pub rho: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PaperGroebnerCertificate {
    pub n: usize,
    pub a: u32,
    pub family_size: usize,
    pub is_groebner: bool,
    pub s_pairs_checked: usize,
    pub rescaling: Rescaling,
    pub partials_in_family_ideal: bool,
    pub family_in_jacobian_ideal: bool,
    pub residual_generators: Vec<String>,
}

impl PaperGroebnerCertificate {
    pub fn passed(&self) -> bool {
        self.is_groebner && self.partials_in_family_ideal && self.family_in_jacobian_ideal
    }
}

/// Solve for the diagonal rescaling making `-dZ~/du_j` proportional to
/// `u_{[n]-j} - r_j u_j^(a-1)`: with `lambda = 1` this forces
/// `a rho_j lambda_j^a = prod lambda`.
fn solve_rescaling(n: usize, a: u32) -> (Vec<Scalar>, Vec<Scalar>) {
    let lambda = vec![Scalar::one(); n];
    let prod = lambda.iter().fold(Scalar::one(), |acc, x| &acc * x);
    let rho = (0..n).map(|j| &prod * &(&Scalar::int(a as i64) * &lambda[j].pow(a as u64)).inv()).collect();
    (lambda, rho)
}

fn rescale(p: &Poly, n: usize, lambda: &[Scalar], rho: &[Scalar]) -> Poly {
    let mut images = Vec::with_capacity(2 * n);
    for j in 0..n {
        images.push(Poly::term(rho[j].clone(), Mono::var(j)));
    }
    for j in 0..n {
        images.push(Poly::term(lambda[j].clone(), Mono::var(n + j)));
    }
    p.compose(&images)
}

pub fn verify_paper_groebner(n: usize, a: u32) -> Result<PaperGroebnerCertificate> {
    let fam = build_potentials(n, a)?;
    let family = paper_family(&fam);
    let ord = fam.homogeneous_lex_order();
    let cert = is_groebner_basis(&family, &ord);
    let (lambda, rho) = solve_rescaling(n, a);
    let rescaled: Vec<Poly> = fam.partials_tilde.iter().map(|p| rescale(p, n, &lambda, &rho)).collect();
    let vars = fam.vars();
    let mut residual = Vec::new();
    let mut partials_ok = true;
    if cert.is_groebner {
        for p in &rescaled {
            let r = reduce_by(p, &family, &ord);
            if !r.is_zero() {
                partials_ok = false;
                residual.push(r.render(&vars));
            }
        }
    } else {
        partials_ok = false;
    }
    // The partials have coprime leading terms a r_j u_j^(a-1) in the
    // elimination order, so they form a Gröbner basis there.
    let elim = fam.elimination_order();
    let jac_cert = is_groebner_basis(&rescaled, &elim);
    let mut family_ok = jac_cert.is_groebner;
    for f in &family {
        let r = reduce_by(f, &rescaled, &elim);
        if !r.is_zero() {
            family_ok = false;
            residual.push(r.render(&vars));
        }
    }
    Ok(PaperGroebnerCertificate {
        n,
        a,
        family_size: family.len(),
        is_groebner: cert.is_groebner,
        s_pairs_checked: cert.pairs.len(),
        rescaling: Rescaling { lambda: lambda.iter().map(|x| x.to_string()).collect(), rho: rho.iter().map(|x| x.to_string()).collect() },
        partials_in_family_ideal: partials_ok,
        family_in_jacobian_ideal: family_ok,
        residual_generators: residual,
    })
}

/// Gröbner basis of `Jac(Z~)` in the elimination order (the partials themselves).
pub fn jacobian_basis_tilde(fam: &PotentialFamily) -> GroebnerBasis {
    buchberger(&fam.partials_tilde, &fam.elimination_order())
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub n: usize,
    pub a: u32,
    pub relation_residual: String,
    pub relation_holds: bool,
    pub beta_independent_of_index: bool,
    pub product_identity_holds: bool,
    /// For each i <= n-2: whether (r1 u1^a)^i avoids every leading term.
    pub powers_are_standard: Vec<bool>,
}

impl BetaReport {
    pub fn passed(&self) -> bool {
        self.relation_holds && self.beta_independent_of_index && self.product_identity_holds && self.powers_are_standard.iter().all(|&x| x)
    }
}

pub fn beta_relations(n: usize, a: u32) -> Result<BetaReport> {
    let fam = build_potentials(n, a)?;
    let gb = jacobian_basis_tilde(&fam);
    let aa = Scalar::int((a as i64).pow(a));
    let rel = &fam.beta.pow(n as u32 - 1) - &(&fam.t * &fam.beta.pow(a - 1)).scale(&aa);
    let residual = gb.normal_form(&rel);
    let beta_j = (1..n).all(|j| {
        let bj = mono_poly(1, &[(j, 1), (n + j, a as u16)]);
        gb.contains(&(&bj - &fam.beta))
    });
    let p = mono_poly(1, &(0..n).map(|j| (n + j, 1)).collect::<Vec<_>>());
    let an = Scalar::int((a as i64).pow(n as u32));
    let prod_rel = &p.pow(n as u32 - 1) - &(&fam.t * &p.pow(a - 1)).scale(&an);
    let product_ok = gb.contains(&prod_rel);
    let family = paper_family(&fam);
    let ord = fam.homogeneous_lex_order();
    let leads: Vec<Mono> = family.iter().map(|f| ord.leading(f).unwrap().0).collect();
    let powers_are_standard = (0..=n - 2)
        .map(|i| {
            let m = Mono::var_pow(0, i as u16).mul(&Mono::var_pow(n, (a as usize * i) as u16));
            !leads.iter().any(|l| l.divides(&m))
        })
        .collect();
    Ok(BetaReport {
        n,
        a,
        relation_residual: residual.render(&fam.vars()),
        relation_holds: residual.is_zero(),
        beta_independent_of_index: beta_j,
        product_identity_holds: product_ok,
        powers_are_standard,
    })
}

/// Jacobian ring of the specialized potential in `Q[u]`.
pub struct SpecializedJacobian {
    pub fam: PotentialFamily,
    pub gb: GroebnerBasis,
    pub basis: Vec<Mono>,
}

impl SpecializedJacobian {
    pub fn new(n: usize, a: u32) -> Result<SpecializedJacobian> {
        let fam = build_potentials(n, a)?;
        let gb = buchberger(&fam.partials, &fam.u_order());
        let st = quotient_standard_monomials(&gb, &(0..n).collect::<Vec<_>>(), None);
        if !st.zero_dimensional {
            return Err(Error::Verification("specialized Jacobian ideal is not zero-dimensional".into()));
        }
        let basis = st.monomials.iter().map(|e| Mono::from_exps(e)).collect();
        Ok(SpecializedJacobian { fam, gb, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the normal form of `f` in the standard-monomial basis.
    pub fn coords(&self, f: &Poly) -> Vec<Scalar> {
        let nf = self.gb.normal_form(f);
        let mut v = vec![Scalar::zero(); self.basis.len()];
        for (m, c) in &nf.terms {
            let idx = self.basis.iter().position(|b| b == m).expect("normal form term outside the staircase");
            v[idx] = c.clone();
        }
        v
    }

    /// Matrix of multiplication by `f`.
    pub fn mult_matrix(&self, f: &Poly) -> Matrix {
        let cols: Vec<Vec<Scalar>> = self.basis.iter().map(|m| self.coords(&(f * &Poly::term(Scalar::one(), *m)))).collect();
        Matrix::from_columns(&cols)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub n: usize,
    pub a: u32,
    pub invariant_monomials_factor: bool,
    pub invariant_degree_bound: u32,
    pub q_of_beta_in_ideal: bool,
    /// `u_j^(a(a-1)) (u_j^(a(n-a)) - a^a)` lies in the ideal for every j.
    pub local_power_witness: bool,
    /// Constant term of the cofactor `u_j^(a(n-a)) - a^a`.
    pub cofactor_constant: String,
    pub beta_power_a_minus_1_local_zero: bool,
    pub beta_power_a_minus_2_local_nonzero: bool,
    pub zero_dimensional: bool,
    pub quotient_dimension: usize,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.invariant_monomials_factor
            && self.q_of_beta_in_ideal
            && self.local_power_witness
            && self.beta_power_a_minus_1_local_zero
            && self.beta_power_a_minus_2_local_nonzero
            && self.zero_dimensional
    }
}

/// Monomials `u^b` of Gamma-degree zero (`b = k(1,...,1) mod a`) up to the
/// bound all factor as `P^k prod (u_j^a)^{m_j}`.
fn invariant_monomials_factor(n: usize, a: u32, bound: u32) -> bool {
    fn rec(n: usize, a: u32, left: u32, cur: &mut Vec<u32>) -> bool {
        if cur.len() == n {
            let k = cur[0] % a;
            if cur.iter().any(|&b| b % a != k) {
                return true;
            }
            return cur.iter().all(|&b| b >= k && (b - k).is_multiple_of(a));
        }
        (0..=left).all(|e| {
            cur.push(e);
            let ok = rec(n, a, left - e, cur);
            cur.pop();
            ok
        })
    }
    rec(n, a, bound, &mut Vec::new())
}

pub fn invariant_and_local_checks(n: usize, a: u32) -> Result<InvariantReport> {
    let jac = SpecializedJacobian::new(n, a)?;
    let aa = (a as i64).pow(a);
    let u1a = mono_poly(1, &[(0, a as u16)]);
    let q = &u1a.pow(n as u32 - 1) - &u1a.pow(a - 1).scale(&Scalar::int(aa));
    let q_ok = jac.gb.contains(&q);
    let witness_ok = (0..n).all(|j| {
        let uja = mono_poly(1, &[(j, a as u16)]);
        let w = &uja.pow(a - 1) * &(&uja.pow(n as u32 - a) - &Poly::int(aa));
        jac.gb.contains(&w)
    });
    let m = jac.mult_matrix(&u1a);
    let dim = jac.dim();
    let stable = m.pow(dim as u32).rank();
    let rank_k = |k: u32| m.pow(k).rank();
    let bound = 3 * a;
    Ok(InvariantReport {
        n,
        a,
        invariant_monomials_factor: invariant_monomials_factor(n, a, bound),
        invariant_degree_bound: bound,
        q_of_beta_in_ideal: q_ok,
        local_power_witness: witness_ok,
        cofactor_constant: (-aa).to_string(),
        beta_power_a_minus_1_local_zero: rank_k(a - 1) == stable,
        beta_power_a_minus_2_local_nonzero: rank_k(a - 2) > stable,
        zero_dimensional: true,
        quotient_dimension: dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potentials_4_3() {
        let fam = build_potentials(4, 3).unwrap();
        let v = fam.vars();
        assert_eq!(fam.z_tilde, v.parse("-u1*u2*u3*u4 + r1*u1^3 + r2*u2^3 + r3*u3^3 + r4*u4^3").unwrap());
        assert_eq!(fam.partials_tilde[0], v.parse("-u2*u3*u4 + 3*r1*u1^2").unwrap());
        let fam2 = build_potentials(4, 2).unwrap();
        assert_eq!(fam2.z, Vars::u(4).parse("-u1*u2*u3*u4 + u1^2 + u2^2 + u3^2 + u4^2").unwrap());
        assert!(build_potentials(4, 4).is_err());
        assert!(build_potentials(3, 2).is_err());
    }

    #[test]
    fn family_size() {
        let fam = build_potentials(5, 3).unwrap();
        assert_eq!(paper_family(&fam).len(), 1 + 4 + 15);
    }

    #[test]
    fn paper_groebner_4_3() {
        let c = verify_paper_groebner(4, 3).unwrap();
        assert!(c.passed(), "{c:?}");
        assert_eq!(c.rescaling.rho, vec!["1/3"; 4]);
    }

    #[test]
    fn paper_groebner_4_2() {
        assert!(verify_paper_groebner(4, 2).unwrap().passed());
    }

    #[test]
    fn beta_4_3() {
        let r = beta_relations(4, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn specialized_dimension_4_3() {
        // Milnor number 2^4 at the origin plus 27 nondegenerate small points.
        let jac = SpecializedJacobian::new(4, 3).unwrap();
        assert_eq!(jac.dim(), 43);
        for j in 0..4 {
            assert!(jac.gb.leads.iter().any(|l| l.degree() == l.0[j] as u32));
        }
    }

    #[test]
    fn local_checks_4_3() {
        let r = invariant_and_local_checks(4, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

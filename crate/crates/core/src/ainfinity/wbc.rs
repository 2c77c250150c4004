//! Homotopy units, pre-disk potentials, Maurer-Cartan checks, twisted
//! structure maps and contracting homotopies between twisted objects.

use serde::Serialize;

use super::{basis_elem, elem_add_scaled, elem_is_zero, sign, zero_elem, AInf, AInfAlgebra, Elem, Truncation};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Calls `f` with every distribution of extra inputs over `slots` slots whose
/// total stays at most `extra_max`.
pub fn for_each_distribution(slots: usize, extra_max: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(counts: &mut Vec<usize>, slot: usize, left: usize, f: &mut dyn FnMut(&[usize])) {
        if slot == counts.len() {
            f(counts);
            return;
        }
        for c in 0..=left {
            counts[slot] = c;
            rec(counts, slot + 1, left - c, f);
        }
        counts[slot] = 0;
    }
    let mut counts = vec![0; slots];
    rec(&mut counts, 0, extra_max, f);
}

/// `mu^k_{alpha_k..alpha_0}(x_k..x_1) = sum mu(alpha_k.., x_k, alpha_(k-1).., .., x_1, alpha_0..)`
/// over all insertions with total arity at most `max_total`. `alphas` is
/// written left to right and has one more entry than `inputs`.
pub fn twisted_by_patterns(alg: &dyn AInf, alphas: &[&Elem], inputs: &[&Elem], max_total: usize) -> Elem {
    assert_eq!(alphas.len(), inputs.len() + 1);
    let k = inputs.len();
    let mut out = zero_elem(alg.dim());
    if max_total < k {
        return out;
    }
    let alpha_zero: Vec<bool> = alphas.iter().map(|a| elem_is_zero(a)).collect();
    for_each_distribution(k + 1, max_total - k, &mut |counts| {
        if counts.iter().zip(&alpha_zero).any(|(&c, &z)| c > 0 && z) {
            return;
        }
        let mut seq: Vec<&Elem> = Vec::new();
        for t in 0..=k {
            for _ in 0..counts[t] {
                seq.push(alphas[t]);
            }
            if t < k {
                seq.push(inputs[t]);
            }
        }
        let r = alg.mu(&seq);
        elem_add_scaled(&mut out, &r, &Poly::one());
    });
    out
}

/// A-infinity structures that can evaluate twisted operations, possibly faster
/// than by summing over insertion patterns.
pub trait Twistable: AInf {
    fn twisted(&self, alphas: &[&Elem], inputs: &[&Elem], max_total: usize) -> Elem;
    fn as_ainf(&self) -> &dyn AInf;
}

impl Twistable for AInfAlgebra {
    fn twisted(&self, alphas: &[&Elem], inputs: &[&Elem], max_total: usize) -> Elem {
        twisted_by_patterns(self, alphas, inputs, max_total)
    }
    fn as_ainf(&self) -> &dyn AInf {
        self
    }
}

/// Strictly unital `A` extended by `f` and `e+` with `mu^1(f) = e+ - e`,
/// `e+` a strict unit, and `f` entering no other operation. The new basis
/// vectors are appended as `f = dim(A)` and `e+ = dim(A) + 1`.
pub struct UnitExtension<'a> {
    pub base: &'a dyn Twistable,
    pub unit: usize,
}

impl<'a> UnitExtension<'a> {
    pub fn new(base: &'a dyn Twistable, unit: usize) -> UnitExtension<'a> {
        UnitExtension { base, unit }
    }

    pub fn f(&self) -> usize {
        self.base.dim()
    }

    pub fn e_plus(&self) -> usize {
        self.base.dim() + 1
    }

    /// Includes an element of `A`.
    pub fn lift(&self, x: &[Poly]) -> Elem {
        let mut y = x.to_vec();
        y.resize(self.dim(), Poly::zero());
        y
    }

    fn base_part(&self, x: &[Poly]) -> Elem {
        x[..self.base.dim()].to_vec()
    }

    fn extra_parts_zero(&self, x: &[Poly]) -> bool {
        x[self.f()].is_zero() && x[self.e_plus()].is_zero()
    }
}

impl AInf for UnitExtension<'_> {
    fn dim(&self) -> usize {
        self.base.dim() + 2
    }

    fn parity(&self, b: usize) -> u8 {
        if b == self.f() {
            1
        } else if b == self.e_plus() {
            0
        } else {
            self.base.parity(b)
        }
    }

    fn mu(&self, inputs: &[&Elem]) -> Elem {
        let d = self.base.dim();
        let (f, ep) = (self.f(), self.e_plus());
        let parts: Vec<Elem> = inputs.iter().map(|x| self.base_part(x)).collect();
        let refs: Vec<&Elem> = parts.iter().collect();
        let mut out = self.lift(&self.base.mu(&refs));
        match inputs.len() {
            1 => {
                let c = &inputs[0][f];
                out[ep] = &out[ep] + c;
                out[self.unit] = &out[self.unit] - c;
            }
            2 => {
                let (x, y) = (inputs[0], inputs[1]);
                if !x[ep].is_zero() {
                    for b in 0..d + 2 {
                        let t = (&x[ep] * &y[b]).scale(&sign(self.parity(b) == 1));
                        out[b] = &out[b] + &t;
                    }
                }
                if !y[ep].is_zero() {
                    for b in 0..d + 1 {
                        out[b] = &out[b] + &(&x[b] * &y[ep]);
                    }
                }
            }
            _ => {}
        }
        out
    }

    fn max_arity(&self) -> usize {
        self.base.max_arity().max(2)
    }

    fn label(&self, b: usize) -> String {
        if b == self.f() {
            "f".into()
        } else if b == self.e_plus() {
            "e+".into()
        } else {
            self.base.label(b)
        }
    }

    fn truncation(&self) -> Truncation {
        self.base.truncation()
    }
}

impl Twistable for UnitExtension<'_> {
    fn twisted(&self, alphas: &[&Elem], inputs: &[&Elem], max_total: usize) -> Elem {
        let a_parts: Vec<Elem> = alphas.iter().map(|a| self.base_part(a)).collect();
        let x_parts: Vec<Elem> = inputs.iter().map(|x| self.base_part(x)).collect();
        let ar: Vec<&Elem> = a_parts.iter().collect();
        let xr: Vec<&Elem> = x_parts.iter().collect();
        let mut out = self.lift(&self.base.twisted(&ar, &xr, max_total));
        if alphas.iter().all(|a| a[self.e_plus()].is_zero()) && inputs.iter().all(|x| self.extra_parts_zero(x)) && alphas.iter().all(|a| a[self.f()].is_zero()) {
            return out;
        }
        // Terms involving f or e+ only occur in arity at most two.
        let lifted_a: Vec<Elem> = a_parts.iter().map(|a| self.lift(a)).collect();
        let lifted_x: Vec<Elem> = x_parts.iter().map(|x| self.lift(x)).collect();
        let la: Vec<&Elem> = lifted_a.iter().collect();
        let lx: Vec<&Elem> = lifted_x.iter().collect();
        let full = twisted_by_patterns(self, alphas, inputs, max_total.min(2));
        let base_only = twisted_by_patterns(self, &la, &lx, max_total.min(2));
        for b in 0..self.dim() {
            out[b] = &(&out[b] + &full[b]) - &base_only[b];
        }
        out
    }

    fn as_ainf(&self) -> &dyn AInf {
        self
    }
}

/// Table version of the homotopy-unit extension for a strictly unital algebra.
pub fn homotopy_unit_extension(alg: &AInfAlgebra) -> Result<AInfAlgebra> {
    alg.strict_unit_check().map_err(Error::Verification)?;
    let e = alg.unit.expect("checked");
    let d = alg.labels.len();
    let mut labels = alg.labels.clone();
    labels.push("f".into());
    labels.push("e+".into());
    let mut parity = alg.parity.clone();
    parity.extend([1, 0]);
    let mut out = AInfAlgebra::new(labels, parity, alg.vars.clone(), alg.s_max.max(2));
    out.zdeg = alg.zdeg.clone();
    out.zdeg.extend([-1, 0]);
    out.trunc = alg.trunc.clone();
    out.unit = Some(d + 1);
    out.mu = alg.mu.clone();
    let (f, ep) = (d, d + 1);
    out.mu.add_term(&[f], ep, &Poly::one());
    out.mu.add_term(&[f], e, &Poly::int(-1));
    for b in 0..d + 2 {
        out.mu.add_term(&[ep, b], b, &Poly::constant(sign(out.parity[b] == 1)));
        if b != ep {
            out.mu.add_term(&[b, ep], b, &Poly::one());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PreDiskPotential {
    pub potential: Poly,
    /// Contribution of each arity `s` to the coefficient of the unit.
    pub per_arity: Vec<Poly>,
    pub max_arity: usize,
}

/// `P'(v) = sum_s coefficient of e in mu^s(v, .., v)` for `v = sum v_j b_j`
/// with formal coordinates. Fails with a witness if some `mu^s(v, .., v)` is
/// not a multiple of `e`.
pub fn pre_disk_potential(alg: &dyn AInf, unit: usize, odd: &[usize], v_vars: &[usize], max_arity: usize) -> Result<PreDiskPotential> {
    let v = formal_vector(alg.dim(), odd, v_vars);
    let mut per_arity = Vec::new();
    let mut total = Poly::zero();
    for s in 0..=max_arity {
        let inputs: Vec<&Elem> = vec![&v; s];
        let r = alg.mu(&inputs);
        for (b, p) in r.iter().enumerate() {
            if b != unit && !p.is_zero() {
                return Err(Error::Verification(format!("mu^{s}(v,...,v) has a component along {} with coefficient {:?}", alg.label(b), p)));
            }
        }
        total = &total + &r[unit];
        per_arity.push(r[unit].clone());
    }
    Ok(PreDiskPotential { potential: total, per_arity, max_arity })
}

pub fn formal_vector(dim: usize, odd: &[usize], v_vars: &[usize]) -> Elem {
    let mut v = zero_elem(dim);
    for (&b, &x) in odd.iter().zip(v_vars) {
        v[b] = Poly::var(x);
    }
    v
}

/// `iota(v) = v + P'(v) f` inside the extension.
pub fn iota(ext: &UnitExtension, odd: &[usize], coords: &[Poly], potential_value: &Poly) -> Elem {
    let mut a = zero_elem(ext.dim());
    for (&b, c) in odd.iter().zip(coords) {
        a[b] = c.clone();
    }
    a[ext.f()] = potential_value.clone();
    a
}

/// `sum_s mu^s(alpha, .., alpha) - value e+`.
pub fn mc_residual(ext: &UnitExtension, alpha: &Elem, value: &Poly, max_arity: usize) -> Elem {
    let mut total = zero_elem(ext.dim());
    for s in 0..=max_arity {
        let inputs: Vec<&Elem> = vec![alpha; s];
        let r = ext.mu(&inputs);
        elem_add_scaled(&mut total, &r, &Poly::one());
    }
    let ep = ext.e_plus();
    total[ep] = &total[ep] - value;
    total
}

fn scalar_of(p: &Poly) -> Result<Scalar> {
    if !p.is_constant() {
        return Err(Error::Invalid(format!("expected a numeric coefficient, got {p:?}")));
    }
    Ok(p.constant_term())
}

/// Largest total arity to evaluate for twisted operations on the given basis inputs.
pub type ArityBound<'a> = &'a dyn Fn(&[usize]) -> usize;

/// Matrix of `x -> mu^1_{alpha_1, alpha_2}(x)` on the basis (columns are images).
pub fn twisted_differential(ext: &UnitExtension, alpha1: &Elem, alpha2: &Elem, bound: ArityBound) -> Result<Matrix> {
    let d = ext.dim();
    let mut m = Matrix::zeros(d, d);
    for b in 0..d {
        let x = basis_elem(d, b);
        let y = ext.twisted(&[alpha2, alpha1], &[&x], bound(&[b]));
        for (o, p) in y.iter().enumerate() {
            m[(o, b)] = scalar_of(p)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedReport {
    /// `mu^1_alpha` vanishes on every basis vector other than `f`.
    pub mu1_vanishes_off_f: bool,
    /// `mu^1_alpha(f) = e+ - e`.
    pub mu1_f_ok: bool,
    /// Rank of the cohomology of `(A+, mu^1_alpha)`.
    pub cohomology_rank: usize,
    /// Symmetrized `mu^2_alpha` on the odd generators is a multiple of `e`.
    pub symmetrized_is_scalar: bool,
    /// Coefficient of `e` in `mu^2_alpha(b_i, b_j) + mu^2_alpha(b_j, b_i)`.
    #[serde(skip)]
    pub hessian: Matrix,
}

/// Twisted differential and symmetrized product at a numeric weak bounding cochain.
pub fn twisted_report(ext: &UnitExtension, alpha: &Elem, odd: &[usize], bound: ArityBound) -> Result<TwistedReport> {
    let d = ext.dim();
    let dm = twisted_differential(ext, alpha, alpha, bound)?;
    let (f, ep, e) = (ext.f(), ext.e_plus(), ext.unit);
    let mut off_f = true;
    for b in 0..d {
        if b != f && (0..d).any(|o| !dm[(o, b)].is_zero()) {
            off_f = false;
        }
    }
    let f_ok = (0..d).all(|o| {
        let want = if o == ep {
            Scalar::one()
        } else if o == e {
            Scalar::int(-1)
        } else {
            Scalar::zero()
        };
        dm[(o, f)] == want
    });
    let rank = dm.rank();
    let n = odd.len();
    let mut hess = Matrix::zeros(n, n);
    let mut scalar = true;
    for i in 0..n {
        for j in 0..n {
            let xi = basis_elem(d, odd[i]);
            let xj = basis_elem(d, odd[j]);
            let a = ext.twisted(&[alpha, alpha, alpha], &[&xi, &xj], bound(&[odd[i], odd[j]]));
            let b = ext.twisted(&[alpha, alpha, alpha], &[&xj, &xi], bound(&[odd[j], odd[i]]));
            for o in 0..d {
                let s = scalar_of(&(&a[o] + &b[o]))?;
                if o == e {
                    hess[(i, j)] = s;
                } else if !s.is_zero() {
                    scalar = false;
                }
            }
        }
    }
    Ok(TwistedReport { mu1_vanishes_off_f: off_f, mu1_f_ok: f_ok, cohomology_rank: d - 2 * rank, symmetrized_is_scalar: scalar, hessian: hess })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyCertificate {
    /// Number of homogeneous pieces `H_{-1-2i}` that were nonzero.
    pub pieces: usize,
    /// Sign convention of the seed `eps(|x|) iota_eta`.
    pub seed: String,
    pub d_squared_zero: bool,
    pub verified: bool,
}

fn degree_part(m: &Matrix, zdeg: &[i64], k: i64) -> Matrix {
    let mut out = Matrix::zeros(m.rows, m.cols);
    for o in 0..m.rows {
        for b in 0..m.cols {
            if zdeg[o] - zdeg[b] == k {
                out[(o, b)] = m[(o, b)].clone();
            }
        }
    }
    out
}

fn anticommutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).add(&b.mul(a))
}

/// Contracting homotopy for `d = mu^1_{alpha_1, alpha_2}` between two weak
/// bounding cochains with equal potential value and distinct coordinates.
///
/// `A` must be indexed by subsets of the odd generators `odd[j] = 1 << j`,
/// with integer degree the subset size; `f` has degree -1 and `e+` degree 0.
/// Returns the matrix of `H` with `[d, H] = Id`.
pub fn contracting_homotopy(ext: &UnitExtension, v1: &[Scalar], v2: &[Scalar], value1: &Scalar, value2: &Scalar, alpha1: &Elem, alpha2: &Elem, bound: ArityBound) -> Result<(Matrix, HomotopyCertificate)> {
    if v1 == v2 {
        return Err(Error::Invalid("contracting homotopy needs distinct critical points".into()));
    }
    if value1 != value2 {
        return Err(Error::Invalid(format!("critical values differ: {value1} vs {value2}")));
    }
    let n = v1.len();
    let da = ext.base.dim();
    if da != 1 << n {
        return Err(Error::Invalid("base algebra must be indexed by subsets of the generators".into()));
    }
    let d = ext.dim();
    let (f, ep) = (ext.f(), ext.e_plus());
    let mut zdeg: Vec<i64> = (0..da).map(|m| (m as u32).count_ones() as i64).collect();
    zdeg.extend([-1, 0]);
    let dm = twisted_differential(ext, alpha1, alpha2, bound)?;
    let d_squared_zero = dm.mul(&dm).is_zero();
    let d1 = degree_part(&dm, &zdeg, 1);
    let w: Vec<Scalar> = v2.iter().zip(v1).map(|(a, b)| a - b).collect();
    let k = w.iter().position(|x| !x.is_zero()).expect("distinct points");
    let eta_k = w[k].inv();
    // iota_eta as a left contraction with eta = e_k^* / w_k.
    let mut contraction = Matrix::zeros(d, d);
    for m in 0..da as u32 {
        if m >> k & 1 == 1 {
            let before = (m & ((1 << k) - 1)).count_ones();
            let c = if before % 2 == 0 { eta_k.clone() } else { -&eta_k };
            contraction[((m & !(1 << k)) as usize, m as usize)] = c;
        }
    }
    let id = Matrix::identity(d);
    let seeds: [(&str, Box<dyn Fn(i64) -> Scalar>); 4] = [
        ("+", Box::new(|_| Scalar::one())),
        ("-", Box::new(|_| Scalar::int(-1))),
        ("(-1)^|x|", Box::new(|g| sign(g % 2 != 0))),
        ("-(-1)^|x|", Box::new(|g| sign(g % 2 == 0))),
    ];
    let mut chosen = None;
    for (name, eps) in seeds.iter() {
        let mut h = Matrix::zeros(d, d);
        for o in 0..da {
            for b in 0..da {
                if !contraction[(o, b)].is_zero() {
                    h[(o, b)] = &contraction[(o, b)] * &eps(zdeg[b]);
                }
            }
        }
        h[(f, ep)] = Scalar::one();
        if anticommutator(&d1, &h) == id {
            chosen = Some((name.to_string(), h));
            break;
        }
    }
    let (seed_name, h_seed) = chosen.ok_or_else(|| Error::Verification("no contraction seed inverts the leading differential".into()))?;
    let mut total = h_seed.clone();
    let mut pieces = 1;
    let span = zdeg.iter().max().unwrap() - zdeg.iter().min().unwrap() + 2;
    for i in 1..=span {
        let comm = degree_part(&anticommutator(&dm, &total), &zdeg, -2 * i);
        let piece = h_seed.mul(&comm).scale(&Scalar::int(-1));
        if !piece.is_zero() {
            pieces += 1;
            total = total.add(&piece);
        }
    }
    let verified = anticommutator(&dm, &total) == id;
    Ok((total, HomotopyCertificate { pieces, seed: seed_name, d_squared_zero, verified }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfinity::{ainf_verify, AInfAlgebra};
    use crate::poly::Vars;

    /// Exterior algebra on two generators deformed by `mu^2(t_i, t_j) += q_ij e`
    /// symmetric, i.e. a Clifford algebra written with Seidel signs.
    fn clifford_toy(q: [[i64; 2]; 2]) -> AInfAlgebra {
        let mut alg = AInfAlgebra::exterior(2);
        alg.vars = Vars::new(vec!["v1".into(), "v2".into()]);
        for i in 0..2 {
            for j in 0..2 {
                // The product t_i t_j gains q_ij; mu^2(x, y) = (-1)^|y| x y.
                alg.mu.add_term(&[1 << i, 1 << j], 0, &Poly::int(-q[i][j]));
            }
        }
        alg
    }

    #[test]
    fn extension_satisfies_relations() {
        let alg = AInfAlgebra::exterior(2);
        let ext = homotopy_unit_extension(&alg).unwrap();
        assert!(ainf_verify(&ext, None).passed);
        let e = UnitExtension::new(&alg, 0);
        let t = crate::ainfinity::tabulate(&e, ext.labels.clone(), ext.vars.clone(), 2);
        assert_eq!(t.mu, ext.mu);
    }

    #[test]
    fn wedge_only_potential_vanishes() {
        let mut alg = AInfAlgebra::exterior(2);
        alg.vars = Vars::new(vec!["v1".into(), "v2".into()]);
        let p = pre_disk_potential(&alg, 0, &[1, 2], &[0, 1], 4).unwrap();
        assert!(p.potential.is_zero());
    }

    #[test]
    fn clifford_deformation_potential_is_the_form() {
        let alg = clifford_toy([[1, 0], [0, 3]]);
        let p = pre_disk_potential(&alg, 0, &[1, 2], &[0, 1], 3).unwrap();
        // mu^2(v, v) = -(v v) = -Q(v) e; the sign is that of the Seidel product.
        assert_eq!(p.potential, alg.vars.parse("-v1^2 - 3*v2^2").unwrap());
        let ext = UnitExtension::new(&alg, 0);
        let a = iota(&ext, &[1, 2], &[Poly::var(0), Poly::var(1)], &p.potential);
        assert!(elem_is_zero(&mc_residual(&ext, &a, &p.potential, 3)));
    }

    #[test]
    fn derivative_identity_and_hessian() {
        let alg = clifford_toy([[2, 0], [0, 5]]);
        let ext = UnitExtension::new(&alg, 0);
        let p = pre_disk_potential(&alg, 0, &[1, 2], &[0, 1], 3).unwrap();
        for (x, y) in [(1, 2), (-3, 1), (0, 0)] {
            let pt = [Scalar::int(x), Scalar::int(y)];
            let val = Poly::constant(p.potential.eval(&pt));
            let a = iota(&ext, &[1, 2], &[Poly::int(x), Poly::int(y)], &val);
            for i in 0..2 {
                let xi = basis_elem(ext.dim(), 1 << i);
                let r = ext.twisted(&[&a, &a], &[&xi], 3);
                assert_eq!(r[0].constant_term(), p.potential.diff(i).eval(&pt));
            }
        }
        // At the critical point v = 0 the twisted differential vanishes.
        let a = zero_elem(ext.dim());
        let rep = twisted_report(&ext, &a, &[1, 2], &|_| 3).unwrap();
        assert!(rep.mu1_vanishes_off_f && rep.mu1_f_ok && rep.symmetrized_is_scalar);
        assert_eq!(rep.cohomology_rank, 4);
        assert_eq!(rep.hessian, Matrix::from_ints(&[&[-4, 0], &[0, -10]]));
    }

    #[test]
    fn wedge_homotopy_is_the_seed() {
        let alg = AInfAlgebra::exterior(2);
        let ext = UnitExtension::new(&alg, 0);
        let v1 = [Scalar::int(1), Scalar::int(0)];
        let v2 = [Scalar::int(0), Scalar::int(2)];
        let mk = |v: &[Scalar]| iota(&ext, &[1, 2], &[Poly::constant(v[0].clone()), Poly::constant(v[1].clone())], &Poly::zero());
        let (a1, a2) = (mk(&v1), mk(&v2));
        let (_, cert) = contracting_homotopy(&ext, &v1, &v2, &Scalar::zero(), &Scalar::zero(), &a1, &a2, &|_| 3).unwrap();
        assert!(cert.verified && cert.d_squared_zero);
        assert_eq!(cert.pieces, 1);
        assert!(contracting_homotopy(&ext, &v1, &v1, &Scalar::zero(), &Scalar::zero(), &a1, &a1, &|_| 3).is_err());
        assert!(contracting_homotopy(&ext, &v1, &v2, &Scalar::zero(), &Scalar::one(), &a1, &a2, &|_| 3).is_err());
    }
}

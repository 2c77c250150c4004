//! Critical points of `W = -u1...un + sum u_j^a + w`, in closed form.
//!
//! Small points are parametrized inside `Q(z, s)` where `z` is a primitive
//! `m`-th root of unity, `m = a(n-a)`, and `s^m = a^a`. Every small point has
//! coordinates `u_j = s z^(e_j)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Mono, Poly, Vars};
use crate::scalar::{NumberField, Scalar};

/// Constant shift: `-a!` when `a = n-1`, otherwise zero.
pub fn shift(n: usize, a: u32) -> i64 {
    if a as usize == n - 1 {
        -(1..=a as i64).product::<i64>()
    } else {
        0
    }
}

#[derive(Clone, Debug)]
pub struct Superpotential {
    pub n: usize,
    pub a: u32,
    pub w: Poly,
    pub shift: i64,
    pub field: Arc<NumberField>,
}

impl Superpotential {
    pub fn new(n: usize, a: u32) -> Result<Superpotential> {
        if n < 3 || a < 2 || a as usize > n - 1 || n > crate::poly::MAX_VARS {
            return Err(Error::Invalid(format!("need 2 <= a <= n-1, got n={n}, a={a}")));
        }
        let shift = shift(n, a);
        let mut w = Poly::term(Scalar::int(-1), Mono::from_exps(&vec![1; n]));
        for j in 0..n {
            w.add_term(Mono::var_pow(j, a as u16), &Scalar::one());
        }
        w.add_term(Mono::one(), &Scalar::int(shift));
        let m = a * (n as u32 - a);
        let field = NumberField::get(m, &BigInt::from(a).pow(a));
        Ok(Superpotential { n, a, w, shift, field })
    }

    /// `m = a(n-a)`, the order of `z`.
    pub fn root_order(&self) -> u32 {
        self.a * (self.n as u32 - self.a)
    }

    pub fn vars(&self) -> Vars {
        Vars::u(self.n).with_field(self.field.clone())
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.n).map(|j| self.w.diff(j)).collect()
    }

    pub fn hessian_polys(&self) -> Vec<Vec<Poly>> {
        let g = self.gradient();
        g.iter().map(|p| (0..self.n).map(|k| p.diff(k)).collect()).collect()
    }

    fn z_pow(&self, e: u32) -> Scalar {
        self.field.z().pow((e % self.root_order()) as u64)
    }

    /// `xi_k = s^a z^(a k)`, the `(n-a)` roots of `xi^(n-a) = a^a`.
    pub fn xi(&self, k: u32) -> Scalar {
        &self.field.s().pow(self.a as u64) * &self.z_pow(self.a * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Big,
    Small,
}

#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub kind: PointKind,
    /// Index `k` of `xi_k` for small points.
    pub xi_index: Option<u32>,
    /// `u_j = s z^(e_j)` for small points.
    pub exponents: Vec<u32>,
    pub coords: Vec<Scalar>,
    pub value: Scalar,
}

pub fn critical_points(n: usize, a: u32) -> Result<(Superpotential, Vec<CriticalPoint>)> {
    let w = Superpotential::new(n, a)?;
    let m = w.root_order();
    let na = n as u32 - a;
    let grad = w.gradient();
    let mut out = vec![CriticalPoint {
        kind: PointKind::Big,
        xi_index: None,
        exponents: vec![],
        coords: vec![Scalar::zero(); n],
        value: Scalar::int(w.shift),
    }];
    let s = w.field.s();
    let s_n = s.pow(n as u64);
    let a_s = Scalar::int(a as i64);
    for k in 0..na {
        let xi = w.xi(k);
        let target = &a_s * &xi;
        // The product constraint depends only on sum(l) mod a.
        let allowed: Vec<u32> = (0..a).filter(|&sig| &s_n * &w.z_pow(n as u32 * k + na * sig) == target).collect();
        let mut l = vec![0u32; n];
        loop {
            let sum = l.iter().sum::<u32>() % a;
            if allowed.contains(&sum) {
                let exponents: Vec<u32> = l.iter().map(|&lj| (k + na * lj) % m).collect();
                let coords: Vec<Scalar> = exponents.iter().map(|&e| &s * &w.z_pow(e)).collect();
                for g in &grad {
                    let r = g.eval(&coords);
                    if !r.is_zero() {
                        return Err(Error::Verification(format!("gradient residual {r} at exponents {exponents:?}")));
                    }
                }
                let value = w.w.eval(&coords);
                let expected = &(&Scalar::int(na as i64) * &xi) + &Scalar::int(w.shift);
                if value != expected {
                    return Err(Error::Verification(format!("critical value {value} differs from (n-a)xi + w = {expected}")));
                }
                out.push(CriticalPoint { kind: PointKind::Small, xi_index: Some(k), exponents, coords, value });
            }
            let mut i = 0;
            while i < n {
                l[i] += 1;
                if l[i] < a {
                    break;
                }
                l[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Ok((w, out))
}

#[derive(Clone, Debug)]
pub struct HessianReport {
    pub matrix: Matrix,
    pub determinant: Scalar,
    pub nondegenerate: bool,
    /// For small points: `omega` with `H = omega s^(n-2) D A D`, where
    /// `A = a I - J` and `D = diag(u_1 / u_i)` has root-of-unity entries.
    pub omega: Option<Scalar>,
    pub omega_order: Option<u64>,
    pub shape_matches: bool,
}

pub fn hessian_at(w: &Superpotential, coords: &[Scalar]) -> Result<HessianReport> {
    if coords.len() != w.n {
        return Err(Error::Shape(format!("expected {} coordinates, got {}", w.n, coords.len())));
    }
    for g in w.gradient() {
        let r = g.eval(coords);
        if !r.is_zero() {
            return Err(Error::Invalid(format!("point is not critical, gradient residual {r}")));
        }
    }
    let n = w.n;
    let hp = w.hessian_polys();
    let rows: Vec<Vec<Scalar>> = hp.iter().map(|row| row.iter().map(|p| p.eval(coords)).collect()).collect();
    let matrix = Matrix::from_rows(rows);
    let determinant = matrix.det();
    let nondegenerate = !determinant.is_zero();
    let (mut omega, mut omega_order, mut shape_matches) = (None, None, false);
    if coords.iter().all(|c| !c.is_zero()) {
        let a = w.a;
        let om = &(&Scalar::int(a as i64) * &coords[0].pow(a as u64 - 2)) * &w.field.s().pow(n as u64 - 2).inv();
        let d: Vec<Scalar> = coords.iter().map(|c| &coords[0] * &c.inv()).collect();
        let scale = &om * &w.field.s().pow(n as u64 - 2);
        shape_matches = (0..n).all(|i| {
            (0..n).all(|j| {
                let aij = if i == j { Scalar::int(a as i64 - 1) } else { Scalar::int(-1) };
                matrix[(i, j)] == &(&scale * &aij) * &(&d[i] * &d[j])
            })
        }) && d.iter().all(|x| x.multiplicative_order(w.root_order() as u64).is_some());
        omega_order = om.multiplicative_order(2 * w.root_order() as u64 * a as u64);
        omega = Some(om);
    }
    Ok(HessianReport { matrix, determinant, nondegenerate, omega, omega_order, shape_matches })
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    pub group_order: usize,
    pub preserves_w: bool,
    pub big_fixed: bool,
    /// Small critical value (rendered) to fiber size.
    pub fibers: BTreeMap<String, usize>,
    pub free: bool,
    pub transitive: bool,
    pub identity_fixes_all: bool,
}

impl GammaReport {
    pub fn passed(&self) -> bool {
        self.preserves_w && self.big_fixed && self.free && self.transitive && self.identity_fixes_all
    }
}

/// Characters of `(Z/a)^n` with coordinate sum zero.
pub fn characters(n: usize, a: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut c = vec![0u32; n];
    loop {
        if c.iter().sum::<u32>() % a == 0 {
            out.push(c.clone());
        }
        let mut i = 0;
        while i < n {
            c[i] += 1;
            if c[i] < a {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

pub fn gamma_action_check(n: usize, a: u32) -> Result<GammaReport> {
    let (w, points) = critical_points(n, a)?;
    let na = n as u32 - a;
    let chars = characters(n, a);
    let act = |chi: &[u32], coords: &[Scalar]| -> Vec<Scalar> { coords.iter().zip(chi).map(|(c, &x)| c * &w.z_pow(na * x)).collect() };
    let preserves_w = chars.iter().all(|chi| {
        let images: Vec<Poly> = (0..n).map(|j| Poly::term(w.z_pow(na * chi[j]), Mono::var(j))).collect();
        w.w.compose(&images) == w.w
    });
    let big_fixed = chars.iter().all(|chi| act(chi, &points[0].coords) == points[0].coords);
    let mut by_coords: HashMap<Vec<Scalar>, usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        by_coords.insert(p.coords.clone(), i);
    }
    let mut fibers: BTreeMap<String, usize> = BTreeMap::new();
    let mut fiber_members: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        *fibers.entry(p.value.render()).or_default() += 1;
        fiber_members.entry(p.xi_index.unwrap()).or_default().push(i);
    }
    let mut free = true;
    let mut transitive = true;
    for members in fiber_members.values() {
        let base = &points[members[0]];
        let mut orbit = std::collections::HashSet::new();
        for chi in &chars {
            let img = act(chi, &base.coords);
            match by_coords.get(&img) {
                Some(&idx) if points[idx].value == base.value => {
                    orbit.insert(idx);
                }
                _ => transitive = false,
            }
        }
        // Free: the stabilizer of the base point is trivial.
        free &= orbit.len() == chars.len();
        transitive &= orbit.len() == members.len();
    }
    let identity = vec![0u32; n];
    let identity_fixes_all = points.iter().all(|p| act(&identity, &p.coords) == p.coords);
    Ok(GammaReport { group_order: chars.len(), preserves_w, big_fixed, fibers, free, transitive, identity_fixes_all })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointJson {
    pub kind: PointKind,
    pub xi_index: Option<u32>,
    pub z_exponents: Vec<u32>,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian_determinant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperpotentialReport {
    pub n: usize,
    pub a: u32,
    pub shift: i64,
    pub root_order: u32,
    pub field_degree: usize,
    pub coordinates: String,
    pub small_count: usize,
    pub points: Vec<PointJson>,
    pub gamma: GammaReport,
}

pub fn report(n: usize, a: u32, hessians: bool) -> Result<SuperpotentialReport> {
    let (w, points) = critical_points(n, a)?;
    let gamma = gamma_action_check(n, a)?;
    let mut out = Vec::new();
    for p in &points {
        let (det, om) = if hessians {
            let h = hessian_at(&w, &p.coords)?;
            (Some(h.determinant.render()), h.omega.map(|o| o.render()))
        } else {
            (None, None)
        };
        out.push(PointJson { kind: p.kind, xi_index: p.xi_index, z_exponents: p.exponents.clone(), value: p.value.render(), hessian_determinant: det, omega: om });
    }
    Ok(SuperpotentialReport {
        n,
        a,
        shift: w.shift,
        root_order: w.root_order(),
        field_degree: w.field.degree(),
        coordinates: "u_j = s*z^e_j with z^m = 1 primitive and s^m = a^a".into(),
        small_count: points.len() - 1,
        points: out,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_4_3() {
        let (w, pts) = critical_points(4, 3).unwrap();
        assert_eq!(w.shift, -6);
        assert_eq!(pts.len(), 28);
        assert!(pts[1..].iter().all(|p| p.value == Scalar::int(21)));
        assert_eq!(pts[0].value, Scalar::int(-6));
    }

    #[test]
    fn points_4_2() {
        let (_, pts) = critical_points(4, 2).unwrap();
        assert_eq!(pts.len(), 17);
        let plus = pts[1..].iter().filter(|p| p.value == Scalar::int(4)).count();
        let minus = pts[1..].iter().filter(|p| p.value == Scalar::int(-4)).count();
        assert_eq!((plus, minus), (8, 8));
        // For xi = 2 the coordinates are +-sqrt 2 with an even number of minus signs.
        let two = Scalar::int(2);
        for p in pts[1..].iter().filter(|p| p.value == Scalar::int(4)) {
            assert!(p.coords.iter().all(|c| c.pow(2) == two));
            let prod = p.coords.iter().fold(Scalar::one(), |acc, c| &acc * c);
            assert_eq!(prod, Scalar::int(4));
        }
    }

    #[test]
    fn hessian_4_3() {
        let w = Superpotential::new(4, 3).unwrap();
        let h = hessian_at(&w, &vec![Scalar::int(3); 4]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h.matrix[(i, j)], Scalar::int(if i == j { 18 } else { -9 }));
            }
        }
        assert_eq!(h.determinant, Scalar::int(-177147));
        assert_eq!(h.omega, Some(Scalar::one()));
        assert!(h.shape_matches);
        let h0 = hessian_at(&w, &vec![Scalar::zero(); 4]).unwrap();
        assert!(h0.matrix.is_zero() && !h0.nondegenerate);
        assert!(hessian_at(&w, &vec![Scalar::one(); 4]).is_err());
    }

    #[test]
    fn small_hessians_nondegenerate() {
        for (n, a) in [(4, 2), (5, 3), (5, 2)] {
            let (w, pts) = critical_points(n, a).unwrap();
            for p in &pts[1..] {
                let h = hessian_at(&w, &p.coords).unwrap();
                assert!(h.nondegenerate && h.shape_matches && h.omega_order.is_some());
            }
        }
    }

    #[test]
    fn gamma_4_3_and_4_2() {
        let g = gamma_action_check(4, 3).unwrap();
        assert!(g.passed());
        assert_eq!(g.group_order, 27);
        assert_eq!(g.fibers.values().copied().collect::<Vec<_>>(), vec![27]);
        let g = gamma_action_check(4, 2).unwrap();
        assert!(g.passed());
        assert_eq!(g.fibers.len(), 2);
        assert!(g.fibers.values().all(|&c| c == 8));
    }
}

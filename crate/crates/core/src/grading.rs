//! Grading data `G^n_a`: the group `Y = (Z + Z^n) / <(2(a-n), 1,...,1)>`
//! with sign map `(t, c) -> t mod 2`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GradingDatum {
    pub n: usize,
    pub a: i64,
}

impl GradingDatum {
    pub fn new(n: usize, a: i64) -> Result<GradingDatum> {
        if n < 3 || a < 1 || a > n as i64 - 1 {
            return Err(Error::Invalid(format!("grading datum needs n >= 3 and 1 <= a <= n-1, got n={n}, a={a}")));
        }
        Ok(GradingDatum { n, a })
    }

    /// The relation generator `(2(a-n), 1,...,1)`.
    pub fn relation(&self) -> Degree {
        Degree { t: 2 * (self.a - self.n as i64), c: vec![1; self.n] }
    }

    pub fn zero(&self) -> Degree {
        Degree { t: 0, c: vec![0; self.n] }
    }

    /// Degree `(-1, y_j)` of `u_j` (and of the odd generator `theta_j`).
    pub fn u_degree(&self, j: usize) -> Degree {
        let mut c = vec![0; self.n];
        c[j] = 1;
        Degree { t: -1, c }
    }

    /// Degree `(2 - 2a, a y_j)` of `r_j`.
    pub fn r_degree(&self, j: usize) -> Degree {
        self.r_degree_weighted(j, self.a)
    }

    /// Degree of `r_j` for an explicit weight `w`: `(2 - 2w, w y_j)`.
    pub fn r_degree_weighted(&self, j: usize, w: i64) -> Degree {
        let mut c = vec![0; self.n];
        c[j] = w;
        Degree { t: 2 - 2 * w, c }
    }

    /// Image in `Z / 2(n-a)` of the Z-part of the canonical representative.
    pub fn reduce_mod_chern(&self, d: &Degree) -> Result<i64> {
        let d = normalize_degree(d, self)?;
        Ok(d.t.rem_euclid(2 * (self.n as i64 - self.a)))
    }
}

/// Element of `Z + Z^n`, compared in the quotient after normalization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Degree {
    pub t: i64,
    pub c: Vec<i64>,
}

impl Degree {
    pub fn new(t: i64, c: Vec<i64>) -> Degree {
        Degree { t, c }
    }

    pub fn add(&self, o: &Degree) -> Degree {
        assert_eq!(self.c.len(), o.c.len());
        Degree { t: self.t + o.t, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Degree) -> Degree {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Degree {
        Degree { t: self.t * k, c: self.c.iter().map(|x| x * k).collect() }
    }

    /// Sign map `t mod 2`.
    pub fn sigma(&self) -> u8 {
        self.t.rem_euclid(2) as u8
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        write!(f, "({}; {})", self.t, c.join(","))
    }
}

impl FromStr for Degree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Degree> {
        let inner = s.trim().strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(|| Error::Parse(format!("degree `{s}` must look like (t; c1,...,cn)")))?;
        let (t, c) = inner.split_once(';').ok_or_else(|| Error::Parse(format!("degree `{s}` lacks `;`")))?;
        let t = t.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string()))?;
        let c = c.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string()))).collect::<Result<Vec<_>>>()?;
        Ok(Degree { t, c })
    }
}

/// Canonical representative: shift by the relation until `min c = 0`.
pub fn normalize_degree(d: &Degree, g: &GradingDatum) -> Result<Degree> {
    if d.c.len() != g.n {
        return Err(Error::Shape(format!("degree has {} coefficients, datum has n = {}", d.c.len(), g.n)));
    }
    let m = *d.c.iter().min().unwrap();
    Ok(d.sub(&g.relation().scale(m)))
}

pub fn degrees_equal(x: &Degree, y: &Degree, g: &GradingDatum) -> Result<bool> {
    Ok(normalize_degree(x, g)? == normalize_degree(y, g)?)
}

/// Degree of `r^c u^b theta^K`, normalized.
pub fn monomial_degree(c: &[i64], b: &[i64], k: &[usize], g: &GradingDatum) -> Result<Degree> {
    if c.len() != g.n || b.len() != g.n {
        return Err(Error::Shape("exponent vectors must have length n".into()));
    }
    if k.iter().any(|&i| i >= g.n) {
        return Err(Error::Shape("generator index out of range".into()));
    }
    let mut d = g.zero();
    for j in 0..g.n {
        d = d.add(&g.r_degree(j).scale(c[j]));
        d = d.add(&g.u_degree(j).scale(b[j]));
    }
    for &j in k {
        d = d.add(&g.u_degree(j));
    }
    normalize_degree(&d, g)
}

/// Morphism of grading data fixing the Z summand.
#[derive(Clone, Debug, Serialize)]
pub struct GradingMorphism {
    pub source: GradingDatum,
    pub target: GradingDatum,
    /// Image of each generator `y_j`.
    pub images: Vec<Degree>,
}

impl GradingMorphism {
    pub fn new(source: GradingDatum, target: GradingDatum, images: Vec<Degree>) -> Result<GradingMorphism> {
        if images.len() != source.n || images.iter().any(|d| d.c.len() != target.n) {
            return Err(Error::Shape("morphism images have the wrong shape".into()));
        }
        let m = GradingMorphism { source, target, images };
        let rel = m.apply_raw(&source.relation());
        if normalize_degree(&rel, &target)? != target.zero() {
            return Err(Error::Invalid("morphism does not respect the relation".into()));
        }
        Ok(m)
    }

    /// The morphism `p: G^n_a -> G^n_1`, `y_j -> 2(1-a) + a y_j`.
    pub fn p(n: usize, a: i64) -> Result<GradingMorphism> {
        let source = GradingDatum::new(n, a)?;
        let target = GradingDatum::new(n, 1)?;
        let images = (0..n).map(|j| target.r_degree_weighted(j, a)).collect();
        GradingMorphism::new(source, target, images)
    }

    fn apply_raw(&self, d: &Degree) -> Degree {
        let mut out = Degree { t: d.t, c: vec![0; self.target.n] };
        for (cj, img) in d.c.iter().zip(&self.images) {
            out = out.add(&img.scale(*cj));
        }
        out
    }

    pub fn apply(&self, d: &Degree) -> Result<Degree> {
        if d.c.len() != self.source.n {
            return Err(Error::Shape("degree does not match the source datum".into()));
        }
        normalize_degree(&self.apply_raw(d), &self.target)
    }
}

/// Which family of cochains to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SupportKind {
    /// Length-one cochains `theta^{K1} -> r^c theta^{K0}` of internal degree `t`.
    Length1 { t: i64 },
    /// Polyvectors `r^c u^b theta^K` of total Hochschild degree `total`,
    /// with `s = |b|` and `t = total - s`; `truncated` keeps `t <= 0`.
    Polyvector { total: i64, truncated: bool },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportBounds {
    pub max_j: i64,
    pub q_min: i64,
    pub q_max: i64,
    pub max_length: i64,
    pub min_j: i64,
}

impl SupportBounds {
    pub fn default_for(g: &GradingDatum) -> SupportBounds {
        let n = g.n as i64;
        SupportBounds { max_j: 2 * n, q_min: -2 * n, q_max: 2 * n, max_length: 2 * n, min_j: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Support {
    pub k_in: Vec<usize>,
    pub k_out: Vec<usize>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub q: i64,
    pub j: i64,
    pub t: i64,
}

fn compositions(n: usize, total: i64, out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>) {
    if cur.len() == n - 1 {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for x in 0..=total {
        cur.push(x);
        compositions(n, total - x, out, cur);
        cur.pop();
    }
}

/// All integer solutions of the degree equations within `bounds`.
///
/// For `Length1`: `a c + y_{K0} = y_{K1} + q y_[n]` and `t = (n-2) q + (2-a) j`.
/// For `Polyvector`: `y_K + a c = q y_[n] + b` and `t = (n-2) q + (2-a) j`,
/// which together force `|K| = total + 2q - 2j`.
pub fn enumerate_cochain_supports(g: &GradingDatum, kind: SupportKind, bounds: &SupportBounds) -> Vec<Support> {
    let n = g.n;
    let ni = n as i64;
    let a = g.a;
    let mut out = Vec::new();
    for j in bounds.min_j.max(0)..=bounds.max_j {
        let mut cs = Vec::new();
        compositions(n, j, &mut cs, &mut Vec::new());
        for c in &cs {
            for q in bounds.q_min..=bounds.q_max {
                let t_eq = (ni - 2) * q + (2 - a) * j;
                match kind {
                    SupportKind::Length1 { t } => {
                        if t != t_eq {
                            continue;
                        }
                        // y_{K0,k} - y_{K1,k} = q - a c_k must lie in {-1, 0, 1}.
                        let v: Vec<i64> = c.iter().map(|&ck| q - a * ck).collect();
                        if v.iter().any(|x| x.abs() > 1) {
                            continue;
                        }
                        let zeros: Vec<usize> = (0..n).filter(|&k| v[k] == 0).collect();
                        for mask in 0..(1u32 << zeros.len()) {
                            let mut k_in = Vec::new();
                            let mut k_out = Vec::new();
                            for k in 0..n {
                                match v[k] {
                                    1 => k_out.push(k),
                                    -1 => k_in.push(k),
                                    _ => {
                                        let idx = zeros.iter().position(|&z| z == k).unwrap();
                                        if mask >> idx & 1 == 1 {
                                            k_in.push(k);
                                            k_out.push(k);
                                        }
                                    }
                                }
                            }
                            out.push(Support { k_in, k_out, b: vec![0; n], c: c.clone(), q, j, t });
                        }
                    }
                    SupportKind::Polyvector { total, truncated } => {
                        let ksize = total + 2 * q - 2 * j;
                        if ksize < 0 || ksize > ni {
                            continue;
                        }
                        let base: Vec<i64> = c.iter().map(|&ck| a * ck - q).collect();
                        if base.iter().any(|&x| x < -1) {
                            continue;
                        }
                        let s_total: i64 = ksize + base.iter().sum::<i64>();
                        let t = total - s_total;
                        if s_total < 0 || s_total > bounds.max_length || (truncated && t > 0) || t != t_eq {
                            continue;
                        }
                        for mask in 0..(1u32 << n) {
                            if mask.count_ones() as i64 != ksize {
                                continue;
                            }
                            let k: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                            let b: Vec<i64> = (0..n).map(|i| base[i] + (mask >> i & 1) as i64).collect();
                            if b.iter().any(|&x| x < 0) {
                                continue;
                            }
                            out.push(Support { k_in: Vec::new(), k_out: k, b, c: c.clone(), q, j, t });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_examples() {
        let g = GradingDatum::new(4, 1).unwrap();
        let d = normalize_degree(&Degree::new(-4, vec![1, 1, 1, 1]), &g).unwrap();
        assert_eq!(d, Degree::new(2, vec![0, 0, 0, 0]));
        let z = Degree::new(5, vec![0, 0, 0, 0]);
        assert_eq!(normalize_degree(&z, &g).unwrap(), z);
        let g43 = GradingDatum::new(4, 3).unwrap();
        let d = monomial_degree(&[1, 1, 1, 1], &[0; 4], &[], &g43).unwrap();
        assert_eq!(d, Degree::new(-10, vec![0; 4]));
        assert!(normalize_degree(&Degree::new(0, vec![0; 3]), &g).is_err());
    }

    #[test]
    fn monomial_degrees() {
        for n in 3..=7 {
            let g = GradingDatum::new(n, 1).unwrap();
            let d = monomial_degree(&vec![0; n], &vec![1; n], &[], &g).unwrap();
            assert_eq!(d, Degree::new(n as i64 - 2, vec![0; n]));
        }
        let g = GradingDatum::new(4, 3).unwrap();
        let d = monomial_degree(&[0, 1, 0, 0], &[0; 4], &[], &g).unwrap();
        assert_eq!(d, Degree::new(-4, vec![0, 3, 0, 0]));
        assert_eq!(monomial_degree(&[0; 4], &[0; 4], &[], &g).unwrap(), g.zero());
    }

    #[test]
    fn morphism_p() {
        let p = GradingMorphism::p(4, 3).unwrap();
        let img = p.apply(&Degree::new(0, vec![1, 0, 0, 0])).unwrap();
        assert_eq!(img, Degree::new(-4, vec![3, 0, 0, 0]));
        let bad = GradingMorphism::new(GradingDatum::new(4, 3).unwrap(), GradingDatum::new(4, 1).unwrap(), vec![Degree::new(0, vec![1, 0, 0, 0]); 4]);
        assert!(bad.is_err());
    }

    #[test]
    fn parse_degree() {
        let d: Degree = "(2; 0,1,0)".parse().unwrap();
        assert_eq!(d, Degree::new(2, vec![0, 1, 0]));
        assert_eq!(d.to_string(), "(2; 0,1,0)");
        assert!("2;0".parse::<Degree>().is_err());
    }

    #[test]
    fn first_order_supports_4_3() {
        let g = GradingDatum::new(4, 3).unwrap();
        let b = SupportBounds { min_j: 1, max_j: 1, ..SupportBounds::default_for(&g) };
        let s = enumerate_cochain_supports(&g, SupportKind::Polyvector { total: 2, truncated: false }, &b);
        assert_eq!(s.len(), 4);
        for sup in &s {
            let j = sup.c.iter().position(|&x| x == 1).unwrap();
            let mut b = vec![0; 4];
            b[j] = 3;
            assert_eq!(sup.b, b);
            assert!(sup.k_out.is_empty());
        }
    }

    #[test]
    fn mu1_lemma_branch_at_5_3() {
        let g = GradingDatum::new(5, 3).unwrap();
        let s = enumerate_cochain_supports(&g, SupportKind::Length1 { t: 1 }, &SupportBounds::default_for(&g));
        assert!(!s.is_empty());
        assert!(s.iter().all(|x| x.k_in == vec![0, 1, 2, 3, 4] && x.k_out.is_empty()));
        let g = GradingDatum::new(4, 3).unwrap();
        assert!(enumerate_cochain_supports(&g, SupportKind::Length1 { t: 1 }, &SupportBounds::default_for(&g)).is_empty());
    }
}

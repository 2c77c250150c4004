//! Z/2-graded finite algebras, Clifford algebras `v^2 = Q(v)`, Hochschild
//! cohomology through the normalized bar complex, and graded isomorphisms.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{rank_of_vectors, Matrix, SparseEchelon};
use crate::scalar::{NumberField, Scalar, Q};

pub type Vector = Vec<Scalar>;

/// Finite-dimensional Z/2-graded algebra with homogeneous basis; basis
/// element 0 is the unit. Optional `(Z/2)^k` weights (as bitmasks, combined
/// by xor) refine the grading when the table respects them.
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub labels: Vec<String>,
    pub parity: Vec<u8>,
    pub weights: Option<Vec<u32>>,
    /// `table[i][j]`: sparse product of basis elements `i` and `j`.
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
}

impl GradedAlgebra {
    pub fn new(labels: Vec<String>, parity: Vec<u8>, weights: Option<Vec<u32>>, table: Vec<Vec<Vec<(usize, Scalar)>>>) -> Result<GradedAlgebra> {
        let d = labels.len();
        if parity.len() != d || table.len() != d || table.iter().any(|r| r.len() != d) || weights.as_ref().is_some_and(|w| w.len() != d) {
            return Err(Error::Shape("labels, parity, weights and table must agree".into()));
        }
        let alg = GradedAlgebra { labels, parity, weights, table };
        for i in 0..d {
            let bi = alg.basis(i);
            if alg.mul(&alg.basis(0), &bi) != bi || alg.mul(&bi, &alg.basis(0)) != bi {
                return Err(Error::Invalid("basis element 0 is not a unit".into()));
            }
            for j in 0..d {
                for (k, _) in &alg.table[i][j] {
                    if (alg.parity[i] + alg.parity[j]) % 2 != alg.parity[*k] {
                        return Err(Error::Invalid(format!("product {} {} is not parity-additive", alg.labels[i], alg.labels[j])));
                    }
                    if let Some(w) = &alg.weights {
                        if w[i] ^ w[j] != w[*k] {
                            return Err(Error::Invalid("product does not respect weights".into()));
                        }
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        v
    }

    pub fn unit(&self) -> Vector {
        self.basis(0)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.table[i][j]
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = vec![Scalar::zero(); self.dim()];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.table[i][j] {
                    out[*k] += &(&ab * c);
                }
            }
        }
        out
    }

    /// Parity of a homogeneous nonzero element.
    pub fn element_parity(&self, x: &[Scalar]) -> Option<u8> {
        let ps: Vec<u8> = x.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| self.parity[i]).collect();
        let first = *ps.first()?;
        ps.iter().all(|&p| p == first).then_some(first)
    }

    pub fn is_associative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                (0..d).all(|k| {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    self.mul(&self.mul(&a, &b), &c) == self.mul(&a, &self.mul(&b, &c))
                })
            })
        })
    }

    pub fn parity_dims(&self) -> [usize; 2] {
        let odd = self.parity.iter().filter(|&&p| p == 1).count();
        [self.dim() - odd, odd]
    }

    /// Dimensions (even, odd) of the center; with `supercommutator` the
    /// bracket is `x b - (-1)^{|x||b|} b x`.
    pub fn center_dims(&self, supercommutator: bool) -> [usize; 2] {
        let d = self.dim();
        let mut out = [0; 2];
        for par in 0..2u8 {
            let idx: Vec<usize> = (0..d).filter(|&i| self.parity[i] == par).collect();
            let mut rows: Vec<Vector> = Vec::new();
            for b in 0..d {
                let sign = if supercommutator && par == 1 && self.parity[b] == 1 { -1 } else { 1 };
                for out_k in 0..d {
                    let row: Vector = idx
                        .iter()
                        .map(|&x| {
                            let xb = self.mul(&self.basis(x), &self.basis(b));
                            let bx = self.mul(&self.basis(b), &self.basis(x));
                            &xb[out_k] - &(&Scalar::int(sign) * &bx[out_k])
                        })
                        .collect();
                    rows.push(row);
                }
            }
            let m = Matrix::from_rows(rows);
            out[par as usize] = idx.len() - if idx.is_empty() { 0 } else { m.rank() };
        }
        out
    }
}

/// Symmetric bilinear form `B`; the quadratic form is `Q(v) = B(v, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub b: Matrix,
}

impl QuadraticForm {
    pub fn new(b: Matrix) -> Result<QuadraticForm> {
        if b.rows != b.cols {
            return Err(Error::Shape("form must be square".into()));
        }
        for i in 0..b.rows {
            for j in 0..i {
                if b[(i, j)] != b[(j, i)] {
                    return Err(Error::Invalid(format!("form is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(QuadraticForm { b })
    }

    pub fn diagonal(entries: &[Scalar]) -> QuadraticForm {
        let n = entries.len();
        let mut b = Matrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            b[(i, i)] = e.clone();
        }
        QuadraticForm { b }
    }

    pub fn parse(text: &str) -> Result<QuadraticForm> {
        let body = text.strip_prefix("diag:").ok_or_else(|| Error::Parse("form must look like diag:1,1,...".into()))?;
        let entries = body
            .split(',')
            .map(|t| crate::poly::Vars::new(vec![]).parse(t.trim()).map(|p| p.constant_term()))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadraticForm::diagonal(&entries))
    }

    pub fn n(&self) -> usize {
        self.b.rows
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n()).all(|i| (0..self.n()).all(|j| i == j || self.b[(i, j)].is_zero()))
    }

    pub fn eval(&self, v: &[Scalar]) -> Scalar {
        let bv = self.b.apply(v);
        v.iter().zip(&bv).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b))
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.b.det().is_zero()
    }
}

/// Clifford algebra with basis indexed by subsets of generators (bitmasks).
#[derive(Clone, Debug)]
pub struct CliffordAlgebra {
    pub form: QuadraticForm,
    pub alg: GradedAlgebra,
}

fn normal_order(word: &[usize], b: &Matrix, memo: &mut HashMap<Vec<usize>, Vec<(u32, Scalar)>>) -> Vec<(u32, Scalar)> {
    if let Some(r) = memo.get(word) {
        return r.clone();
    }
    let pos = (0..word.len().saturating_sub(1)).find(|&k| word[k] >= word[k + 1]);
    let out = match pos {
        None => vec![(word.iter().fold(0u32, |m, &i| m | 1 << i), Scalar::one())],
        Some(k) => {
            let (i, j) = (word[k], word[k + 1]);
            let mut shorter = word.to_vec();
            shorter.drain(k..k + 2);
            let mut acc: BTreeMap<u32, Scalar> = BTreeMap::new();
            let mut add = |terms: Vec<(u32, Scalar)>, c: &Scalar| {
                for (m, x) in terms {
                    let e = acc.entry(m).or_insert_with(Scalar::zero);
                    *e += &(&x * c);
                }
            };
            if i == j {
                if !b[(i, i)].is_zero() {
                    add(normal_order(&shorter, b, memo), &b[(i, i)]);
                }
            } else {
                let mut swapped = word.to_vec();
                swapped.swap(k, k + 1);
                add(normal_order(&swapped, b, memo), &Scalar::int(-1));
                if !b[(i, j)].is_zero() {
                    add(normal_order(&shorter, b, memo), &(&Scalar::int(2) * &b[(i, j)]));
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        }
    };
    memo.insert(word.to_vec(), out.clone());
    out
}

fn mask_label(mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| format!("e{}", i + 1)).collect()
}

impl CliffordAlgebra {
    pub fn new(form: QuadraticForm) -> Result<CliffordAlgebra> {
        let n = form.n();
        if n > 8 {
            return Err(Error::Unsupported("Clifford algebras are limited to 8 generators".into()));
        }
        let d = 1usize << n;
        let mut memo = HashMap::new();
        let mut table = vec![vec![Vec::new(); d]; d];
        for s in 0..d {
            for t in 0..d {
                let mut word: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).collect();
                word.extend((0..n).filter(|i| t >> i & 1 == 1));
                table[s][t] = normal_order(&word, &form.b, &mut memo).into_iter().map(|(m, c)| (m as usize, c)).collect();
            }
        }
        let labels = (0..d as u32).map(mask_label).collect();
        let parity = (0..d as u32).map(|m| (m.count_ones() % 2) as u8).collect();
        let weights = form.is_diagonal().then(|| (0..d as u32).collect());
        Ok(CliffordAlgebra { alg: GradedAlgebra::new(labels, parity, weights, table)?, form })
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn generator(&self, i: usize) -> Vector {
        self.alg.basis(1 << i)
    }

    /// Image of `v in V` as an element of degree one.
    pub fn vector(&self, v: &[Scalar]) -> Vector {
        let mut out = vec![Scalar::zero(); self.alg.dim()];
        for (i, c) in v.iter().enumerate() {
            out[1 << i] = c.clone();
        }
        out
    }

    /// `v v - Q(v)`, zero for every `v`.
    pub fn square_defect(&self, v: &[Scalar]) -> Vector {
        let x = self.vector(v);
        let mut sq = self.alg.mul(&x, &x);
        sq[0] -= &self.form.eval(v);
        sq
    }
}

/// Exterior algebra on `n` generators (the zero form).
pub fn exterior(n: usize) -> CliffordAlgebra {
    CliffordAlgebra::new(QuadraticForm::diagonal(&vec![Scalar::zero(); n])).expect("exterior algebra")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Koszul sign `(-1)^{|phi||a_1|}` on the left action term.
    Koszul,
    /// Bimodule maps without signs, as in the identification of `HH^0` with
    /// the ordinary center.
    Plain,
}

#[derive(Clone, Debug, Serialize)]
pub struct HhReport {
    pub convention: SignConvention,
    pub s_max: usize,
    /// `dims[s][t]`: dimension of `HH^{s+t}(A)^s` for cochain parity `t`.
    pub dims: Vec<[usize; 2]>,
    pub cochain_dims: Vec<[usize; 2]>,
}

impl HhReport {
    pub fn total(&self, s: usize) -> usize {
        self.dims[s][0] + self.dims[s][1]
    }
}

struct BarIndex {
    nonunit: Vec<usize>,
    dim: usize,
}

impl BarIndex {
    fn encode(&self, tuple: &[usize], out: usize) -> usize {
        let d = self.nonunit.len();
        tuple.iter().fold(0usize, |acc, &t| acc * d + (t - 1)) * self.dim + out
    }
}

fn tuples(len: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (1..=d).map(move |x| {
            let mut t2 = t.clone();
            t2.push(x);
            t2
        })).collect();
    }
    out
}

/// Hochschild differential of the basis cochain sending `tuple` to basis
/// element `out` and everything else to zero, as a sparse vector over
/// `(s+1)`-cochains. Nonunit basis indices are `1..dim`.
fn bar_differential(alg: &GradedAlgebra, conv: SignConvention, tuple: &[usize], out: usize, factor: &[Vec<(usize, usize, Scalar)>], idx: &BarIndex) -> BTreeMap<usize, Scalar> {
    let s = tuple.len();
    let dim = alg.dim();
    let phi_par = (alg.parity[out] as usize + tuple.iter().map(|&t| alg.parity[t] as usize).sum::<usize>()) % 2;
    let mut v: BTreeMap<usize, Scalar> = BTreeMap::new();
    let mut add = |key: usize, c: Scalar| {
        let e = v.entry(key).or_insert_with(Scalar::zero);
        *e += &c;
    };
    // a_1 phi(a_2, ..., a_{s+1})
    for a1 in 1..dim {
        let eps = if conv == SignConvention::Koszul && phi_par == 1 && alg.parity[a1] == 1 { -1 } else { 1 };
        let mut t = vec![a1];
        t.extend_from_slice(tuple);
        for (k, c) in alg.basis_product(a1, out) {
            add(idx.encode(&t, *k), &Scalar::int(eps) * c);
        }
    }
    // (-1)^i phi(..., a_i a_{i+1}, ...)
    for i in 0..s {
        let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
        for (x, y, c) in &factor[tuple[i]] {
            let mut t = tuple[..i].to_vec();
            t.push(*x);
            t.push(*y);
            t.extend_from_slice(&tuple[i + 1..]);
            add(idx.encode(&t, out), &Scalar::int(sign) * c);
        }
    }
    // (-1)^{s+1} phi(a_1, ..., a_s) a_{s+1}
    let sign = if (s + 1).is_multiple_of(2) { 1 } else { -1 };
    for a in 1..dim {
        let mut t = tuple.to_vec();
        t.push(a);
        for (k, c) in alg.basis_product(out, a) {
            add(idx.encode(&t, *k), &Scalar::int(sign) * c);
        }
    }
    v.retain(|_, c| !c.is_zero());
    v
}

/// Dimensions of Hochschild cohomology from the normalized bar complex,
/// for lengths `0..=s_max`, split by cochain parity.
pub fn hh_bar_bruteforce(alg: &GradedAlgebra, s_max: usize, conv: SignConvention) -> HhReport {
    let dim = alg.dim();
    let idx = BarIndex { nonunit: (1..dim).collect(), dim };
    // factor[m]: pairs (x, y) of nonunit basis elements with (x y)_m = c.
    let mut factor: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); dim];
    for x in 1..dim {
        for y in 1..dim {
            for (m, c) in alg.basis_product(x, y) {
                if *m != 0 {
                    factor[*m].push((x, y, c.clone()));
                }
            }
        }
    }
    let key = |tuple: &[usize], out: usize| -> (u32, u8) {
        let p = (alg.parity[out] as usize + tuple.iter().map(|&t| alg.parity[t] as usize).sum::<usize>()) % 2;
        let w = alg.weights.as_ref().map_or(0, |w| tuple.iter().fold(w[out], |acc, &t| acc ^ w[t]));
        (w, p as u8)
    };
    // ranks[s][block] = rank of d_s on that block.
    let mut cochain_dims = Vec::new();
    let mut block_dims: Vec<HashMap<(u32, u8), usize>> = Vec::new();
    let mut ranks: Vec<HashMap<(u32, u8), usize>> = Vec::new();
    for s in 0..=s_max {
        let mut blocks: HashMap<(u32, u8), SparseEchelon> = HashMap::new();
        let mut dims: HashMap<(u32, u8), usize> = HashMap::new();
        let mut cd = [0usize; 2];
        for t in tuples(s, dim - 1) {
            for out in 0..dim {
                let k = key(&t, out);
                *dims.entry(k).or_default() += 1;
                cd[k.1 as usize] += 1;
                let col = bar_differential(alg, conv, &t, out, &factor, &idx);
                blocks.entry(k).or_default().insert(col);
            }
        }
        cochain_dims.push(cd);
        ranks.push(blocks.into_iter().map(|(k, e)| (k, e.rank())).collect());
        block_dims.push(dims);
    }
    let mut dims_out = Vec::new();
    for s in 0..=s_max {
        let mut d = [0usize; 2];
        for (k, &n) in &block_dims[s] {
            let r_out = ranks[s].get(k).copied().unwrap_or(0);
            let r_in = if s == 0 { 0 } else { ranks[s - 1].get(k).copied().unwrap_or(0) };
            d[k.1 as usize] += n - r_out - r_in;
        }
        dims_out.push(d);
    }
    HhReport { convention: conv, s_max, dims: dims_out, cochain_dims }
}

/// `d_{s+1} d_s = 0` on every basis cochain of length `s`.
pub fn bar_differential_squares_to_zero(alg: &GradedAlgebra, s: usize, conv: SignConvention) -> bool {
    let dim = alg.dim();
    let idx = BarIndex { nonunit: (1..dim).collect(), dim };
    let mut factor: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); dim];
    for x in 1..dim {
        for y in 1..dim {
            for (m, c) in alg.basis_product(x, y) {
                if *m != 0 {
                    factor[*m].push((x, y, c.clone()));
                }
            }
        }
    }
    let decode = |mut key: usize, len: usize| -> (Vec<usize>, usize) {
        let out = key % dim;
        key /= dim;
        let mut t = vec![0; len];
        for i in (0..len).rev() {
            t[i] = key % (dim - 1) + 1;
            key /= dim - 1;
        }
        (t, out)
    };
    for t in tuples(s, dim - 1) {
        for out in 0..dim {
            let first = bar_differential(alg, conv, &t, out, &factor, &idx);
            let mut total: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, c) in first {
                let (t2, o2) = decode(k, s + 1);
                for (k2, c2) in bar_differential(alg, conv, &t2, o2, &factor, &idx) {
                    let e = total.entry(k2).or_insert_with(Scalar::zero);
                    *e += &(&c * &c2);
                }
            }
            if total.values().any(|c| !c.is_zero()) {
                return false;
            }
        }
    }
    true
}

/// `HH^2(A)^s = 0` for `3 <= s <= s_max`: the length-`s` part of total
/// degree 2 has cochain parity `(2 - s) mod 2`.
pub fn formality_precondition(report: &HhReport) -> bool {
    (3..=report.s_max).all(|s| report.dims[s][s % 2] == 0)
}

/// `Cl(-Hess_v W)` at a critical point `v`.
pub fn hessian_clifford(w: &crate::superpotential::Superpotential, coords: &[Scalar]) -> Result<CliffordAlgebra> {
    let h = crate::superpotential::hessian_at(w, coords)?;
    let mut b = h.matrix;
    for i in 0..b.rows {
        for j in 0..b.cols {
            b[(i, j)] = -&b[(i, j)];
        }
    }
    CliffordAlgebra::new(QuadraticForm::new(b)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct Cl1ResolutionCertificate {
    /// `s(1) = 1 (x) 1 + theta (x) theta` commutes with `theta`, so
    /// `a -> a s(1)` is a bimodule map.
    pub bimodule_map: bool,
    pub even: bool,
    /// `m(s(1))`, the scalar by which `m s` acts.
    pub multiplication_of_section: String,
    /// Rescaling making `s` a section of multiplication.
    pub section_scale: String,
    pub section_ok: bool,
    pub center_dim: usize,
    pub matches_bruteforce: bool,
}

impl Cl1ResolutionCertificate {
    pub fn passed(&self) -> bool {
        self.bimodule_map && self.even && self.section_ok && self.matches_bruteforce && self.center_dim == 2
    }
}

pub fn hh_cl1_resolution() -> Cl1ResolutionCertificate {
    let cl = CliffordAlgebra::new(QuadraticForm::diagonal(&[Scalar::one()])).unwrap();
    let a = &cl.alg;
    // A (x) A^op as 2x2 coefficient arrays c[x][y] for basis x (x) y.
    type T = [[Scalar; 2]; 2];
    let zero = || -> T { [[Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero()]] };
    let mut s1 = zero();
    s1[0][0] = Scalar::one();
    s1[1][1] = Scalar::one();
    let left = |b: usize, t: &T| -> T {
        let mut out = zero();
        for x in 0..2 {
            for y in 0..2 {
                for (k, c) in a.basis_product(b, x) {
                    out[*k][y] += &(c * &t[x][y]);
                }
            }
        }
        out
    };
    let right = |t: &T, b: usize| -> T {
        let mut out = zero();
        for x in 0..2 {
            for y in 0..2 {
                for (k, c) in a.basis_product(y, b) {
                    out[x][*k] += &(c * &t[x][y]);
                }
            }
        }
        out
    };
    let bimodule_map = (0..2).all(|b| left(b, &s1) == right(&s1, b));
    let even = (0..2).all(|x| (0..2).all(|y| s1[x][y].is_zero() || (a.parity[x] + a.parity[y]).is_multiple_of(2)));
    let mult = |t: &T| -> Vector {
        let mut out = vec![Scalar::zero(); 2];
        for x in 0..2 {
            for y in 0..2 {
                for (k, c) in a.basis_product(x, y) {
                    out[*k] += &(c * &t[x][y]);
                }
            }
        }
        out
    };
    let ms = mult(&s1);
    let scalar = ms[0].clone();
    let scale = scalar.inv();
    // m((scale) s(b)) = b for both basis elements b.
    let section_ok = ms[1].is_zero()
        && (0..2).all(|b| {
            let sb = left(b, &s1);
            let m = mult(&sb);
            m.iter().map(|c| c * &scale).collect::<Vec<_>>() == a.basis(b)
        });
    let center = a.center_dims(false);
    let hh = hh_bar_bruteforce(a, 4, SignConvention::Plain);
    let matches = hh.total(0) == center[0] + center[1] && (1..=4).all(|s| hh.total(s) == 0);
    Cl1ResolutionCertificate {
        bimodule_map,
        even,
        multiplication_of_section: scalar.to_string(),
        section_scale: scale.to_string(),
        section_ok,
        center_dim: center[0] + center[1],
        matches_bruteforce: matches,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedInvariants {
    pub parity_dims: [usize; 2],
    pub center: [usize; 2],
    pub supercenter: [usize; 2],
}

pub fn graded_invariants(a: &GradedAlgebra) -> GradedInvariants {
    GradedInvariants { parity_dims: a.parity_dims(), center: a.center_dims(false), supercenter: a.center_dims(true) }
}

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    /// Images of the source generators, verified.
    Isomorphic { images: Vec<Vector> },
    NotIsomorphic { reason: String },
}

/// Checks that odd `images` satisfy the Clifford relations of `src` and that
/// the induced map on the `2^n` basis words is bijective.
pub fn verify_generator_images(src: &CliffordAlgebra, tgt: &GradedAlgebra, images: &[Vector]) -> bool {
    let n = src.n();
    if images.len() != n || tgt.dim() != src.alg.dim() {
        return false;
    }
    if images.iter().any(|g| tgt.element_parity(g) != Some(1)) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = crate::linalg::Matrix::from_columns(&[tgt.mul(&images[i], &images[j]), tgt.mul(&images[j], &images[i])]);
            let sum: Vector = (0..tgt.dim()).map(|k| &lhs[(k, 0)] + &lhs[(k, 1)]).collect();
            let mut expected = vec![Scalar::zero(); tgt.dim()];
            expected[0] = &Scalar::int(2) * &src.form.b[(i, j)];
            if sum != expected {
                return false;
            }
        }
    }
    let words: Vec<Vector> = (0..src.alg.dim() as u32)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).fold(tgt.unit(), |acc, i| tgt.mul(&acc, &images[i])))
        .collect();
    rank_of_vectors(&words) == tgt.dim()
}

/// Orthogonal basis for a form: columns `f_i` with `B(f_i, f_j) = 0` for
/// `i != j`, and the values `Q(f_i)`.
pub fn diagonalize(form: &QuadraticForm) -> (Vec<Vector>, Vec<Scalar>) {
    let n = form.n();
    let bil = |u: &[Scalar], v: &[Scalar]| -> Scalar {
        let bv = form.b.apply(v);
        u.iter().zip(&bv).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b))
    };
    let mut rest: Vec<Vector> = (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect();
    let (mut basis, mut values) = (Vec::new(), Vec::new());
    while !rest.is_empty() {
        let pick = if let Some(i) = rest.iter().position(|v| !bil(v, v).is_zero()) {
            rest.remove(i)
        } else {
            let mut found = None;
            'outer: for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    let w: Vector = rest[i].iter().zip(&rest[j]).map(|(a, b)| a + b).collect();
                    if !bil(&w, &w).is_zero() {
                        found = Some((i, w));
                        break 'outer;
                    }
                }
            }
            match found {
                Some((i, w)) => {
                    rest.remove(i);
                    w
                }
                None => rest.remove(0),
            }
        };
        let q = bil(&pick, &pick);
        if !q.is_zero() {
            let inv = q.inv();
            for w in rest.iter_mut() {
                let c = &bil(w, &pick) * &inv;
                for (x, y) in w.iter_mut().zip(&pick) {
                    *x -= &(&c * y);
                }
            }
        }
        basis.push(pick);
        values.push(q);
    }
    (basis, values)
}

fn squarefree_primes(x: &Q) -> Vec<u64> {
    use num_traits::{Signed, ToPrimitive};
    let n = (x.numer() * x.denom()).abs().to_u64().unwrap_or(0);
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out.push(p);
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Witness or refutation for a graded isomorphism `Cl(Q) -> Cl(Q')`.
/// Nondegenerate forms of equal rank are related over a cyclotomic field
/// that contains the needed square roots.
pub fn clifford_iso(a: &CliffordAlgebra, b: &CliffordAlgebra) -> Result<(IsoOutcome, Option<Arc<NumberField>>)> {
    let (ia, ib) = (graded_invariants(&a.alg), graded_invariants(&b.alg));
    if ia.parity_dims != ib.parity_dims {
        return Ok((IsoOutcome::NotIsomorphic { reason: format!("parity dimensions {:?} vs {:?}", ia.parity_dims, ib.parity_dims) }, None));
    }
    if ia.supercenter != ib.supercenter || ia.center != ib.center {
        return Ok((IsoOutcome::NotIsomorphic { reason: format!("graded center dimensions {:?}/{:?} vs {:?}/{:?}", ia.center, ia.supercenter, ib.center, ib.supercenter) }, None));
    }
    let (fa, da) = diagonalize(&a.form);
    let (fb, db) = diagonalize(&b.form);
    let rank_a = da.iter().filter(|x| !x.is_zero()).count();
    let rank_b = db.iter().filter(|x| !x.is_zero()).count();
    if rank_a != rank_b {
        return Ok((IsoOutcome::NotIsomorphic { reason: format!("form ranks {rank_a} vs {rank_b}") }, None));
    }
    if rank_a != a.n() {
        return Err(Error::Unsupported("witness search needs nondegenerate forms".into()));
    }
    let ratios: Vec<Q> = da.iter().zip(&db).map(|(x, y)| (x * &y.inv()).as_rational().cloned()).collect::<Option<_>>().ok_or_else(|| Error::Unsupported("forms must be rational".into()))?;
    let mut order: u32 = 8;
    for r in &ratios {
        for p in squarefree_primes(r) {
            if p > 2 && !order.is_multiple_of(p as u32) {
                order *= p as u32;
            }
        }
    }
    let field = NumberField::cyclotomic(order);
    let roots: Vec<Scalar> = ratios.iter().map(|r| field.sqrt_rational(r)).collect::<Option<_>>().ok_or_else(|| Error::Verification("square root missing from field".into()))?;
    // T f_i = c_i f'_i, so T = F' diag(c) F^{-1}.
    let n = a.n();
    let f_a = Matrix::from_columns(&fa);
    let f_b = Matrix::from_columns(&fb);
    let mut diag = Matrix::zeros(n, n);
    for (i, c) in roots.iter().enumerate() {
        diag[(i, i)] = c.clone();
    }
    let inv = f_a.inverse().ok_or_else(|| Error::Verification("orthogonal basis is singular".into()))?;
    let t = f_b.mul(&diag).mul(&inv);
    let images: Vec<Vector> = (0..n).map(|i| b.vector(&t.column(i))).collect();
    if !verify_generator_images(a, &b.alg, &images) {
        return Err(Error::Verification("constructed generator images fail the Clifford relations".into()));
    }
    Ok((IsoOutcome::Isomorphic { images }, Some(field)))
}

/// `End(C^{1|1})` with basis `1, h = E11 - E22, E12, E21` over `Q(i)`.
pub fn end_u() -> GradedAlgebra {
    let s = Scalar::int;
    let half = Scalar::frac(1, 2);
    let t = |v: Vec<(usize, Scalar)>| v;
    let mut table = vec![vec![Vec::new(); 4]; 4];
    for k in 0..4 {
        table[0][k] = t(vec![(k, s(1))]);
        table[k][0] = t(vec![(k, s(1))]);
    }
    table[1][1] = t(vec![(0, s(1))]);
    table[1][2] = t(vec![(2, s(1))]);
    table[2][1] = t(vec![(2, s(-1))]);
    table[1][3] = t(vec![(3, s(-1))]);
    table[3][1] = t(vec![(3, s(1))]);
    table[2][3] = t(vec![(0, half.clone()), (1, half.clone())]);
    table[3][2] = t(vec![(0, half.clone()), (1, -&half)]);
    GradedAlgebra::new(vec!["1".into(), "h".into(), "E12".into(), "E21".into()], vec![0, 0, 1, 1], None, table).expect("End(U) table")
}

/// `gamma_1 = [[0,1],[1,0]]`, `gamma_2 = [[0,-i],[i,0]]` in `End(C^{1|1})`.
pub fn cl2_matrix_images() -> Vec<Vector> {
    let f = NumberField::cyclotomic(4);
    let i = f.z();
    vec![vec![Scalar::zero(), Scalar::zero(), Scalar::one(), Scalar::one()], vec![Scalar::zero(), Scalar::zero(), -&i, i]]
}

/// `C + C` with the idempotent basis `1, f = e1 - e2` placed in even degree.
pub fn split_algebra() -> GradedAlgebra {
    let table = vec![vec![vec![(0, Scalar::one())], vec![(1, Scalar::one())]], vec![vec![(1, Scalar::one())], vec![(0, Scalar::one())]]];
    GradedAlgebra::new(vec!["1".into(), "f".into()], vec![0, 0], None, table).expect("C + C table")
}

/// Refutation through graded invariants, when they differ.
pub fn invariant_refutation(a: &GradedAlgebra, b: &GradedAlgebra) -> Option<String> {
    let (ia, ib) = (graded_invariants(a), graded_invariants(b));
    if ia.parity_dims != ib.parity_dims {
        return Some(format!("parity dimensions {:?} vs {:?}", ia.parity_dims, ib.parity_dims));
    }
    if ia.center != ib.center || ia.supercenter != ib.supercenter {
        return Some(format!("center dimensions {:?}/{:?} vs {:?}/{:?}", ia.center, ia.supercenter, ib.center, ib.supercenter));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(entries: &[i64]) -> CliffordAlgebra {
        CliffordAlgebra::new(QuadraticForm::diagonal(&entries.iter().map(|&x| Scalar::int(x)).collect::<Vec<_>>())).unwrap()
    }

    #[test]
    fn relations() {
        let c1 = cl(&[1]);
        let th = c1.generator(0);
        assert_eq!(c1.alg.mul(&th, &th), c1.alg.unit());
        let c2 = cl(&[1, 1]);
        let (e1, e2) = (c2.generator(0), c2.generator(1));
        let a = c2.alg.mul(&e1, &e2);
        let b = c2.alg.mul(&e2, &e1);
        assert_eq!(a, b.iter().map(|x| -x).collect::<Vec<_>>());
        assert!(c2.alg.is_associative());
        let mut b = Matrix::from_ints(&[&[1, 1], &[1, 2]]);
        let off = CliffordAlgebra::new(QuadraticForm::new(b.clone()).unwrap()).unwrap();
        assert!(off.alg.is_associative());
        let v = vec![Scalar::int(3), Scalar::int(-2)];
        assert!(off.square_defect(&v).iter().all(|c| c.is_zero()));
        b[(0, 1)] = Scalar::int(5);
        assert!(QuadraticForm::new(b).is_err());
    }

    #[test]
    fn hessian_clifford_4_3() {
        let w = crate::superpotential::Superpotential::new(4, 3).unwrap();
        let cl = hessian_clifford(&w, &vec![Scalar::int(3); 4]).unwrap();
        assert!(cl.form.is_nondegenerate());
        for i in 0..4 {
            let g = cl.generator(i);
            let mut expected = vec![Scalar::zero(); 16];
            expected[0] = Scalar::int(-18);
            assert_eq!(cl.alg.mul(&g, &g), expected);
        }
    }

    #[test]
    fn formality_precondition_small_n() {
        for n in 1..=3 {
            let h = hh_bar_bruteforce(&cl(&vec![1; n]).alg, 3, SignConvention::Plain);
            assert!(formality_precondition(&h), "n={n}: {h:?}");
            assert!((1..=3).all(|s| h.total(s) == 0));
        }
    }

    #[test]
    fn bar_complex_is_a_complex() {
        for conv in [SignConvention::Koszul, SignConvention::Plain] {
            for alg in [cl(&[1]).alg, cl(&[1, 1]).alg, exterior(1).alg, exterior(2).alg] {
                for s in 0..3 {
                    assert!(bar_differential_squares_to_zero(&alg, s, conv), "{conv:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn hh_cl1_cl2() {
        let h1 = hh_bar_bruteforce(&cl(&[1]).alg, 4, SignConvention::Plain);
        assert_eq!(h1.dims[0], [1, 1]);
        assert!((1..=4).all(|s| h1.total(s) == 0));
        let h2 = hh_bar_bruteforce(&cl(&[1, 1]).alg, 4, SignConvention::Plain);
        assert_eq!(h2.dims[0], [1, 0]);
        assert!((1..=4).all(|s| h2.total(s) == 0));
    }

    #[test]
    fn hh_koszul_convention() {
        // With Koszul signs HH^0 is the supercenter, which for Cl_1 is the scalars.
        let h1 = hh_bar_bruteforce(&cl(&[1]).alg, 4, SignConvention::Koszul);
        assert_eq!(h1.dims[0], [1, 0]);
        assert!((1..=4).all(|s| h1.total(s) == 0));
    }

    #[test]
    fn hh_exterior_nonvanishing() {
        for conv in [SignConvention::Koszul, SignConvention::Plain] {
            let h = hh_bar_bruteforce(&exterior(1).alg, 4, conv);
            assert!((0..=4).all(|s| h.total(s) > 0), "{h:?}");
        }
    }

    #[test]
    fn cl1_resolution() {
        let c = hh_cl1_resolution();
        assert!(c.passed(), "{c:?}");
        assert_eq!(c.multiplication_of_section, "2");
        assert_eq!(c.section_scale, "1/2");
    }

    #[test]
    fn cl2_is_end_u() {
        assert!(verify_generator_images(&cl(&[1, 1]), &end_u(), &cl2_matrix_images()));
        assert!(end_u().is_associative());
    }

    #[test]
    fn cl1_not_split() {
        let r = invariant_refutation(&cl(&[1]).alg, &split_algebra()).unwrap();
        assert!(r.contains("parity"));
    }

    #[test]
    fn iso_witnesses() {
        let (o, _) = clifford_iso(&cl(&[1, 1]), &cl(&[1, 1])).unwrap();
        assert!(matches!(o, IsoOutcome::Isomorphic { .. }));
        let (o, _) = clifford_iso(&cl(&[1, 2, -3]), &cl(&[5, -1, 7])).unwrap();
        assert!(matches!(o, IsoOutcome::Isomorphic { .. }));
        let (o, _) = clifford_iso(&cl(&[1]), &cl(&[0])).unwrap();
        assert!(matches!(o, IsoOutcome::NotIsomorphic { .. }));
    }
}

//! Frobenius algebras given by structure constants: verification, the
//! generalized eigen-decomposition of `c1 *`, the hyperplane subalgebra
//! `Q[P]/q(P - w)`, and the quantum cohomology of the cubic surface.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Mono, Poly, Vars};
use crate::scalar::{Scalar, Q};

/// Commutative unital algebra with structure constants and a pairing.
#[derive(Clone, Debug)]
pub struct FrobeniusAlgebra {
    pub labels: Vec<String>,
    /// `table[i][j]` is the product of basis elements `i` and `j`.
    table: Vec<Vec<Vec<Scalar>>>,
    pub pairing: Matrix,
    pub unit: Vec<Scalar>,
    pub c1: Vec<Scalar>,
}

pub type Vector = Vec<Scalar>;

fn zero_vec(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

fn axpy(acc: &mut Vector, c: &Scalar, x: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += &(c * b);
        }
    }
}

impl FrobeniusAlgebra {
    pub fn new(labels: Vec<String>, table: Vec<Vec<Vec<Scalar>>>, pairing: Matrix, unit: Vector, c1: Vector) -> Result<FrobeniusAlgebra> {
        let d = labels.len();
        if table.len() != d || table.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(Error::Shape("structure constants must be d x d x d".into()));
        }
        if pairing.rows != d || pairing.cols != d || unit.len() != d || c1.len() != d {
            return Err(Error::Shape("pairing, unit and c1 must match the basis".into()));
        }
        Ok(FrobeniusAlgebra { labels, table, pairing, unit, c1 })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = zero_vec(self.dim());
        v[i] = Scalar::one();
        v
    }

    pub fn constant(&self, c: &Scalar) -> Vector {
        self.unit.iter().map(|u| u * c).collect()
    }

    pub fn add(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }

    pub fn scale(&self, c: &Scalar, x: &[Scalar]) -> Vector {
        x.iter().map(|a| a * c).collect()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = zero_vec(self.dim());
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                axpy(&mut out, &(a * b), &self.table[i][j]);
            }
        }
        out
    }

    pub fn pow(&self, x: &[Scalar], k: u32) -> Vector {
        let mut acc = self.unit.clone();
        for _ in 0..k {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn pair(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let py = self.pairing.apply(y);
        x.iter().zip(&py).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b))
    }

    /// Matrix of `y -> x * y`.
    pub fn left_mult(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim()).map(|j| self.mul(x, &self.basis(j))).collect();
        Matrix::from_columns(&cols)
    }

    pub fn render(&self, x: &[Scalar]) -> String {
        let terms: Vec<(Scalar, &str)> = x.iter().zip(&self.labels).filter(|(c, _)| !c.is_zero()).map(|(c, l)| (c.clone(), l.as_str())).collect();
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (c, l)) in terms.iter().enumerate() {
            let s = if c.is_one() { l.to_string() } else if *c == Scalar::int(-1) { format!("-{l}") } else { format!("{c}*{l}") };
            if k > 0 && !s.starts_with('-') {
                out.push_str(" + ");
            } else if k > 0 {
                out.push(' ');
            }
            out.push_str(&s);
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusCertificate {
    pub dim: usize,
    pub associative: bool,
    pub commutative: bool,
    pub unit: bool,
    pub frobenius: bool,
    pub pairing_nondegenerate: bool,
    pub failures: Vec<String>,
}

impl FrobeniusCertificate {
    pub fn passed(&self) -> bool {
        self.associative && self.commutative && self.unit && self.frobenius && self.pairing_nondegenerate
    }
}

pub fn verify_frobenius(alg: &FrobeniusAlgebra) -> FrobeniusCertificate {
    let d = alg.dim();
    let mut failures = Vec::new();
    let (mut associative, mut commutative, mut unit, mut frobenius) = (true, true, true, true);
    let l = &alg.labels;
    for i in 0..d {
        let bi = alg.basis(i);
        if alg.mul(&alg.unit, &bi) != bi || alg.mul(&bi, &alg.unit) != bi {
            unit = false;
            failures.push(format!("unit fails on {}", l[i]));
        }
        for j in 0..d {
            let bj = alg.basis(j);
            let ij = alg.mul(&bi, &bj);
            if ij != alg.mul(&bj, &bi) {
                commutative = false;
                failures.push(format!("commutativity fails on ({}, {})", l[i], l[j]));
            }
            for k in 0..d {
                let bk = alg.basis(k);
                let jk = alg.mul(&bj, &bk);
                if alg.mul(&ij, &bk) != alg.mul(&bi, &jk) {
                    associative = false;
                    failures.push(format!("associativity fails on ({}, {}, {})", l[i], l[j], l[k]));
                }
                if alg.pair(&ij, &bk) != alg.pair(&bi, &jk) {
                    frobenius = false;
                    failures.push(format!("Frobenius symmetry fails on ({}, {}, {})", l[i], l[j], l[k]));
                }
            }
        }
    }
    FrobeniusCertificate { dim: d, associative, commutative, unit, frobenius, pairing_nondegenerate: !alg.pairing.det().is_zero(), failures }
}

// Dense univariate polynomials over Scalar, low degree first.

fn utrim(p: &mut Vec<Scalar>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn udivrem(a: &[Scalar], b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
    let mut r = a.to_vec();
    utrim(&mut r);
    let db = b.len() - 1;
    let inv = b[db].inv();
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quo = vec![Scalar::zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() * &inv;
        for (i, y) in b.iter().enumerate() {
            let v = &r[k + i] - &(&c * y);
            r[k + i] = v;
        }
        quo[k] = c;
        utrim(&mut r);
    }
    utrim(&mut quo);
    (quo, r)
}

fn ugcd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    utrim(&mut x);
    utrim(&mut y);
    while !y.is_empty() {
        let (_, r) = udivrem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn uderiv(p: &[Scalar]) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = p.iter().enumerate().skip(1).map(|(i, c)| &Scalar::int(i as i64) * c).collect();
    utrim(&mut out);
    out
}

pub fn is_squarefree(p: &[Scalar]) -> bool {
    ugcd(p, &uderiv(p)).len() <= 1
}

/// Minimal polynomial of `x` (monic, low degree first) from the Krylov
/// sequence `1, x, x^2, ...`.
pub fn minimal_polynomial(alg: &FrobeniusAlgebra, x: &[Scalar]) -> Vec<Scalar> {
    let mut powers = vec![alg.unit.clone()];
    loop {
        let next = alg.mul(powers.last().unwrap(), x);
        let m = Matrix::from_columns(&powers);
        if let Some(c) = m.solve(&next) {
            let mut p: Vec<Scalar> = c.iter().map(|v| -v).collect();
            p.push(Scalar::one());
            return p;
        }
        powers.push(next);
    }
}

/// Rational roots of a polynomial with rational coefficients.
pub fn rational_roots(p: &[Scalar]) -> Option<Vec<Q>> {
    let coeffs: Vec<Q> = p.iter().map(|c| c.as_rational().cloned()).collect::<Option<_>>()?;
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    while ints.last().is_some_and(|c| c.is_zero()) {
        ints.pop();
    }
    let mut roots = Vec::new();
    if ints.is_empty() {
        return Some(roots);
    }
    if ints[0].is_zero() {
        roots.push(Q::zero());
        while ints[0].is_zero() {
            ints.remove(0);
        }
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let eval = |x: &Q| ints.iter().rev().fold(Q::zero(), |acc, c| acc * x + Q::from_integer(c.clone()));
    for num in divisors(&a0)? {
        for den in divisors(&an)? {
            for sign in [1, -1] {
                let cand = Q::new(BigInt::from(sign) * &num, den.clone());
                if eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub value: Scalar,
    pub multiplicity: usize,
    pub basis: Vec<Vector>,
    pub idempotent: Option<Vector>,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenspaces: Vec<Eigenspace>,
    /// Factor of the characteristic polynomial with no root in the field,
    /// i.e. the extension the decomposition would require.
    pub requires_extension: Option<Vec<Scalar>>,
    pub complete: bool,
    pub orthogonal: bool,
    pub idempotents_ok: bool,
}

impl Spectrum {
    pub fn multiplicities(&self) -> Vec<(Scalar, usize)> {
        self.eigenspaces.iter().map(|e| (e.value.clone(), e.multiplicity)).collect()
    }

    pub fn describe_extension(&self) -> Option<String> {
        self.requires_extension.as_ref().map(|p| {
            let poly = Poly { terms: p.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (Mono::var_pow(0, i as u16), c.clone())).collect() };
            format!("requires extension by minimal polynomial {}", poly.render(&Vars::new(vec!["x".into()])))
        })
    }
}

/// Generalized eigen-decomposition of `x *` at the given candidate eigenvalues.
pub fn spectrum_at(alg: &FrobeniusAlgebra, x: &[Scalar], candidates: &[Scalar]) -> Spectrum {
    let d = alg.dim();
    let m = alg.left_mult(x);
    let mut eigenspaces = Vec::new();
    for lam in candidates {
        if eigenspaces.iter().any(|e: &Eigenspace| &e.value == lam) {
            continue;
        }
        let shifted = m.sub(&Matrix::identity(d).scale(lam));
        let basis = shifted.pow(d as u32).kernel();
        if !basis.is_empty() {
            eigenspaces.push(Eigenspace { value: lam.clone(), multiplicity: basis.len(), basis, idempotent: None });
        }
    }
    finish_spectrum(alg, eigenspaces, None)
}

fn finish_spectrum(alg: &FrobeniusAlgebra, mut eigenspaces: Vec<Eigenspace>, requires_extension: Option<Vec<Scalar>>) -> Spectrum {
    let d = alg.dim();
    let total: usize = eigenspaces.iter().map(|e| e.multiplicity).sum();
    let complete = total == d;
    let mut orthogonal = true;
    for (i, e) in eigenspaces.iter().enumerate() {
        for f in &eigenspaces[i + 1..] {
            orthogonal &= e.basis.iter().all(|u| f.basis.iter().all(|v| alg.pair(u, v).is_zero()));
        }
    }
    let mut idempotents_ok = false;
    if complete {
        let cols: Vec<Vector> = eigenspaces.iter().flat_map(|e| e.basis.clone()).collect();
        let s = Matrix::from_columns(&cols);
        if let Some(sinv) = s.inverse() {
            let coords = sinv.apply(&alg.unit);
            let mut offset = 0;
            for e in eigenspaces.iter_mut() {
                let mut idem = zero_vec(d);
                for k in 0..e.multiplicity {
                    axpy(&mut idem, &coords[offset + k], &cols[offset + k]);
                }
                offset += e.multiplicity;
                e.idempotent = Some(idem);
            }
            let idems: Vec<&Vector> = eigenspaces.iter().map(|e| e.idempotent.as_ref().unwrap()).collect();
            let sum = idems.iter().fold(zero_vec(d), |acc, e| alg.add(&acc, e));
            idempotents_ok = sum == alg.unit;
            for (i, e) in idems.iter().enumerate() {
                idempotents_ok &= alg.mul(e, e) == **e;
                for f in &idems[i + 1..] {
                    idempotents_ok &= alg.mul(e, f).iter().all(|c| c.is_zero());
                }
            }
        }
    }
    Spectrum { eigenspaces, requires_extension, complete, orthogonal, idempotents_ok }
}

/// Decomposition of `c1 *` over Q. Irrational eigenvalues are reported
/// through `requires_extension`.
pub fn c1_spectrum(alg: &FrobeniusAlgebra) -> Spectrum {
    let m = alg.left_mult(&alg.c1);
    let charpoly = m.charpoly();
    let roots = rational_roots(&charpoly).unwrap_or_default();
    let mut rest = charpoly.clone();
    for r in &roots {
        let lin = vec![Scalar::from(-r.clone()), Scalar::one()];
        loop {
            let (q, rem) = udivrem(&rest, &lin);
            if !rem.is_empty() {
                break;
            }
            rest = q;
        }
    }
    let cands: Vec<Scalar> = roots.into_iter().map(Scalar::from).collect();
    let spec = spectrum_at(alg, &alg.c1, &cands);
    let requires_extension = (rest.len() > 1).then_some(rest);
    Spectrum { requires_extension, ..spec }
}

/// Whether a commutative algebra is semisimple, via the minimal polynomial of
/// a generic element (square-free iff semisimple).
#[derive(Clone, Debug, Serialize)]
pub struct SemisimplicityReport {
    pub generic_element: String,
    pub minimal_polynomial_degree: usize,
    pub squarefree: bool,
    pub trace_form_nondegenerate: bool,
    pub semisimple: bool,
}

pub fn semisimplicity(alg: &FrobeniusAlgebra) -> SemisimplicityReport {
    let primes = [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let x: Vector = (0..alg.dim()).map(|i| Scalar::int(primes[i % primes.len()] + (i / primes.len()) as i64)).collect();
    let mp = minimal_polynomial(alg, &x);
    let squarefree = is_squarefree(&mp);
    let d = alg.dim();
    let mut tf = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let lm = alg.left_mult(&alg.mul(&alg.basis(i), &alg.basis(j)));
            let mut tr = Scalar::zero();
            for k in 0..d {
                tr += &lm[(k, k)];
            }
            tf[(i, j)] = tr;
        }
    }
    let trace_ok = !tf.det().is_zero();
    SemisimplicityReport {
        generic_element: alg.render(&x),
        minimal_polynomial_degree: mp.len() - 1,
        squarefree,
        trace_form_nondegenerate: trace_ok,
        semisimple: squarefree && trace_ok,
    }
}

/// `Q[x]/p(x)` with basis `1, x, ..., x^(d-1)` and the pairing
/// `<f, g>` = coefficient of `x^(d-1)` in `f g`. `p` is monic, low degree first.
pub fn monogenic_algebra(var: &str, p: &[Scalar], c1: Vector) -> Result<FrobeniusAlgebra> {
    let d = p.len() - 1;
    if d == 0 || !p[d].is_one() {
        return Err(Error::Invalid("relation must be monic of positive degree".into()));
    }
    let reduce = |k: usize| -> Vector {
        let mut mono = vec![Scalar::zero(); k + 1];
        mono[k] = Scalar::one();
        let (_, mut r) = udivrem(&mono, p);
        r.resize(d, Scalar::zero());
        r
    };
    let powers: Vec<Vector> = (0..2 * d).map(reduce).collect();
    let table: Vec<Vec<Vector>> = (0..d).map(|i| (0..d).map(|j| powers[i + j].clone()).collect()).collect();
    let mut pairing = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            pairing[(i, j)] = powers[i + j][d - 1].clone();
        }
    }
    let labels = (0..d)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        })
        .collect();
    let mut unit = zero_vec(d);
    unit[0] = Scalar::one();
    FrobeniusAlgebra::new(labels, table, pairing, unit, c1)
}

/// Coefficients of `q(x) = x^(n-1) - a^a x^(a-1)` composed with `x = P - w`.
pub fn shifted_q(n: usize, a: u32, w: i64) -> Vec<Scalar> {
    let aa = (a as i64).pow(a);
    let mut q = vec![Scalar::zero(); n];
    q[n - 1] = Scalar::one();
    q[a as usize - 1] = Scalar::int(-aa);
    // Taylor shift: q(P - w) = sum_k q_k (P - w)^k.
    let mut out = vec![Scalar::zero(); n];
    for (k, c) in q.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for i in 0..=k {
            let binom = binomial(k as u64, i as u64);
            let term = &(&Scalar::int(binom) * &Scalar::int(-w).pow((k - i) as u64)) * c;
            out[i] += &term;
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// The subalgebra generated by the hyperplane class, `Q[P]/q(P - w)`, with
/// `c1 = (n-a) P`.
pub fn hyperplane_algebra(n: usize, a: u32) -> Result<FrobeniusAlgebra> {
    if n < 3 || a == 0 || a as usize > n - 1 {
        return Err(Error::Invalid(format!("need 1 <= a <= n-1, got n={n}, a={a}")));
    }
    let w = crate::superpotential::shift(n, a);
    let p = shifted_q(n, a, w);
    let mut c1 = zero_vec(n - 1);
    c1[1] = Scalar::int(n as i64 - a as i64);
    monogenic_algebra("P", &p, c1)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumMatch {
    pub n: usize,
    pub a: u32,
    pub big_value: String,
    pub big_multiplicity: usize,
    pub small_values: Vec<String>,
    pub small_multiplicities: Vec<usize>,
    pub complete: bool,
    pub matches: bool,
}

/// Compare the spectrum of `c1 *` on the hyperplane algebra with the
/// critical values of the superpotential.
pub fn spectrum_matching(n: usize, a: u32) -> Result<SpectrumMatch> {
    let alg = hyperplane_algebra(n, a)?;
    let (_, points) = crate::superpotential::critical_points(n, a)?;
    let big = points[0].value.clone();
    let mut smalls: Vec<Scalar> = Vec::new();
    for p in &points[1..] {
        if !smalls.contains(&p.value) {
            smalls.push(p.value.clone());
        }
    }
    let mut cands = vec![big.clone()];
    cands.extend(smalls.iter().cloned());
    let spec = spectrum_at(&alg, &alg.c1, &cands);
    let mult = |v: &Scalar| spec.eigenspaces.iter().find(|e| &e.value == v).map_or(0, |e| e.multiplicity);
    let big_m = mult(&big);
    let small_m: Vec<usize> = smalls.iter().map(mult).collect();
    let matches = spec.complete && big_m == a as usize - 1 && small_m.iter().all(|&m| m == 1) && smalls.len() == n - a as usize;
    Ok(SpectrumMatch {
        n,
        a,
        big_value: big.render(),
        big_multiplicity: big_m,
        small_values: smalls.iter().map(|s| s.render()).collect(),
        small_multiplicities: small_m,
        complete: spec.complete,
        matches,
    })
}

/// Text format: `basis L1 L2 ...` (first label is the unit), `def NAME = lin`,
/// `mul X Y = lin` (commutativity implied), `pair X Y = q`, `c1 = lin`.
/// `lin` is a linear combination of labels and definitions; a bare constant
/// is a multiple of the unit.
pub fn parse_algebra(text: &str) -> Result<FrobeniusAlgebra> {
    let mut labels: Vec<String> = Vec::new();
    let mut defs: Vec<(String, Vector)> = Vec::new();
    let mut table: Option<Vec<Vec<Option<Vector>>>> = None;
    let mut pairing: Option<Matrix> = None;
    let mut c1: Option<Vector> = None;
    let lin = |labels: &[String], defs: &[(String, Vector)], s: &str| -> Result<Vector> {
        let d = labels.len();
        let mut names: Vec<String> = labels[1..].to_vec();
        names.extend(defs.iter().map(|(n, _)| n.clone()));
        let p = Vars::new(names).parse(s)?;
        let mut out = zero_vec(d);
        for (m, c) in &p.terms {
            match m.degree() {
                0 => out[0] += c,
                1 => {
                    let v = (0..MAX).find(|&i| m.0[i] == 1).unwrap();
                    if v < d - 1 {
                        out[v + 1] += c;
                    } else {
                        axpy(&mut out, c, &defs[v - (d - 1)].1);
                    }
                }
                _ => return Err(Error::Parse(format!("nonlinear term in '{s}'"))),
            }
        }
        Ok(out)
    };
    const MAX: usize = crate::poly::MAX_VARS;
    let index = |labels: &[String], l: &str| labels.iter().position(|x| x == l).ok_or_else(|| Error::Parse(format!("unknown label {l}")));
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (head, rhs) = match line.split_once('=') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (line, None),
        };
        let words: Vec<&str> = head.split_whitespace().collect();
        match (words.as_slice(), rhs) {
            (["basis", rest @ ..], None) => {
                if rest.is_empty() || rest.len() > MAX + 1 {
                    return Err(Error::Parse("basis needs between 1 and 17 labels".into()));
                }
                labels = rest.iter().map(|s| s.to_string()).collect();
                let d = labels.len();
                table = Some(vec![vec![None; d]; d]);
                pairing = Some(Matrix::zeros(d, d));
            }
            (["def", name], Some(r)) => {
                let v = lin(&labels, &defs, r)?;
                defs.push((name.to_string(), v));
            }
            (["mul", x, y], Some(r)) => {
                let v = lin(&labels, &defs, r)?;
                let (i, j) = (index(&labels, x)?, index(&labels, y)?);
                let t = table.as_mut().ok_or_else(|| Error::Parse("mul before basis".into()))?;
                t[i][j] = Some(v.clone());
                t[j][i] = Some(v);
            }
            (["pair", x, y], Some(r)) => {
                let (i, j) = (index(&labels, x)?, index(&labels, y)?);
                let c = Vars::new(vec![]).parse(r)?.constant_term();
                let p = pairing.as_mut().ok_or_else(|| Error::Parse("pair before basis".into()))?;
                p[(i, j)] = c.clone();
                p[(j, i)] = c;
            }
            (["c1"], Some(r)) => c1 = Some(lin(&labels, &defs, r)?),
            _ => return Err(Error::Parse(format!("cannot parse line '{line}'"))),
        }
    }
    let d = labels.len();
    let table = table.ok_or_else(|| Error::Parse("missing basis".into()))?;
    let mut full = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let v = if i == 0 {
                let mut e = zero_vec(d);
                e[j] = Scalar::one();
                e
            } else if j == 0 {
                let mut e = zero_vec(d);
                e[i] = Scalar::one();
                e
            } else {
                table[i][j].clone().ok_or_else(|| Error::Parse(format!("missing product {} {}", labels[i], labels[j])))?
            };
            row.push(v);
        }
        full.push(row);
    }
    let mut unit = zero_vec(d);
    unit[0] = Scalar::one();
    let c1 = c1.unwrap_or_else(|| zero_vec(d));
    FrobeniusAlgebra::new(labels, full, pairing.unwrap(), unit, c1)
}

/// Cubic surface as the plane blown up at six points: basis
/// `1, h, p, e1..e6`, with `M = sum e_i`, `A = 3h - M + 6`, `c1 = A - 6`.
pub fn cubic_surface_text() -> String {
    let mut s = String::from("basis 1 h p e1 e2 e3 e4 e5 e6\n");
    s.push_str("def M = e1 + e2 + e3 + e4 + e5 + e6\n");
    s.push_str("def A = 3*h - M + 6\n");
    s.push_str("mul p p = 84*A + 36\n");
    s.push_str("mul h p = 42*A - 6*h\n");
    s.push_str("mul h h = p + 25*A - 12*h - 30\n");
    for i in 1..=6 {
        s.push_str(&format!("mul e{i} p = 14*A - 6*e{i}\n"));
        s.push_str(&format!("mul h e{i} = 9*A - 2*h - 6*e{i} - 12\n"));
        s.push_str(&format!("mul e{i} e{i} = -p + 5*A - 4*e{i} - 10\n"));
        for j in i + 1..=6 {
            s.push_str(&format!("mul e{i} e{j} = 3*A - 2*e{i} - 2*e{j} - 4\n"));
        }
    }
    s.push_str("pair 1 p = 1\npair h h = 1\n");
    for i in 1..=6 {
        s.push_str(&format!("pair e{i} e{i} = -1\n"));
    }
    s.push_str("c1 = A - 6\n");
    s
}

pub fn cubic_surface() -> FrobeniusAlgebra {
    parse_algebra(&cubic_surface_text()).expect("built-in table parses")
}

/// Square identity `(x + t)^2 = alpha p + beta c1 + gamma`, with `t` solved
/// so that the square lies in the span of `p`, `c1` and `1`.
#[derive(Clone, Debug, Serialize)]
pub struct SquareIdentity {
    pub element: String,
    pub shift: String,
    pub p_coeff: String,
    pub c1_coeff: String,
    pub constant: String,
    #[serde(skip)]
    pub values: [Scalar; 4],
}

pub fn derive_square_identity(alg: &FrobeniusAlgebra, label: &str) -> Result<SquareIdentity> {
    let i = alg.labels.iter().position(|l| l == label).ok_or_else(|| Error::Invalid(format!("unknown label {label}")))?;
    let p_idx = alg.labels.iter().position(|l| l == "p").ok_or_else(|| Error::Invalid("algebra has no p".into()))?;
    let x = alg.basis(i);
    let x2 = alg.mul(&x, &x);
    let span = Matrix::from_columns(&[alg.basis(p_idx), alg.c1.clone(), alg.unit.clone()]);
    // (x + t)^2 = x^2 + 2 t x + t^2 must lie in the span; linear in t after
    // absorbing t^2 into the constant.
    let cols = vec![alg.basis(p_idx), alg.c1.clone(), alg.unit.clone(), alg.scale(&Scalar::int(2), &x)];
    let neg: Vector = x2.iter().map(|c| -c).collect();
    let m = Matrix::from_columns(&cols);
    let sol = m.solve(&neg).ok_or_else(|| Error::Verification(format!("no shift puts ({label} + t)^2 in span(p, c1, 1)")))?;
    let t = sol[3].clone();
    let y = alg.add(&x, &alg.constant(&t));
    let y2 = alg.mul(&y, &y);
    let coeffs = span.solve(&y2).ok_or_else(|| Error::Verification("square not in span".into()))?;
    Ok(SquareIdentity {
        element: label.into(),
        shift: t.to_string(),
        p_coeff: coeffs[0].to_string(),
        c1_coeff: coeffs[1].to_string(),
        constant: coeffs[2].to_string(),
        values: [t, coeffs[0].clone(), coeffs[1].clone(), coeffs[2].clone()],
    })
}

/// Whether `(label + t)^2 = alpha p + beta c1 + gamma` holds in the table.
pub fn check_square_identity(alg: &FrobeniusAlgebra, label: &str, t: i64, alpha: i64, beta: i64, gamma: i64) -> bool {
    let (Some(i), Some(pi)) = (alg.labels.iter().position(|l| l == label), alg.labels.iter().position(|l| l == "p")) else {
        return false;
    };
    let y = alg.add(&alg.basis(i), &alg.constant(&Scalar::int(t)));
    let lhs = alg.mul(&y, &y);
    let mut rhs = alg.scale(&Scalar::int(alpha), &alg.basis(pi));
    rhs = alg.add(&rhs, &alg.scale(&Scalar::int(beta), &alg.c1));
    rhs = alg.add(&rhs, &alg.constant(&Scalar::int(gamma)));
    lhs == rhs
}

#[derive(Clone, Debug, Serialize)]
pub struct CubicReport {
    pub frobenius: FrobeniusCertificate,
    pub spectrum: Vec<(String, usize)>,
    pub idempotents_ok: bool,
    pub eigenspaces_orthogonal: bool,
    pub relation_holds: bool,
    /// Vectors checked against the -6 generalized eigenspace.
    pub big_eigenspace_members: Vec<(String, bool)>,
    pub big_eigenspace_spanned: bool,
}

impl CubicReport {
    pub fn passed(&self) -> bool {
        self.frobenius.passed()
            && self.spectrum == vec![("-6".to_string(), 8), ("21".to_string(), 1)]
            && self.idempotents_ok
            && self.eigenspaces_orthogonal
            && self.relation_holds
            && self.big_eigenspace_spanned
    }
}

pub fn cubic_surface_suite() -> CubicReport {
    let alg = cubic_surface();
    let frobenius = verify_frobenius(&alg);
    let spec = c1_spectrum(&alg);
    let a_elem = alg.add(&alg.c1, &alg.constant(&Scalar::int(6)));
    let a2 = alg.mul(&a_elem, &a_elem);
    let a3 = alg.mul(&a2, &a_elem);
    let relation_holds = a3 == alg.scale(&Scalar::int(27), &a2);
    let big = spec.eigenspaces.iter().find(|e| e.value == Scalar::int(-6));
    let mut members = Vec::new();
    let mut candidates = Vec::new();
    let a27 = alg.sub(&a_elem, &alg.constant(&Scalar::int(27)));
    candidates.push(("A - 27".to_string(), a27.clone()));
    candidates.push(("A*(A - 27)".to_string(), alg.mul(&a_elem, &a27)));
    for i in 1..=6 {
        let e = alg.basis(2 + i);
        let v = alg.sub(&alg.scale(&Scalar::int(3), &e), &a_elem);
        candidates.push((format!("3e{i} - A + 6"), alg.add(&v, &alg.constant(&Scalar::int(6)))));
    }
    let mut spanned = false;
    if let Some(big) = big {
        for (name, v) in &candidates {
            members.push((name.clone(), crate::linalg::in_span(&big.basis, v)));
        }
        let vs: Vec<Vector> = candidates.iter().map(|(_, v)| v.clone()).collect();
        spanned = members.iter().all(|(_, ok)| *ok) && crate::linalg::rank_of_vectors(&vs) == big.multiplicity;
    }
    CubicReport {
        frobenius,
        spectrum: spec.multiplicities().into_iter().map(|(v, m)| (v.to_string(), m)).collect(),
        idempotents_ok: spec.idempotents_ok,
        eigenspaces_orthogonal: spec.orthogonal,
        relation_holds,
        big_eigenspace_members: members,
        big_eigenspace_spanned: spanned,
    }
}

/// Whether `v` lies in the `-6` generalized eigenspace of the cubic surface.
pub fn in_big_eigenspace(alg: &FrobeniusAlgebra, v: &[Scalar]) -> bool {
    let a_elem = alg.add(&alg.c1, &alg.constant(&Scalar::int(6)));
    let a2 = alg.mul(&a_elem, &a_elem);
    alg.mul(&a2, v).iter().all(|c| c.is_zero())
}

#[derive(Clone, Debug, Serialize)]
pub struct LinesReport {
    /// `<P^2, P>` as a polynomial in the disk count `w`.
    pub line_count: String,
    pub line_count_matches: bool,
    pub lines_at_minus_6: String,
    pub table_cross_check: String,
    pub c1_square: SquareIdentity,
    pub h_square: SquareIdentity,
    pub e_squares: Vec<SquareIdentity>,
    /// `CO(p)`, `(CO(h) + t_h)^2` and `(CO(e_i) + t_e)^2` as polynomials in `w`.
    pub co_p: String,
    pub h_discriminant: String,
    pub e_discriminant: String,
    pub discriminants_match: bool,
    pub discriminants_vanish_at_minus_6: bool,
    pub quotient: SemisimplicityReport,
}

impl LinesReport {
    pub fn passed(&self) -> bool {
        self.line_count_matches
            && self.lines_at_minus_6 == "27"
            && self.table_cross_check == "27"
            && self.discriminants_match
            && self.discriminants_vanish_at_minus_6
            && !self.quotient.semisimple
    }
}

/// Polynomials in the formal disk count `w` (variable 0) and `P` (variable 1).
fn wvars() -> Vars {
    Vars::new(vec!["w".into(), "P".into()])
}

/// Reduce a polynomial in `P` modulo a relation monic in `P`.
fn reduce_monic(f: &Poly, rel: &Poly, var: usize) -> Poly {
    let d = rel.terms.keys().map(|m| m.0[var]).max().unwrap_or(0);
    let tail = rel - &Poly::var(var).pow(d as u32);
    let mut f = f.clone();
    loop {
        let Some((m, c)) = f.terms.iter().find(|(m, _)| m.0[var] >= d).map(|(m, c)| (*m, c.clone())) else {
            return f;
        };
        f.terms.remove(&m);
        let mut rest = m;
        rest.0[var] -= d;
        f.add_scaled_shifted(&tail, &(-&c), &rest);
    }
}

/// `<P^2, P> = <P^3, 1>` modulo `(P - w)^3 = 27 (P - w)^2`, using
/// `<1, 1> = <P, 1> = 0` and `<P^2, 1> = <P, P> = 3`.
pub fn symbolic_line_count() -> Poly {
    let v = wvars();
    let rel = v.parse("(P - w)^3 - 27*(P - w)^2").unwrap();
    let cube = reduce_monic(&v.parse("P^3").unwrap(), &rel, 1);
    let mut out = Poly::zero();
    for (m, c) in &cube.terms {
        if m.0[1] == 2 {
            let mut wpart = *m;
            wpart.0[1] = 0;
            out.add_term(wpart, &(c * &Scalar::int(3)));
        }
    }
    out
}

pub fn lines_and_semisimplicity() -> Result<LinesReport> {
    let v = wvars();
    let count = symbolic_line_count();
    let expected = v.parse("9*(w + 9)")?;
    let at = |p: &Poly, x: i64| p.eval(&[Scalar::int(x), Scalar::zero()]);
    let alg = cubic_surface();
    let c1 = alg.c1.clone();
    let cross = alg.pair(&alg.mul(&c1, &c1), &c1);

    let c1_square = {
        // c1^2 = alpha p + beta c1 + gamma with no shift.
        let pi = alg.labels.iter().position(|l| l == "p").unwrap();
        let span = Matrix::from_columns(&[alg.basis(pi), alg.c1.clone(), alg.unit.clone()]);
        let co = span.solve(&alg.mul(&c1, &c1)).ok_or_else(|| Error::Verification("c1^2 not in span(p, c1, 1)".into()))?;
        SquareIdentity {
            element: "c1".into(),
            shift: "0".into(),
            p_coeff: co[0].to_string(),
            c1_coeff: co[1].to_string(),
            constant: co[2].to_string(),
            values: [Scalar::zero(), co[0].clone(), co[1].clone(), co[2].clone()],
        }
    };
    let h_square = derive_square_identity(&alg, "h")?;
    let e_squares: Vec<SquareIdentity> = (1..=6).map(|i| derive_square_identity(&alg, &format!("e{i}"))).collect::<Result<_>>()?;

    // Apply a unital homomorphism with c1 -> w: CO(p) from the c1 identity,
    // then the squares of the shifted h and e_i.
    let w = Poly::var(0);
    let [_, a1, b1, g1] = &c1_square.values;
    let co_p = (&(&w.pow(2) - &w.scale(b1)) - &Poly::constant(g1.clone())).scale(&a1.inv());
    let image = |s: &SquareIdentity| -> Poly {
        let [_, a, b, g] = &s.values;
        &(&co_p.scale(a) + &w.scale(b)) + &Poly::constant(g.clone())
    };
    let h_disc = image(&h_square);
    let e_disc = image(&e_squares[0]);
    let e_uniform = e_squares.iter().all(|s| s.values == e_squares[0].values);
    let h_expected = v.parse("(w + 6)*(w + 60)/3")?;
    let e_expected = v.parse("-(w + 6)*(w - 30)/3")?;
    let discriminants_match = h_disc == h_expected && e_disc == e_expected && e_uniform;
    let vanish = at(&h_disc, -6).is_zero() && at(&e_disc, -6).is_zero();

    // Rank-2 quotient Q[theta]/(theta + 6)^2 where theta is the image of h.
    let quotient = monogenic_algebra("theta", &[Scalar::int(36), Scalar::int(12), Scalar::one()], vec![Scalar::int(-6), Scalar::zero()])?;

    Ok(LinesReport {
        line_count: count.render(&v),
        line_count_matches: count == expected,
        lines_at_minus_6: at(&count, -6).to_string(),
        table_cross_check: cross.to_string(),
        c1_square,
        h_square,
        e_squares,
        co_p: co_p.render(&v),
        h_discriminant: h_disc.render(&v),
        e_discriminant: e_disc.render(&v),
        discriminants_match,
        discriminants_vanish_at_minus_6: vanish,
        quotient: semisimplicity(&quotient),
    })
}

/// Table of multiplicities keyed by rendered eigenvalue.
pub fn multiplicity_map(spec: &Spectrum) -> HashMap<String, usize> {
    spec.eigenspaces.iter().map(|e| (e.value.render(), e.multiplicity)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplane_4_3_frobenius() {
        let alg = hyperplane_algebra(4, 3).unwrap();
        // q(P + 6) = (P + 6)^3 - 27 (P + 6)^2
        assert_eq!(shifted_q(4, 3, -6), vec![Scalar::int(-756), Scalar::int(-216), Scalar::int(-9), Scalar::one()]);
        assert!(verify_frobenius(&alg).passed());
    }

    #[test]
    fn literal_delta_pairing_is_not_invariant() {
        let mut alg = monogenic_algebra("P", &[Scalar::zero(), Scalar::zero(), Scalar::int(-27), Scalar::one()], vec![Scalar::zero(); 3]).unwrap();
        alg.pairing = Matrix::from_ints(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        let cert = verify_frobenius(&alg);
        assert!(!cert.frobenius);
        assert!(cert.failures.iter().any(|f| f.contains("(P, P^2, 1)") || f.contains("(P^2, P, 1)") || f.contains("Frobenius")));
    }

    #[test]
    fn trivial_algebra() {
        let alg = monogenic_algebra("x", &[Scalar::zero(), Scalar::one()], vec![Scalar::int(5)]).unwrap();
        assert!(verify_frobenius(&alg).passed());
        let s = c1_spectrum(&alg);
        assert_eq!(s.multiplicities(), vec![(Scalar::int(5), 1)]);
    }

    #[test]
    fn hyperplane_4_2_spectrum() {
        let alg = hyperplane_algebra(4, 2).unwrap();
        let s = c1_spectrum(&alg);
        let m = multiplicity_map(&s);
        assert_eq!(m.get("0"), Some(&1));
        assert_eq!(m.get("4"), Some(&1));
        assert_eq!(m.get("-4"), Some(&1));
        assert!(s.complete && s.idempotents_ok && s.orthogonal);
    }

    #[test]
    fn irrational_spectrum_requests_extension() {
        let s = c1_spectrum(&hyperplane_algebra(5, 3).unwrap());
        assert!(!s.complete);
        assert_eq!(s.describe_extension().unwrap(), "requires extension by minimal polynomial x^2 - 108");
    }

    #[test]
    fn diagonal_algebra_spectrum() {
        // Q x Q x Q with c1 = (1, 2, 3).
        let d = 3;
        let mut table = vec![vec![vec![Scalar::zero(); d]; d]; d];
        for i in 0..d {
            table[i][i][i] = Scalar::one();
        }
        let alg = FrobeniusAlgebra::new(vec!["f1".into(), "f2".into(), "f3".into()], table, Matrix::identity(3), vec![Scalar::one(); 3], vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)]).unwrap();
        assert!(verify_frobenius(&alg).passed());
        let s = c1_spectrum(&alg);
        assert_eq!(s.multiplicities(), vec![(Scalar::int(1), 1), (Scalar::int(2), 1), (Scalar::int(3), 1)]);
        assert!(semisimplicity(&alg).semisimple);
    }

    #[test]
    fn spectrum_matches_critical_values() {
        for (n, a) in [(4, 2), (4, 3), (5, 2), (5, 3), (5, 4)] {
            let m = spectrum_matching(n, a).unwrap();
            assert!(m.matches, "{m:?}");
        }
    }

    #[test]
    fn cubic_table_products() {
        let alg = cubic_surface();
        let e1 = alg.basis(3);
        let e2 = alg.basis(4);
        let a = alg.add(&alg.c1, &alg.constant(&Scalar::int(6)));
        let expected = alg.sub(&alg.sub(&alg.scale(&Scalar::int(3), &a), &alg.scale(&Scalar::int(2), &alg.add(&e1, &e2))), &alg.constant(&Scalar::int(4)));
        assert_eq!(alg.mul(&e1, &e2), expected);
    }

    #[test]
    fn cubic_suite() {
        let r = cubic_surface_suite();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn cubic_identities() {
        let alg = cubic_surface();
        assert!(check_square_identity(&alg, "h", 6, 1, 25, 156));
        assert!(!check_square_identity(&alg, "h", -6, 1, 25, 156));
        assert!(check_square_identity(&alg, "e1", 2, -1, 5, 24));
        assert!(!check_square_identity(&alg, "e1", 2, -1, 5, 20));
        let a = alg.add(&alg.c1, &alg.constant(&Scalar::int(6)));
        let literal = alg.sub(&alg.sub(&alg.scale(&Scalar::int(3), &alg.basis(3)), &a), &alg.constant(&Scalar::int(6)));
        assert!(!in_big_eigenspace(&alg, &literal));
    }

    #[test]
    fn lines() {
        let r = lines_and_semisimplicity().unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.line_count, "9*w + 81");
        assert_eq!((r.c1_square.p_coeff.as_str(), r.c1_square.c1_coeff.as_str(), r.c1_square.constant.as_str()), ("3", "9", "108"));
        assert_eq!(r.h_square.shift, "6");
        assert_eq!(r.e_squares[0].constant, "24");
    }

    #[test]
    fn semisimplicity_detector() {
        let toy = monogenic_algebra("x", &[Scalar::int(-1), Scalar::zero(), Scalar::one()], vec![Scalar::zero(), Scalar::one()]).unwrap();
        assert!(semisimplicity(&toy).semisimple);
        let cubic_quotient = monogenic_algebra("x", &[Scalar::int(36), Scalar::int(12), Scalar::one()], vec![Scalar::int(-6), Scalar::zero()]).unwrap();
        assert!(!semisimplicity(&cubic_quotient).semisimple);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_algebra("basis 1 x\nmul x x = x*x").is_err());
        assert!(parse_algebra("basis 1 x\n").is_err());
        assert!(parse_algebra("basis 1 x\nmul x x = 1\npair 1 x = 1\nc1 = x").unwrap().dim() == 2);
    }
}

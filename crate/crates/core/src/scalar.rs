//! Exact scalars: rationals and elements of flattened number fields.
//!
//! A [`NumberField`] is built from a root-of-unity order `m` and a positive
//! integer `c`. It contains a primitive `m`-th root of unity `z` and a root
//! `s` of `s^m = c`, and is stored as `Q[x]/(f)` for a single monic `f`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn small(x: &Q) -> Option<(i128, i128)> {
    Some((x.numer().to_i64()? as i128, x.denom().to_i64()? as i128))
}

fn from_i128(n: i128, d: i128) -> Q {
    let g = n.gcd(&d);
    let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
    Q::new_raw(BigInt::from(n), BigInt::from(d))
}

/// `x + y`, in machine integers when both fit.
pub fn qadd(x: &Q, y: &Q) -> Q {
    match (small(x), small(y)) {
        (Some((a, b)), Some((c, d))) => from_i128(a * d + c * b, b * d),
        _ => x + y,
    }
}

pub fn qsub(x: &Q, y: &Q) -> Q {
    match (small(x), small(y)) {
        (Some((a, b)), Some((c, d))) => from_i128(a * d - c * b, b * d),
        _ => x - y,
    }
}

pub fn qmul(x: &Q, y: &Q) -> Q {
    match (small(x), small(y)) {
        (Some((a, b)), Some((c, d))) => from_i128(a * c, b * d),
        _ => x * y,
    }
}

/// Dense univariate polynomial over Q, low degree first, no trailing zeros.
type UPoly = Vec<Q>;

fn utrim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn umul(a: &[Q], b: &[Q]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    utrim(&mut out);
    out
}

fn usub(a: &[Q], b: &[Q]) -> UPoly {
    let mut out = vec![Q::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    utrim(&mut out);
    out
}

/// Quotient and remainder of `a` by nonzero `b`.
fn udivrem(a: &[Q], b: &[Q]) -> (UPoly, UPoly) {
    let mut r: UPoly = a.to_vec();
    utrim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![Q::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lb;
        for (i, y) in b.iter().enumerate() {
            r[k + i] -= &c * y;
        }
        quo[k] = c;
        utrim(&mut r);
    }
    utrim(&mut quo);
    (quo, r)
}

/// The m-th cyclotomic polynomial.
pub fn cyclotomic(m: u32) -> Vec<Q> {
    let mut num: UPoly = vec![Q::zero(); m as usize + 1];
    num[0] = q(-1);
    num[m as usize] = q(1);
    for d in 1..m {
        if m.is_multiple_of(d) {
            let (quo, rem) = udivrem(&num, &cyclotomic(d));
            debug_assert!(rem.is_empty());
            num = quo;
        }
    }
    num
}

pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

fn legendre(x: i64, p: i64) -> i64 {
    let mut r = 1i64;
    let e = (p - 1) / 2;
    let mut base = x.rem_euclid(p);
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    if r == p - 1 {
        -1
    } else {
        r
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Integer k-th root of `c` when exact.
fn exact_root(c: &BigInt, k: u32) -> Option<BigInt> {
    let r = c.nth_root(k);
    for cand in [r.clone() - 1, r.clone(), r + 1] {
        if cand.sign() != num_bigint::Sign::Minus && num_traits::pow(cand.clone(), k as usize) == *c {
            return Some(cand);
        }
    }
    None
}

/// Exact number field `Q(z, s)` with `z` a primitive m-th root of unity and `s^m = c`.
pub struct NumberField {
    id: u64,
    pub root_order: u32,
    pub radicand: BigInt,
    /// Monic defining polynomial, low degree first, length `degree + 1`.
    modulus: Vec<Q>,
    degree: usize,
    /// Reductions of x^(degree+k) for k in 0..degree-1.
    high_powers: Vec<Vec<Q>>,
    /// Flat coordinates of z and s.
    z_flat: Vec<Q>,
    s_flat: Vec<Q>,
    /// Degrees of the tower Q(z) and of s over Q(z).
    phi: usize,
    s_degree: usize,
    /// Flat coordinates -> tower coordinates (index i + phi*j for z^i s^j).
    to_tower: Vec<Vec<Q>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField(z^{} = 1, s^{} = {}, degree {})", self.root_order, self.root_order, self.radicand, self.degree)
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, BigInt), Arc<NumberField>>> {
    static REG: OnceLock<Mutex<HashMap<(u32, BigInt), Arc<NumberField>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Arithmetic in the tower `Q(z)[s]/(s^d - e)` used only during construction.
struct Tower {
    phi: usize,
    d: usize,
    cyc: Vec<Q>,
    e: Vec<Q>,
}

impl Tower {
    fn reduce_z(&self, p: &[Q]) -> Vec<Q> {
        let (_, r) = udivrem(p, &self.cyc);
        let mut r = r;
        r.resize(self.phi, Q::zero());
        r
    }

    fn zmul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        self.reduce_z(&umul(&trimmed(a), &trimmed(b)))
    }

    fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let (phi, d) = (self.phi, self.d);
        let mut acc: Vec<Vec<Q>> = vec![vec![Q::zero(); phi]; 2 * d];
        for i in 0..d {
            let ai = &a[i * phi..(i + 1) * phi];
            if ai.iter().all(|c| c.is_zero()) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * phi..(j + 1) * phi];
                if bj.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let p = self.zmul(ai, bj);
                for (k, c) in p.into_iter().enumerate() {
                    acc[i + j][k] += c;
                }
            }
        }
        for k in (d..2 * d).rev() {
            if acc[k].iter().all(|c| c.is_zero()) {
                continue;
            }
            let t = self.zmul(&acc[k], &self.e);
            for (i, c) in t.into_iter().enumerate() {
                acc[k - d][i] += c;
            }
        }
        acc.into_iter().take(d).flatten().collect()
    }

    fn z_power(&self, k: u32) -> Vec<Q> {
        let mut p = vec![Q::zero(); k as usize + 1];
        p[k as usize] = q(1);
        self.reduce_z(&p)
    }
}

fn trimmed(a: &[Q]) -> Vec<Q> {
    let mut v = a.to_vec();
    utrim(&mut v);
    v
}

/// Solve the square system `m x = b` over Q (columns of m given), panics if singular.
fn solve_columns(cols: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = cols.len();
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            let mut row: Vec<Q> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

fn rank_of(cols: &[Vec<Q>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let nrows = cols[0].len();
    let mut a: Vec<Vec<Q>> = (0..nrows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let ncols = cols.len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = a[rank][col].recip();
        for r in rank + 1..nrows {
            if !a[r][col].is_zero() {
                let f = &a[r][col] * &inv;
                let pivot_row = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl NumberField {
    /// Field containing a primitive m-th root of unity and an m-th root of `c > 0`.
    pub fn get(m: u32, c: &BigInt) -> Arc<NumberField> {
        assert!(m >= 1 && c.is_positive());
        let key = (m, c.clone());
        let mut reg = registry().lock().unwrap();
        if let Some(f) = reg.get(&key) {
            return f.clone();
        }
        let id = reg.len() as u64 + 1;
        let f = Arc::new(Self::build(id, m, c));
        reg.insert(key, f.clone());
        f
    }

    pub fn cyclotomic(m: u32) -> Arc<NumberField> {
        Self::get(m, &BigInt::one())
    }

    fn build(id: u64, m: u32, c: &BigInt) -> NumberField {
        let cyc = cyclotomic(m);
        let phi = cyc.len() - 1;
        // s^m = c; write c = b^g with g | m maximal, so s^(m/g) = b.
        let mut g = 1;
        let mut b = c.clone();
        for k in (1..=m).rev() {
            if m.is_multiple_of(k) {
                if let Some(r) = exact_root(c, k) {
                    g = k;
                    b = r;
                    break;
                }
            }
        }
        let mprime = (m / g) as usize;
        let tower0 = Tower { phi, d: 1, cyc: cyc.clone(), e: vec![Q::zero(); phi] };
        let mut d = mprime;
        let mut e: Vec<Q> = {
            let mut v = vec![Q::zero(); phi];
            v[0] = Q::from_integer(b.clone());
            v
        };
        if mprime.is_multiple_of(2) {
            if let Some(root) = Self::sqrt_in_cyclotomic(&tower0, m, &b) {
                d = mprime / 2;
                e = root;
            }
        }
        let tower = Tower { phi, d, cyc, e };
        let dim = phi * d;
        let unit = |idx: usize| {
            let mut v = vec![Q::zero(); dim];
            v[idx] = q(1);
            v
        };
        let z_t = if phi > 1 { unit(1) } else { tower.z_power(1).into_iter().chain(std::iter::repeat(Q::zero())).take(dim).collect() };
        let s_t: Vec<Q> = if d > 1 {
            unit(phi)
        } else {
            // s lies in Q(z): s = e when d = 1.
            tower.e.iter().cloned().chain(std::iter::repeat(Q::zero())).take(dim).collect()
        };
        // Primitive element gamma = s + k z.
        let mut k = 0i64;
        loop {
            let gamma: Vec<Q> = if d == 1 {
                z_t.clone()
            } else if phi == 1 {
                s_t.clone()
            } else {
                s_t.iter().zip(z_t.iter()).map(|(a, zz)| a + zz * q(k)).collect()
            };
            let mut powers = vec![unit(0)];
            for _ in 0..dim {
                let next = tower.mul(powers.last().unwrap(), &gamma);
                powers.push(next);
            }
            let basis = &powers[..dim];
            if rank_of(basis) == dim {
                let coef = solve_columns(basis, &powers[dim]).unwrap();
                let mut modulus: Vec<Q> = coef.iter().map(|x| -x.clone()).collect();
                modulus.push(q(1));
                let z_flat = solve_columns(basis, &z_t).unwrap();
                let s_flat = solve_columns(basis, &s_t).unwrap();
                let to_tower: Vec<Vec<Q>> = basis.to_vec();
                let mut nf = NumberField {
                    id,
                    root_order: m,
                    radicand: c.clone(),
                    modulus,
                    degree: dim,
                    high_powers: Vec::new(),
                    z_flat,
                    s_flat,
                    phi,
                    s_degree: d,
                    to_tower,
                };
                nf.high_powers = nf.compute_high_powers();
                return nf;
            }
            k += 1;
        }
    }

    /// Square root of the positive integer `b` inside Q(z_m), when it lies there.
    fn sqrt_in_cyclotomic(t: &Tower, m: u32, b: &BigInt) -> Option<Vec<Q>> {
        let bu = b.to_u64()?;
        let mut square = 1u64;
        let mut free = 1u64;
        let mut counts: Vec<(u64, u32)> = Vec::new();
        for p in prime_factors(bu) {
            match counts.last_mut() {
                Some((q0, e)) if *q0 == p => *e += 1,
                _ => counts.push((p, 1)),
            }
        }
        for &(p, e) in &counts {
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                free *= p;
            }
        }
        let conductor = if free % 4 == 1 { free } else { 4 * free };
        if !(m as u64).is_multiple_of(conductor) {
            return None;
        }
        let phi = t.phi;
        let mut acc = {
            let mut v = vec![Q::zero(); phi];
            v[0] = q(square as i64);
            v
        };
        let mut threes = 0;
        for p in prime_factors(free) {
            let root = if p == 2 {
                let z8 = t.z_power(m / 8);
                let z8inv = t.z_power(m - m / 8);
                z8.iter().zip(z8inv.iter()).map(|(a, b)| a + b).collect::<Vec<_>>()
            } else {
                let p64 = p as i64;
                let mut gauss = vec![Q::zero(); phi];
                for x in 1..p64 {
                    let zp = t.z_power((m as u64 / p * x as u64) as u32 % m);
                    let l = q(legendre(x, p64));
                    for (g, z) in gauss.iter_mut().zip(zp.iter()) {
                        *g += &l * z;
                    }
                }
                if p % 4 == 3 {
                    threes += 1;
                }
                gauss
            };
            acc = t.zmul(&acc, &root);
        }
        // Gauss sums for p = 3 mod 4 equal i*sqrt(p).
        if threes % 2 == 1 {
            let minus_i = t.z_power(3 * m / 4);
            acc = t.zmul(&acc, &minus_i);
        }
        if threes % 4 >= 2 {
            acc = acc.into_iter().map(|x| -x).collect();
        }
        let check = t.zmul(&acc, &acc);
        debug_assert!(check[0] == Q::from_integer(b.clone()) && check[1..].iter().all(|x| x.is_zero()));
        Some(acc)
    }

    fn compute_high_powers(&self) -> Vec<Vec<Q>> {
        let d = self.degree;
        let mut out = Vec::with_capacity(d);
        // x^d = -sum modulus[i] x^i
        let mut cur: Vec<Q> = self.modulus[..d].iter().map(|x| -x.clone()).collect();
        for _ in 0..d {
            out.push(cur.clone());
            // multiply by x
            let top = cur[d - 1].clone();
            let mut next = vec![Q::zero(); d];
            for i in (1..d).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..d {
                    next[i] -= &top * &self.modulus[i];
                }
            }
            cur = next;
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Degree of `s` over `Q(z)`.
    pub fn radical_degree(&self) -> usize {
        self.s_degree
    }

    pub fn modulus(&self) -> &[Q] {
        &self.modulus
    }

    fn mul_flat(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let d = self.degree;
        let mut prod = vec![Q::zero(); 2 * d];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = qadd(&prod[i + j], &qmul(x, y));
                }
            }
        }
        let mut out: Vec<Q> = prod[..d].to_vec();
        for k in d..2 * d - 1 {
            if prod[k].is_zero() {
                continue;
            }
            for (o, h) in out.iter_mut().zip(self.high_powers[k - d].iter()) {
                *o = qadd(o, &qmul(&prod[k], h));
            }
        }
        out
    }

    fn inv_flat(&self, a: &[Q]) -> Vec<Q> {
        // Extended Euclid on (modulus, a).
        let mut r0: UPoly = self.modulus.clone();
        let mut r1: UPoly = trimmed(a);
        let mut s0: UPoly = Vec::new();
        let mut s1: UPoly = vec![q(1)];
        while !r1.is_empty() {
            let (quo, rem) = udivrem(&r0, &r1);
            let s2 = usub(&s0, &umul(&quo, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        assert!(r0.len() == 1, "element is not invertible");
        let c = r0[0].recip();
        let mut out: Vec<Q> = s0.into_iter().map(|x| x * &c).collect();
        let (_, rem) = udivrem(&out, &self.modulus);
        out = rem;
        out.resize(self.degree, Q::zero());
        out
    }

    pub fn z(self: &Arc<Self>) -> Scalar {
        Scalar::from_flat(self, self.z_flat.clone())
    }

    pub fn s(self: &Arc<Self>) -> Scalar {
        Scalar::from_flat(self, self.s_flat.clone())
    }

    /// Square root of a rational inside this field, built from Gauss sums in
    /// `Q(z)`; `None` when the conductor does not divide the root order.
    pub fn sqrt_rational(self: &Arc<Self>, x: &Q) -> Option<Scalar> {
        if x.is_zero() {
            return Some(Scalar::zero());
        }
        let m = self.root_order;
        let z = self.z();
        let zp = |k: u64| z.pow(k % m as u64);
        // sqrt(n/d) = sqrt(n d) / d
        let nd = (x.numer() * x.denom()).abs();
        let bu = nd.to_u64()?;
        let mut root = Scalar::Q(Q::new(BigInt::one(), x.denom().clone()));
        let mut counts: Vec<(u64, u32)> = Vec::new();
        for p in prime_factors(bu) {
            match counts.last_mut() {
                Some((q0, e)) if *q0 == p => *e += 1,
                _ => counts.push((p, 1)),
            }
        }
        for (p, e) in counts {
            root = &root * &Scalar::int(p.pow(e / 2) as i64);
            if e % 2 == 0 {
                continue;
            }
            let r = if p == 2 {
                if !m.is_multiple_of(8) {
                    return None;
                }
                &zp(m as u64 / 8) + &zp(7 * m as u64 / 8)
            } else {
                let conductor = if p % 4 == 1 { p } else { 4 * p };
                if !(m as u64).is_multiple_of(conductor) {
                    return None;
                }
                let mut g = Scalar::zero();
                for k in 1..p {
                    g += &(&Scalar::int(legendre(k as i64, p as i64)) * &zp(m as u64 / p * k));
                }
                if p % 4 == 3 {
                    // g = i sqrt(p)
                    g = &g * &zp(3 * m as u64 / 4);
                }
                g
            };
            root = &root * &r;
        }
        if x.is_negative() {
            if !m.is_multiple_of(4) {
                return None;
            }
            root = &root * &zp(m as u64 / 4);
        }
        (&root * &root == Scalar::Q(x.clone())).then_some(root)
    }

    /// Tower coordinates: entry `i + phi*j` is the coefficient of `z^i s^j`.
    fn tower_coords(&self, flat: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.degree];
        for (k, x) in flat.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(self.to_tower[k].iter()) {
                *o += x * t;
            }
        }
        out
    }
}

/// Element of a number field in flat coordinates; never purely rational.
#[derive(Clone)]
pub struct Nf {
    field: Arc<NumberField>,
    c: Vec<Q>,
}

/// Exact scalar. Rational values always use the `Q` variant.
#[derive(Clone)]
pub enum Scalar {
    Q(Q),
    K(Nf),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Q(Q::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Q(Q::one())
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Q(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Scalar {
        Scalar::Q(qf(n, d))
    }

    fn from_flat(field: &Arc<NumberField>, c: Vec<Q>) -> Scalar {
        if c[1..].iter().all(|x| x.is_zero()) {
            Scalar::Q(c[0].clone())
        } else {
            Scalar::K(Nf { field: field.clone(), c })
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Q(x) if x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Q(x) if x.is_one())
    }

    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            Scalar::Q(x) => Some(x),
            Scalar::K(_) => None,
        }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        match self {
            Scalar::Q(_) => None,
            Scalar::K(k) => Some(&k.field),
        }
    }

    fn flat(&self, f: &NumberField) -> Vec<Q> {
        match self {
            Scalar::Q(x) => {
                let mut v = vec![Q::zero(); f.degree];
                v[0] = x.clone();
                v
            }
            Scalar::K(k) => {
                assert_eq!(k.field.id, f.id, "mixing scalars from different number fields");
                k.c.clone()
            }
        }
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Q(x) => {
                assert!(!x.is_zero(), "division by zero");
                Scalar::Q(x.recip())
            }
            Scalar::K(k) => Scalar::from_flat(&k.field, k.field.inv_flat(&k.c)),
        }
    }

    pub fn pow(&self, e: u64) -> Scalar {
        let mut result = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    pub fn powi(&self, e: i64) -> Scalar {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().pow((-e) as u64)
        }
    }

    /// Smallest k >= 1 with self^k = 1, searched up to `bound`.
    pub fn multiplicative_order(&self, bound: u64) -> Option<u64> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_one() {
                return Some(k);
            }
            p = &p * self;
        }
        None
    }

    /// Textual form; field elements are written in `z` and `s`.
    pub fn render(&self) -> String {
        match self {
            Scalar::Q(x) => x.to_string(),
            Scalar::K(k) => {
                let f = &k.field;
                let tc = f.tower_coords(&k.c);
                let mut terms = Vec::new();
                for (idx, c) in tc.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let i = idx % f.phi;
                    let j = idx / f.phi;
                    let mut mono = Vec::new();
                    if i > 0 {
                        mono.push(if i == 1 { "z".to_string() } else { format!("z^{i}") });
                    }
                    if j > 0 {
                        mono.push(if j == 1 { "s".to_string() } else { format!("s^{j}") });
                    }
                    terms.push((c.clone(), mono.join("*")));
                }
                render_terms(&terms)
            }
        }
    }
}

/// Render `sum c_i * m_i` with conventional signs.
pub(crate) fn render_terms(terms: &[(Q, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, m)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(m);
        } else {
            out.push_str(&format!("{a}*{m}"));
        }
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.render();
        if matches!(self, Scalar::K(_)) {
            write!(f, "({s})")
        } else {
            write!(f, "{s}")
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a == b,
            (Scalar::K(a), Scalar::K(b)) => a.field.id == b.field.id && a.c == b.c,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Q(a) => {
                0u8.hash(state);
                a.hash(state);
            }
            Scalar::K(k) => {
                1u8.hash(state);
                k.field.id.hash(state);
                k.c.hash(state);
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Q> for Scalar {
    fn from(x: Q) -> Self {
        Scalar::Q(x)
    }
}

fn binop(a: &Scalar, b: &Scalar, op: fn(&Q, &Q) -> Q, flat: fn(&NumberField, &[Q], &[Q]) -> Vec<Q>) -> Scalar {
    match (a, b) {
        (Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(op(x, y)),
        _ => {
            let f = a.field().or(b.field()).unwrap().clone();
            let c = flat(&f, &a.flat(&f), &b.flat(&f));
            Scalar::from_flat(&f, c)
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, qadd, |_, a, b| a.iter().zip(b).map(|(x, y)| qadd(x, y)).collect())
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, qsub, |_, a, b| a.iter().zip(b).map(|(x, y)| qsub(x, y)).collect())
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(x), Scalar::K(k)) | (Scalar::K(k), Scalar::Q(x)) => {
                if x.is_zero() {
                    return Scalar::zero();
                }
                Scalar::K(Nf { field: k.field.clone(), c: k.c.iter().map(|c| qmul(c, x)).collect() })
            }
            _ => binop(self, rhs, qmul, |f, a, b| f.mul_flat(a, b)),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(x) => Scalar::Q(-x),
            Scalar::K(k) => Scalar::K(Nf { field: k.field.clone(), c: k.c.iter().map(|c| -c).collect() }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Q(a), Scalar::Q(b)) = (&mut *self, rhs) {
            *a = qadd(a, b);
            return;
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Q(a), Scalar::Q(b)) = (&mut *self, rhs) {
            *a = qsub(a, b);
            return;
        }
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), vec![q(-1), q(1)]);
        assert_eq!(cyclotomic(3), vec![q(1), q(1), q(1)]);
        assert_eq!(cyclotomic(4), vec![q(1), q(0), q(1)]);
        assert_eq!(cyclotomic(12).len(), 5);
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn cube_roots_of_unity() {
        let f = NumberField::cyclotomic(3);
        let z = f.z();
        assert_eq!(f.degree(), 2);
        assert!(z.pow(3).is_one());
        assert!(!z.is_one());
        let sum = &(&Scalar::one() + &z) + &z.pow(2);
        assert!(sum.is_zero());
        assert_eq!((&z * &z.inv()), Scalar::one());
    }

    #[test]
    fn radical_degrees() {
        // s^4 = 4 over Q(i): s = sqrt 2 is not in Q(i).
        let f = NumberField::get(4, &BigInt::from(4));
        assert_eq!(f.degree(), 4);
        let s = f.s();
        assert_eq!(s.pow(2), Scalar::int(2));
        // s^3 = 27 gives s = 3.
        let f = NumberField::get(3, &BigInt::from(27));
        assert_eq!(f.degree(), 2);
        assert_eq!(f.s(), Scalar::int(3));
        // s^6 = 27: s^2 = 3 and sqrt 3 is not in Q(z_6).
        let f = NumberField::get(6, &BigInt::from(27));
        assert_eq!(f.degree(), 4);
        assert_eq!(f.s().pow(2), Scalar::int(3));
        // s^8 = 16 over Q(z_8): s = sqrt 2 up to sign already lies in Q(z_8).
        let f = NumberField::get(8, &BigInt::from(16));
        assert_eq!(f.degree(), 4);
        assert_eq!(f.s().pow(8), Scalar::int(16));
        // s^6 = 4: cube root of 2.
        let f = NumberField::get(6, &BigInt::from(4));
        assert_eq!(f.degree(), 6);
        assert_eq!(f.s().pow(3), Scalar::int(2));
    }

    #[test]
    fn sqrt_via_gauss_sums() {
        // s^12 = 3^6 makes s a square root of 3, which lies in Q(z_12).
        let f = NumberField::get(12, &BigInt::from(729));
        assert_eq!(f.degree(), 4);
        assert_eq!(f.s().pow(12), Scalar::int(729));
        let f = NumberField::get(5, &BigInt::from(3125));
        assert_eq!(f.s(), Scalar::int(5));
    }

    #[test]
    fn inverse_and_render() {
        let f = NumberField::get(4, &BigInt::from(4));
        let x = &f.s() + &f.z();
        let y = x.inv();
        assert!((&x * &y).is_one());
        assert_eq!(f.z().render(), "z");
        assert_eq!((&f.s() * &Scalar::int(2)).render(), "2*s");
    }
}

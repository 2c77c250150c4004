//! Sparse multivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{render_terms, NumberField, Scalar, Q};

pub const MAX_VARS: usize = 16;

/// Exponent vector; unused trailing slots are zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(pub [u16; MAX_VARS]);

impl Mono {
    pub fn one() -> Mono {
        Mono([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Mono {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, e: u16) -> Mono {
        let mut m = Mono::one();
        m.0[i] = e;
        m
    }

    pub fn from_exps(e: &[u16]) -> Mono {
        let mut m = Mono::one();
        m.0[..e.len()].copy_from_slice(e);
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut m = *self;
        for (a, b) in m.0.iter_mut().zip(o.0.iter()) {
            *a += *b;
        }
        m
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming divisibility.
    pub fn quotient_of(&self, o: &Mono) -> Mono {
        let mut m = *o;
        for (a, b) in m.0.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        m
    }

    pub fn lcm(&self, o: &Mono) -> Mono {
        let mut m = *self;
        for (a, b) in m.0.iter_mut().zip(o.0.iter()) {
            *a = (*a).max(*b);
        }
        m
    }

    pub fn coprime(&self, o: &Mono) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.0[i] as u32).sum()
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

/// Sparse polynomial; never stores zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Poly {
        Poly::term(c, Mono::one())
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(Scalar::int(n))
    }

    pub fn var(i: usize) -> Poly {
        Poly::term(Scalar::one(), Mono::var(i))
    }

    pub fn term(c: Scalar, m: Mono) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(*m, &(x * c));
        }
    }

    /// Adds `c * mono * other`.
    pub fn add_scaled_shifted(&mut self, other: &Poly, c: &Scalar, mono: &Mono) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.mul(mono), &(x * c));
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Mono::one()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff(&self, m: &Mono) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative.
    pub fn diff(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.0[var] -= 1;
            out.add_term(m2, &(c * &Scalar::int(e as i64)));
        }
        out
    }

    /// Substitute scalars for some variables.
    pub fn eval_partial(&self, values: &[(usize, Scalar)]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut m2 = *m;
            for (v, x) in values {
                let e = m2.0[*v];
                if e > 0 {
                    coeff = &coeff * &x.pow(e as u64);
                    m2.0[*v] = 0;
                }
            }
            out.add_term(m2, &coeff);
        }
        out
    }

    /// Evaluate at a full point; variables beyond `point.len()` must not occur.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &point[i].pow(e as u64);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Substitute polynomials for variables (all variables listed in `images`).
    pub fn compose(&self, images: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e as u32);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Keep terms whose degree in `vars` is at most `max`.
    pub fn truncate(&self, vars: &[usize], max: u32) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.degree_in(vars) <= max).map(|(m, c)| (*m, c.clone())).collect() }
    }

    /// Part of the polynomial with degree exactly `d` in `vars`.
    pub fn homogeneous_part(&self, vars: &[usize], d: u32) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.degree_in(vars) == d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn render(&self, vars: &Vars) -> String {
        let mut terms = Vec::new();
        let mut field_terms = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mono = vars.render_mono(m);
            match c.as_rational() {
                Some(x) => terms.push((x.clone(), mono)),
                None => field_terms.push(if mono.is_empty() { c.to_string() } else { format!("{c}*{mono}") }),
            }
        }
        let mut s = if terms.is_empty() && !field_terms.is_empty() { String::new() } else { render_terms(&terms) };
        for ft in field_terms {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            s.push_str(&ft);
        }
        s
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..MAX_VARS).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&Vars::new(names)))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

macro_rules! owned_poly_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_poly_ops!(Add, add);
owned_poly_ops!(Sub, sub);
owned_poly_ops!(Mul, mul);

/// Variable names plus an optional coefficient field for parsing `z` and `s`.
#[derive(Clone, Debug)]
pub struct Vars {
    pub names: Vec<String>,
    pub field: Option<Arc<NumberField>>,
}

impl Vars {
    pub fn new(names: Vec<String>) -> Vars {
        assert!(names.len() <= MAX_VARS);
        Vars { names, field: None }
    }

    /// Variables `r1..rn, u1..un` (indices 0..n are r, n..2n are u).
    pub fn ru(n: usize) -> Vars {
        let mut names: Vec<String> = (1..=n).map(|i| format!("r{i}")).collect();
        names.extend((1..=n).map(|i| format!("u{i}")));
        Vars::new(names)
    }

    pub fn u(n: usize) -> Vars {
        Vars::new((1..=n).map(|i| format!("u{i}")).collect())
    }

    pub fn with_field(mut self, f: Arc<NumberField>) -> Vars {
        self.field = Some(f);
        self
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn render_mono(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = self.names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        parts.join("*")
    }

    /// Parse a polynomial such as `-u1*u2*u3*u4 + 3/2*r1*u1^3`.
    pub fn parse(&self, text: &str) -> Result<Poly> {
        Parser { vars: self, s: text.as_bytes(), pos: 0 }.parse()
    }
}

struct Parser<'a> {
    vars: &'a Vars,
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Poly> {
        let mut out = Poly::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if !first => break,
                None => return Err(self.err("empty polynomial")),
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(_) => return Err(self.err("expected + or -")),
            };
            first = false;
            let t = self.term()?;
            out = &out + &t.scale(&Scalar::int(sign));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.number()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    acc = acc.scale(&Scalar::Q(Q::new(BigInt::one(), d)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse::<BigInt>().map_err(|_| self.err("bad number"))
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.number()?;
            e.try_into().map_err(|_| self.err("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                let mut x = Q::from_integer(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.number()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    x /= Q::from_integer(d);
                }
                let e = self.exponent()?;
                Ok(Poly::constant(Scalar::Q(num_traits::pow(x, e as usize))))
            }
            Some(b'(') => {
                self.pos += 1;
                let start = self.pos;
                let mut depth = 1;
                while self.pos < self.s.len() && depth > 0 {
                    match self.s[self.pos] {
                        b'(' => depth += 1,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    self.pos += 1;
                }
                if depth != 0 {
                    return Err(self.err("unbalanced parenthesis"));
                }
                let inner = std::str::from_utf8(&self.s[start..self.pos - 1]).unwrap();
                let p = self.vars.parse(inner)?;
                let e = self.exponent()?;
                Ok(p.pow(e))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
                let e = self.exponent()?;
                if let Some(i) = self.vars.index(&name) {
                    return Ok(Poly::term(Scalar::one(), Mono::var_pow(i, e as u16)));
                }
                match (name.as_str(), &self.vars.field) {
                    ("z", Some(f)) => Ok(Poly::constant(f.z().pow(e as u64))),
                    ("s", Some(f)) => Ok(Poly::constant(f.s().pow(e as u64))),
                    _ => Err(Error::Parse(format!("unknown variable `{name}`"))),
                }
            }
            _ => Err(self.err("expected a factor")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let v = Vars::ru(4);
        let p = v.parse("-u1*u2*u3*u4 + r1*u1^3").unwrap();
        assert_eq!(p.len(), 2);
        let again = v.parse(&p.render(&v)).unwrap();
        assert_eq!(p, again);
        let q = v.parse("3/2*r2 - (u1 + u2)^2").unwrap();
        assert_eq!(q.len(), 4);
    }

    #[test]
    fn arithmetic_and_derivatives() {
        let v = Vars::u(2);
        let p = v.parse("u1^2*u2 + 3*u2").unwrap();
        assert_eq!(p.diff(0), v.parse("2*u1*u2").unwrap());
        assert_eq!(p.diff(1), v.parse("u1^2 + 3").unwrap());
        let sq = &p * &p;
        assert_eq!(sq.eval(&[Scalar::int(1), Scalar::int(2)]), Scalar::int(64));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn field_scalars_parse() {
        let f = NumberField::cyclotomic(3);
        let v = Vars::u(1).with_field(f);
        let p = v.parse("z^3*u1 - u1").unwrap();
        assert!(p.is_zero());
        let p = v.parse("1 + z + z^2").unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn parse_errors() {
        let v = Vars::u(2);
        assert!(v.parse("u3").is_err());
        assert!(v.parse("").is_err());
        assert!(v.parse("1/0").is_err());
    }
}

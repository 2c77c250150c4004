//! Finite A-infinity algebras with sparse structure tables.
//!
//! Inputs of `mu^s` are written `a_s, ..., a_1`: position 0 of a key is the
//! leftmost input. Signs use reduced degrees `sigma' = sigma + 1`, so the
//! A-infinity relation reads `mu o mu = 0` with the Gerstenhaber product of
//! [`hochschild::gerstenhaber`].

pub mod gauge;
pub mod group;
pub mod hochschild;
pub mod wbc;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, Vars};
use crate::scalar::Scalar;

/// Element of a free module: one coefficient per basis vector.
pub type Elem = Vec<Poly>;

pub fn zero_elem(dim: usize) -> Elem {
    vec![Poly::zero(); dim]
}

pub fn basis_elem(dim: usize, b: usize) -> Elem {
    let mut x = zero_elem(dim);
    x[b] = Poly::one();
    x
}

pub fn elem_is_zero(x: &[Poly]) -> bool {
    x.iter().all(Poly::is_zero)
}

/// `acc += c * x`.
pub fn elem_add_scaled(acc: &mut [Poly], x: &[Poly], c: &Poly) {
    for (a, y) in acc.iter_mut().zip(x) {
        if !y.is_zero() {
            *a = &*a + &(y * c);
        }
    }
}

pub fn elem_sub(x: &[Poly], y: &[Poly]) -> Elem {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub(crate) fn sign(odd: bool) -> Scalar {
    if odd {
        Scalar::int(-1)
    } else {
        Scalar::one()
    }
}

/// Truncation of the coefficient ring at r-degree `rho`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub r_vars: Vec<usize>,
    pub rho: Option<u32>,
}

impl Truncation {
    pub fn none() -> Truncation {
        Truncation::default()
    }

    pub fn r_degree(r_vars: Vec<usize>, rho: u32) -> Truncation {
        Truncation { r_vars, rho: Some(rho) }
    }

    pub fn apply(&self, p: Poly) -> Poly {
        match self.rho {
            Some(rho) => p.truncate(&self.r_vars, rho),
            None => p,
        }
    }

    pub fn apply_elem(&self, x: Elem) -> Elem {
        if self.rho.is_none() {
            return x;
        }
        x.into_iter().map(|p| self.apply(p)).collect()
    }
}

/// Sparse multilinear map from basis tuples to elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cochain {
    pub terms: BTreeMap<Vec<usize>, BTreeMap<usize, Poly>>,
}

impl Cochain {
    pub fn new() -> Cochain {
        Cochain::default()
    }

    pub fn add_term(&mut self, key: &[usize], out: usize, c: &Poly) {
        if c.is_zero() {
            return;
        }
        let outs = self.terms.entry(key.to_vec()).or_default();
        let slot = outs.entry(out).or_default();
        *slot = &*slot + c;
        if slot.is_zero() {
            outs.remove(&out);
            if outs.is_empty() {
                self.terms.remove(key);
            }
        }
    }

    pub fn add_elem(&mut self, key: &[usize], x: &[Poly]) {
        for (b, c) in x.iter().enumerate() {
            self.add_term(key, b, c);
        }
    }

    pub fn add(&mut self, other: &Cochain, c: &Scalar) {
        for (k, outs) in &other.terms {
            for (o, p) in outs {
                self.add_term(k, *o, &p.scale(c));
            }
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Cochain {
        let mut out = Cochain::new();
        out.add(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero (tuple, output) entries.
    pub fn nnz(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn get(&self, key: &[usize], out: usize) -> Poly {
        self.terms.get(key).and_then(|o| o.get(&out)).cloned().unwrap_or_default()
    }

    pub fn filter(&self, keep: impl Fn(&[usize], usize, &Poly) -> bool) -> Cochain {
        let mut out = Cochain::new();
        for (k, outs) in &self.terms {
            for (o, p) in outs {
                if keep(k, *o, p) {
                    out.add_term(k, *o, p);
                }
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Cochain {
        let mut out = Cochain::new();
        for (k, outs) in &self.terms {
            for (o, p) in outs {
                out.add_term(k, *o, &f(p));
            }
        }
        out
    }

    pub fn arity_part(&self, s: usize) -> Cochain {
        self.filter(|k, _, _| k.len() == s)
    }

    pub fn arity_part_at_most(&self, s: usize) -> Cochain {
        self.filter(|k, _, _| k.len() <= s)
    }

    pub fn truncate(&self, t: &Truncation) -> Cochain {
        if t.rho.is_none() {
            return self.clone();
        }
        self.map_coeffs(|p| t.apply(p.clone()))
    }

    /// `sigma(out) + sum sigma'(in)` mod 2.
    pub fn term_parity(key: &[usize], out: usize, parity: &[u8]) -> u8 {
        (parity[out] as usize + key.iter().map(|&b| parity[b] as usize + 1).sum::<usize>()) as u8 % 2
    }

    /// Even and odd parts with respect to the cochain parity.
    pub fn parity_parts(&self, parity: &[u8]) -> [Cochain; 2] {
        [
            self.filter(|k, o, _| Cochain::term_parity(k, o, parity) == 0),
            self.filter(|k, o, _| Cochain::term_parity(k, o, parity) == 1),
        ]
    }

    /// Entries grouped by output basis vector.
    pub fn by_output(&self) -> HashMap<usize, Vec<(&Vec<usize>, &Poly)>> {
        let mut m: HashMap<usize, Vec<(&Vec<usize>, &Poly)>> = HashMap::new();
        for (k, outs) in &self.terms {
            for (o, p) in outs {
                m.entry(*o).or_default().push((k, p));
            }
        }
        m
    }

    /// Multilinear evaluation on the entries of arity `inputs.len()`.
    pub fn eval(&self, inputs: &[&Elem], dim: usize) -> Elem {
        let s = inputs.len();
        let mut out = zero_elem(dim);
        let supports: Vec<Vec<usize>> = inputs.iter().map(|x| (0..x.len()).filter(|&b| !x[b].is_zero()).collect()).collect();
        if supports.iter().any(Vec::is_empty) && s > 0 {
            return out;
        }
        let combos: usize = supports.iter().map(Vec::len).fold(1usize, |a, b| a.saturating_mul(b));
        let mut add = |key: &[usize], outs: &BTreeMap<usize, Poly>| {
            let mut c = Poly::one();
            for (t, &b) in key.iter().enumerate() {
                c = &c * &inputs[t][b];
            }
            for (o, p) in outs {
                out[*o] = &out[*o] + &(&c * p);
            }
        };
        if combos <= self.terms.len() {
            let mut idx = vec![0usize; s];
            let mut key = vec![0usize; s];
            loop {
                for t in 0..s {
                    key[t] = supports[t][idx[t]];
                }
                if let Some(outs) = self.terms.get(&key) {
                    add(&key, outs);
                }
                let mut t = s;
                loop {
                    if t == 0 {
                        return out;
                    }
                    t -= 1;
                    idx[t] += 1;
                    if idx[t] < supports[t].len() {
                        break;
                    }
                    idx[t] = 0;
                }
            }
        }
        for (k, outs) in &self.terms {
            if k.len() == s && k.iter().enumerate().all(|(t, &b)| !inputs[t][b].is_zero()) {
                add(k, outs);
            }
        }
        out
    }
}

/// Anything that can evaluate `mu^s` on elements.
pub trait AInf {
    fn dim(&self) -> usize;
    fn parity(&self, b: usize) -> u8;
    /// `mu^s(x_s, ..., x_1)` with `inputs[0] = x_s`.
    fn mu(&self, inputs: &[&Elem]) -> Elem;
    /// Largest arity that may be nonzero, or the evaluation bound.
    fn max_arity(&self) -> usize;
    fn label(&self, b: usize) -> String {
        format!("b{b}")
    }
    fn truncation(&self) -> Truncation {
        Truncation::none()
    }
}

/// Single-object A-infinity algebra given by sparse tables.
#[derive(Clone, Debug)]
pub struct AInfAlgebra {
    pub labels: Vec<String>,
    pub parity: Vec<u8>,
    /// Integer degrees used to bound homotopy constructions; zero if unknown.
    pub zdeg: Vec<i64>,
    pub vars: Vars,
    pub trunc: Truncation,
    pub s_max: usize,
    pub unit: Option<usize>,
    pub mu: Cochain,
}

impl AInfAlgebra {
    pub fn new(labels: Vec<String>, parity: Vec<u8>, vars: Vars, s_max: usize) -> AInfAlgebra {
        let zdeg = vec![0; labels.len()];
        AInfAlgebra { labels, parity, zdeg, vars, trunc: Truncation::none(), s_max, unit: None, mu: Cochain::new() }
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Exterior algebra on `n` odd generators, `mu^2(x, y) = (-1)^|y| x ^ y`.
    pub fn exterior(n: usize) -> AInfAlgebra {
        let d = 1usize << n;
        let labels = (0..d).map(|m| subset_label("t", m as u32)).collect();
        let parity = (0..d).map(|m| (m.count_ones() % 2) as u8).collect();
        let mut alg = AInfAlgebra::new(labels, parity, Vars::new(vec![]), 2);
        alg.zdeg = (0..d).map(|m| m.count_ones() as i64).collect();
        alg.unit = Some(0);
        for x in 0..d {
            for y in 0..d {
                if let Some(s) = wedge_sign(x as u32, y as u32) {
                    let s = if y.count_ones() % 2 == 1 { -s } else { s };
                    alg.mu.add_term(&[x, y], x | y, &Poly::int(s));
                }
            }
        }
        alg
    }

    /// Checks `mu^2(e, a) = (-1)^sigma(a) a`, `mu^2(a, e) = a` and that no other
    /// table entry takes `e` as an input.
    pub fn strict_unit_check(&self) -> std::result::Result<(), String> {
        let e = self.unit.ok_or("no unit declared")?;
        let d = self.dim();
        for b in 0..d {
            let left = self.mu.terms.get(&vec![e, b]).cloned().unwrap_or_default();
            let right = self.mu.terms.get(&vec![b, e]).cloned().unwrap_or_default();
            let mut want_left = BTreeMap::new();
            want_left.insert(b, Poly::constant(sign(self.parity[b] == 1)));
            let mut want_right = BTreeMap::new();
            want_right.insert(b, Poly::one());
            if left != want_left {
                return Err(format!("mu2({}, {}) is not the signed identity", self.labels[e], self.labels[b]));
            }
            if right != want_right {
                return Err(format!("mu2({}, {}) is not the identity", self.labels[b], self.labels[e]));
            }
        }
        for k in self.mu.terms.keys() {
            if k.len() != 2 && k.contains(&e) {
                return Err(format!("mu{} takes the unit as input at {:?}", k.len(), self.tuple_labels(k)));
            }
        }
        Ok(())
    }

    pub fn tuple_labels(&self, key: &[usize]) -> Vec<String> {
        key.iter().map(|&b| self.labels[b].clone()).collect()
    }

    pub fn render_elem(&self, x: &[Poly]) -> String {
        let parts: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(b, p)| format!("({})*{}", p.render(&self.vars), self.labels[b]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Serializes to the line format `mu s | in: b1,...,bs | out: (coeff)*b`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if !self.vars.names.is_empty() {
            let _ = writeln!(s, "vars {}", self.vars.names.join(","));
        }
        if let Some(rho) = self.trunc.rho {
            let r: Vec<String> = self.trunc.r_vars.iter().map(|&i| self.vars.names[i].clone()).collect();
            let _ = writeln!(s, "truncate {} {}", r.join(","), rho);
        }
        let _ = writeln!(s, "smax {}", self.s_max);
        for b in 0..self.dim() {
            let _ = writeln!(s, "basis {} {} {}", self.labels[b], self.parity[b], self.zdeg[b]);
        }
        if let Some(e) = self.unit {
            let _ = writeln!(s, "unit {}", self.labels[e]);
        }
        let mut keys: Vec<&Vec<usize>> = self.mu.terms.keys().collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        for k in keys {
            for (o, p) in &self.mu.terms[k] {
                let _ = writeln!(s, "mu {} | in: {} | out: ({})*{}", k.len(), self.tuple_labels(k).join(","), p.render(&self.vars), self.labels[*o]);
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<AInfAlgebra> {
        let mut vars = Vars::new(vec![]);
        let mut trunc_spec: Option<(Vec<String>, u32)> = None;
        let mut s_max = 0usize;
        let mut labels = Vec::new();
        let mut parity = Vec::new();
        let mut zdeg = Vec::new();
        let mut unit = None;
        let mut mu_lines = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::Parse(format!("line {}: {m}", ln + 1));
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "vars" => vars = Vars::new(rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
                "truncate" => {
                    let (names, rho) = rest.rsplit_once(' ').ok_or_else(|| bad("expected `truncate r1,r2 rho`"))?;
                    let rho = rho.trim().parse().map_err(|_| bad("bad truncation degree"))?;
                    trunc_spec = Some((names.split(',').map(|s| s.trim().to_string()).collect(), rho));
                }
                "smax" => s_max = rest.trim().parse().map_err(|_| bad("bad smax"))?,
                "basis" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    if f.len() < 2 {
                        return Err(bad("expected `basis label parity [zdeg]`"));
                    }
                    labels.push(f[0].to_string());
                    parity.push(f[1].parse::<u8>().map_err(|_| bad("bad parity"))? % 2);
                    zdeg.push(if f.len() > 2 { f[2].parse().map_err(|_| bad("bad degree"))? } else { 0 });
                }
                "unit" => unit = Some(rest.trim().to_string()),
                "mu" => mu_lines.push((ln + 1, rest.to_string())),
                _ => return Err(bad(&format!("unknown directive `{head}`"))),
            }
        }
        let mut alg = AInfAlgebra::new(labels, parity, vars, s_max);
        alg.zdeg = zdeg;
        if let Some(u) = unit {
            alg.unit = Some(alg.index(&u).ok_or_else(|| Error::Parse(format!("unknown unit `{u}`")))?);
        }
        if let Some((names, rho)) = trunc_spec {
            let r_vars = names.iter().map(|n| alg.vars.index(n).ok_or_else(|| Error::Parse(format!("unknown variable `{n}`")))).collect::<Result<Vec<_>>>()?;
            alg.trunc = Truncation::r_degree(r_vars, rho);
        }
        for (ln, rest) in mu_lines {
            let bad = |m: &str| Error::Parse(format!("line {ln}: {m}"));
            let parts: Vec<&str> = rest.split('|').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad("expected `mu s | in: ... | out: ...`"));
            }
            let s: usize = parts[0].parse().map_err(|_| bad("bad arity"))?;
            let ins = parts[1].strip_prefix("in:").ok_or_else(|| bad("missing `in:`"))?.trim();
            let key: Vec<usize> = if ins.is_empty() {
                vec![]
            } else {
                ins.split(',').map(|l| alg.index(l.trim()).ok_or_else(|| bad(&format!("unknown basis label `{}`", l.trim())))).collect::<Result<_>>()?
            };
            if key.len() != s {
                return Err(bad("arity does not match the number of inputs"));
            }
            let out = parts[2].strip_prefix("out:").ok_or_else(|| bad("missing `out:`"))?.trim();
            let (coeff, label) = out.rsplit_once('*').ok_or_else(|| bad("expected `(coeff)*label`"))?;
            let coeff = coeff.trim().strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(coeff.trim());
            let o = alg.index(label.trim()).ok_or_else(|| bad(&format!("unknown basis label `{}`", label.trim())))?;
            let p = alg.vars.parse(coeff)?;
            alg.mu.add_term(&key, o, &p);
            alg.s_max = alg.s_max.max(s);
        }
        Ok(alg)
    }
}

impl AInf for AInfAlgebra {
    fn dim(&self) -> usize {
        self.labels.len()
    }

    fn parity(&self, b: usize) -> u8 {
        self.parity[b]
    }

    fn mu(&self, inputs: &[&Elem]) -> Elem {
        if inputs.len() > self.s_max {
            return zero_elem(self.dim());
        }
        self.trunc.apply_elem(self.mu.eval(inputs, self.dim()))
    }

    fn max_arity(&self) -> usize {
        self.s_max
    }

    fn label(&self, b: usize) -> String {
        self.labels[b].clone()
    }

    fn truncation(&self) -> Truncation {
        self.trunc.clone()
    }
}

/// Label like `t1t3` for the subset mask, `1` for the empty set.
pub fn subset_label(prefix: &str, mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| format!("{prefix}{}", i + 1)).collect()
}

/// Sign of `x ^ y` relative to the increasing monomial, or `None` if they overlap.
pub fn wedge_sign(x: u32, y: u32) -> Option<i64> {
    if x & y != 0 {
        return None;
    }
    // Each generator of y passes the generators of x with larger index.
    let mut swaps = 0;
    for i in 0..32 {
        if y >> i & 1 == 1 {
            swaps += (x >> (i + 1)).count_ones();
        }
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub tuple: Vec<String>,
    pub output: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCertificate {
    pub max_arity_checked: usize,
    pub rho: Option<u32>,
    pub composite_entries: usize,
    pub passed: bool,
    pub violation: Option<Violation>,
}

/// Checks `mu o mu = 0` on every basis tuple of arity at most the bound.
///
/// With curvature the check stops one arity below `s_max`, since the
/// composite at arity `s_max` would need `mu^(s_max + 1)`.
pub fn ainf_verify(alg: &AInfAlgebra, max_arity: Option<usize>) -> VerifyCertificate {
    let curved = alg.mu.terms.keys().any(Vec::is_empty);
    let mut bound = if curved { alg.s_max.saturating_sub(1) } else { alg.s_max };
    if let Some(m) = max_arity {
        bound = bound.min(m);
    }
    let comp = hochschild::gerstenhaber(&alg.mu, &alg.mu, &alg.parity, bound, &alg.trunc);
    let mut keys: Vec<&Vec<usize>> = comp.terms.keys().collect();
    keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let violation = keys.first().map(|k| {
        let (o, p) = comp.terms[*k].iter().next().expect("nonempty entry");
        Violation { tuple: alg.tuple_labels(k), output: alg.labels[*o].clone(), residual: p.render(&alg.vars) }
    });
    VerifyCertificate { max_arity_checked: bound, rho: alg.trunc.rho, composite_entries: comp.nnz(), passed: violation.is_none(), violation }
}

/// Materializes the tables of `alg` for all basis tuples up to `s_max`.
pub fn tabulate(alg: &dyn AInf, labels: Vec<String>, vars: Vars, s_max: usize) -> AInfAlgebra {
    let d = alg.dim();
    let parity = (0..d).map(|b| alg.parity(b)).collect();
    let mut out = AInfAlgebra::new(labels, parity, vars, s_max);
    out.trunc = alg.truncation();
    let basis: Vec<Elem> = (0..d).map(|b| basis_elem(d, b)).collect();
    for s in 0..=s_max {
        let mut key = vec![0usize; s];
        loop {
            let inputs: Vec<&Elem> = key.iter().map(|&b| &basis[b]).collect();
            out.mu.add_elem(&key, &alg.mu(&inputs));
            let mut t = s;
            loop {
                if t == 0 {
                    break;
                }
                t -= 1;
                key[t] += 1;
                if key[t] < d {
                    break;
                }
                key[t] = 0;
            }
            if t == 0 && key.iter().all(|&k| k == 0) {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_is_associative_and_unital() {
        for n in 1..=3 {
            let alg = AInfAlgebra::exterior(n);
            let cert = ainf_verify(&alg, None);
            assert!(cert.passed, "{:?}", cert.violation);
            alg.strict_unit_check().unwrap();
        }
    }

    #[test]
    fn corrupted_mu3_is_located() {
        let mut alg = AInfAlgebra::exterior(2);
        alg.s_max = 4;
        alg.mu.add_term(&[1, 1, 1], 0, &Poly::one());
        let cert = ainf_verify(&alg, None);
        assert!(!cert.passed);
        let v = cert.violation.unwrap();
        assert_eq!(v.tuple.len(), 4);
        assert!(v.tuple.iter().all(|l| l == "t1" || l == "t2" || l == "1"), "{v:?}");
    }

    #[test]
    fn text_round_trip() {
        let mut alg = AInfAlgebra::exterior(2);
        alg.vars = Vars::new(vec!["r1".into()]);
        alg.s_max = 3;
        alg.mu.add_term(&[1, 1, 1], 0, &alg.vars.parse("2*r1").unwrap());
        alg.trunc = Truncation::r_degree(vec![0], 1);
        let text = alg.to_text();
        assert!(text.contains("mu 3 | in: t1,t1,t1 | out: (2*r1)*1"), "{text}");
        let back = AInfAlgebra::from_text(&text).unwrap();
        assert_eq!(back.mu, alg.mu);
        assert_eq!(back.labels, alg.labels);
        assert_eq!(back.unit, alg.unit);
        assert_eq!(back.trunc, alg.trunc);
    }

    #[test]
    fn tabulate_reproduces_tables() {
        let alg = AInfAlgebra::exterior(2);
        let t = tabulate(&alg, alg.labels.clone(), alg.vars.clone(), 2);
        assert_eq!(t.mu, alg.mu);
    }
}

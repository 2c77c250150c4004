//! Monomial orders, Buchberger's algorithm, normal forms and staircases.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Mono, Poly, Vars, MAX_VARS};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    Lex,
    DegLex,
}

/// Block order: blocks are compared in turn; inside a block variables are
/// listed from largest to smallest. Unlisted variables form a final lex block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    blocks: Vec<(Vec<usize>, BlockKind)>,
}

impl MonomialOrder {
    pub fn new(blocks: Vec<(Vec<usize>, BlockKind)>) -> MonomialOrder {
        let mut seen = [false; MAX_VARS];
        for (vars, _) in &blocks {
            for &v in vars {
                assert!(!seen[v], "variable listed twice in a monomial order");
                seen[v] = true;
            }
        }
        let rest: Vec<usize> = (0..MAX_VARS).filter(|&v| !seen[v]).collect();
        let mut blocks = blocks;
        if !rest.is_empty() {
            blocks.push((rest, BlockKind::Lex));
        }
        MonomialOrder { blocks }
    }

    pub fn lex(priority: Vec<usize>) -> MonomialOrder {
        Self::new(vec![(priority, BlockKind::Lex)])
    }

    pub fn deglex(priority: Vec<usize>) -> MonomialOrder {
        Self::new(vec![(priority, BlockKind::DegLex)])
    }

    /// Parse `lex:u1>u2>...`, `deglex:...` or `block:r1>r2|u1>u2` (deglex blocks).
    pub fn parse(text: &str, vars: &Vars) -> Result<MonomialOrder> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| Error::Parse(format!("order `{text}` lacks a kind")))?;
        let names = |s: &str| -> Result<Vec<usize>> {
            s.split('>')
                .map(|n| vars.index(n.trim()).ok_or_else(|| Error::Parse(format!("unknown variable `{n}` in order"))))
                .collect()
        };
        match kind {
            "lex" => Ok(Self::lex(names(rest)?)),
            "deglex" | "grlex" => Ok(Self::deglex(names(rest)?)),
            "block" => {
                let blocks = rest.split('|').map(|b| Ok((names(b)?, BlockKind::DegLex))).collect::<Result<Vec<_>>>()?;
                Ok(Self::new(blocks))
            }
            _ => Err(Error::Parse(format!("unknown order kind `{kind}`"))),
        }
    }

    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        for (vars, kind) in &self.blocks {
            if *kind == BlockKind::DegLex {
                let o = a.degree_in(vars).cmp(&b.degree_in(vars));
                if o != Ordering::Equal {
                    return o;
                }
            }
            for &v in vars {
                let o = a.0[v].cmp(&b.0[v]);
                if o != Ordering::Equal {
                    return o;
                }
            }
        }
        Ordering::Equal
    }

    pub fn leading(&self, p: &Poly) -> Option<(Mono, Scalar)> {
        p.terms.iter().max_by(|x, y| self.cmp(x.0, y.0)).map(|(m, c)| (*m, c.clone()))
    }
}

/// Polynomial as terms sorted from largest to smallest monomial.
type Sorted = Vec<(Mono, Scalar)>;

fn to_sorted(p: &Poly, ord: &MonomialOrder) -> Sorted {
    let mut v: Sorted = p.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
    v.sort_by(|a, b| ord.cmp(&b.0, &a.0));
    v
}

fn from_sorted(v: &Sorted) -> Poly {
    let mut p = Poly::zero();
    for (m, c) in v {
        p.add_term(*m, c);
    }
    p
}

/// `p - c * m * g`, merging sorted term lists.
fn sub_mul(p: &[(Mono, Scalar)], g: &[(Mono, Scalar)], c: &Scalar, m: &Mono, ord: &MonomialOrder) -> Sorted {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let (mut i, mut j) = (0, 0);
    while i < p.len() || j < g.len() {
        if j == g.len() {
            out.push(p[i].clone());
            i += 1;
            continue;
        }
        let gm = g[j].0.mul(m);
        if i == p.len() {
            out.push((gm, -(c * &g[j].1)));
            j += 1;
            continue;
        }
        match ord.cmp(&p[i].0, &gm) {
            Ordering::Greater => {
                out.push(p[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((gm, -(c * &g[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = &p[i].1 - &(c * &g[j].1);
                if !v.is_zero() {
                    out.push((gm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn make_monic(v: &mut Sorted) {
    if let Some((_, lc)) = v.first() {
        if !lc.is_one() {
            let inv = lc.inv();
            for t in v.iter_mut() {
                t.1 = &t.1 * &inv;
            }
        }
    }
}

/// Full reduction of `f` by `divisors` (each nonempty and sorted).
fn reduce(f: Sorted, divisors: &[Sorted], ord: &MonomialOrder) -> Sorted {
    let mut p = f;
    let mut start = 0;
    let mut rem: Sorted = Vec::new();
    while start < p.len() {
        let hm = p[start].0;
        match divisors.iter().find(|g| g[0].0.divides(&hm)) {
            Some(g) => {
                let m = g[0].0.quotient_of(&hm);
                let c = &p[start].1 * &g[0].1.inv();
                p = sub_mul(&p[start..], g, &c, &m, ord);
                start = 0;
            }
            None => {
                rem.push(p[start].clone());
                start += 1;
            }
        }
    }
    rem
}

fn s_poly(f: &Sorted, g: &Sorted, ord: &MonomialOrder) -> Sorted {
    let l = f[0].0.lcm(&g[0].0);
    let mf = f[0].0.quotient_of(&l);
    let mg = g[0].0.quotient_of(&l);
    let fpart = sub_mul(&[], f, &(-&f[0].1.inv()), &mf, ord);
    sub_mul(&fpart, g, &g[0].1.inv(), &mg, ord)
}

/// Reduced, monic Gröbner basis sorted by increasing leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    pub polys: Vec<Poly>,
    pub leads: Vec<Mono>,
    sorted: Vec<Sorted>,
}

impl GroebnerBasis {
    fn from_sorted_list(list: Vec<Sorted>, order: MonomialOrder) -> GroebnerBasis {
        let mut list = list;
        list.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));
        GroebnerBasis {
            polys: list.iter().map(from_sorted).collect(),
            leads: list.iter().map(|s| s[0].0).collect(),
            sorted: list,
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Whether the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.leads.iter().any(|m| m.is_one())
    }

    pub fn normal_form(&self, f: &Poly) -> Poly {
        from_sorted(&reduce(to_sorted(f, &self.order), &self.sorted, &self.order))
    }

    pub fn contains(&self, f: &Poly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Whether every generator of `other` lies in this ideal.
    pub fn contains_all(&self, family: &[Poly]) -> bool {
        family.iter().all(|f| self.contains(f))
    }
}

/// Record of the pair processing, in selection order.
#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub lcm: Vec<u16>,
    pub outcome: PairOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairOutcome {
    CoprimeLeads,
    ChainCriterion,
    ReducedToZero,
    NewElement,
}

fn mono_vec(m: &Mono) -> Vec<u16> {
    let last = m.0.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
    m.0[..last].to_vec()
}

/// Buchberger's algorithm with the normal selection strategy.
pub fn buchberger(generators: &[Poly], order: &MonomialOrder) -> GroebnerBasis {
    buchberger_with_log(generators, order).0
}

pub fn buchberger_with_log(generators: &[Poly], order: &MonomialOrder) -> (GroebnerBasis, Vec<PairRecord>) {
    let ord = order;
    let mut basis: Vec<Sorted> = Vec::new();
    for g in generators {
        let mut s = reduce(to_sorted(g, ord), &basis, ord);
        if !s.is_empty() {
            make_monic(&mut s);
            basis.push(s);
        }
    }
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    let mut log = Vec::new();
    while !pending.is_empty() {
        // Smallest lcm first, ties broken by the exponent vector, then indices.
        let &(i, j) = pending
            .iter()
            .min_by(|a, b| {
                let la = basis[a.0][0].0.lcm(&basis[a.1][0].0);
                let lb = basis[b.0][0].0.lcm(&basis[b.1][0].0);
                ord.cmp(&la, &lb).then_with(|| la.cmp(&lb)).then_with(|| a.cmp(b))
            })
            .unwrap();
        pending.remove(&(i, j));
        let (li, lj) = (basis[i][0].0, basis[j][0].0);
        let l = li.lcm(&lj);
        let outcome = if li.coprime(&lj) {
            PairOutcome::CoprimeLeads
        } else if (0..basis.len()).any(|k| {
            k != i && k != j && basis[k][0].0.divides(&l) && !pending.contains(&(i.min(k), i.max(k))) && !pending.contains(&(j.min(k), j.max(k)))
        }) {
            PairOutcome::ChainCriterion
        } else {
            let mut h = reduce(s_poly(&basis[i], &basis[j], ord), &basis, ord);
            if h.is_empty() {
                PairOutcome::ReducedToZero
            } else {
                make_monic(&mut h);
                let k = basis.len();
                basis.push(h);
                for a in 0..k {
                    pending.insert((a, k));
                }
                PairOutcome::NewElement
            }
        };
        log.push(PairRecord { i, j, lcm: mono_vec(&l), outcome });
    }
    // Minimize, then interreduce.
    let mut keep: Vec<Sorted> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            k != idx && h[0].0.divides(&g[0].0) && (h[0].0 != g[0].0 || k < idx)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for idx in 0..keep.len() {
        let others: Vec<Sorted> = keep.iter().enumerate().filter(|(k, _)| *k != idx).map(|(_, g)| g.clone()).collect();
        let head = keep[idx][0].clone();
        let tail = reduce(keep[idx][1..].to_vec(), &others, ord);
        let mut g = vec![head];
        g.extend(tail);
        make_monic(&mut g);
        reduced.push(g);
    }
    (GroebnerBasis::from_sorted_list(reduced, order.clone()), log)
}

/// Outcome of checking Buchberger's criterion on a family.
#[derive(Clone, Debug, Serialize)]
pub struct GroebnerCertificate {
    pub is_groebner: bool,
    pub pairs: Vec<PairCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub coprime_leads: bool,
    pub remainder_terms: usize,
}

/// Check that every S-polynomial of `family` reduces to zero by `family`.
pub fn is_groebner_basis(family: &[Poly], order: &MonomialOrder) -> GroebnerCertificate {
    let sorted: Vec<Sorted> = family.iter().filter(|p| !p.is_zero()).map(|p| to_sorted(p, order)).collect();
    let mut pairs = Vec::new();
    let mut ok = true;
    for j in 0..sorted.len() {
        for i in 0..j {
            let coprime = sorted[i][0].0.coprime(&sorted[j][0].0);
            let r = reduce(s_poly(&sorted[i], &sorted[j], order), &sorted, order);
            ok &= r.is_empty();
            pairs.push(PairCheck { i, j, coprime_leads: coprime, remainder_terms: r.len() });
        }
    }
    GroebnerCertificate { is_groebner: ok, pairs }
}

/// Normal form by an arbitrary family used as divisors in the given order.
pub fn reduce_by(f: &Poly, family: &[Poly], order: &MonomialOrder) -> Poly {
    let sorted: Vec<Sorted> = family.iter().filter(|p| !p.is_zero()).map(|p| to_sorted(p, order)).collect();
    from_sorted(&reduce(to_sorted(f, order), &sorted, order))
}

/// Staircase of a Gröbner basis restricted to some variables.
#[derive(Clone, Debug, Serialize)]
pub struct Staircase {
    pub zero_dimensional: bool,
    pub monomials: Vec<Vec<u16>>,
    pub truncated: bool,
}

/// Standard monomials in `vars` (those not divisible by a leading monomial).
///
/// Leading monomials involving variables outside `vars` are ignored. With no
/// bound, enumeration is only attempted when the staircase is finite.
pub fn quotient_standard_monomials(gb: &GroebnerBasis, vars: &[usize], degree_bound: Option<u32>) -> Staircase {
    let leads: Vec<Mono> = gb
        .leads
        .iter()
        .filter(|m| m.0.iter().enumerate().all(|(i, &e)| e == 0 || vars.contains(&i)))
        .copied()
        .collect();
    let pure: Vec<Option<u16>> = vars
        .iter()
        .map(|&v| leads.iter().filter(|m| m.degree() == m.0[v] as u32 && m.0[v] > 0).map(|m| m.0[v]).min())
        .collect();
    let zero_dimensional = pure.iter().all(|p| p.is_some());
    let bound = match degree_bound {
        Some(b) => b,
        None if zero_dimensional => pure.iter().map(|p| p.unwrap() as u32 - 1).sum(),
        None => return Staircase { zero_dimensional, monomials: Vec::new(), truncated: true },
    };
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Mono::one(), 0u32)];
    while let Some((k, m, deg)) = stack.pop() {
        if leads.iter().any(|l| l.divides(&m)) {
            continue;
        }
        if k == vars.len() {
            out.push(m);
            continue;
        }
        let v = vars[k];
        let mut e = 0u16;
        loop {
            let mut m2 = m;
            m2.0[v] = e;
            if deg + e as u32 > bound || leads.iter().any(|l| l.divides(&m2)) {
                break;
            }
            stack.push((k + 1, m2, deg + e as u32));
            e += 1;
        }
    }
    out.sort();
    let truncated = !zero_dimensional;
    Staircase { zero_dimensional, monomials: out.iter().map(mono_vec).collect(), truncated }
}

/// Ideal equality by mutual reduction of generators.
pub fn ideals_equal(a: &[Poly], b: &[Poly], order: &MonomialOrder) -> bool {
    let ga = buchberger(a, order);
    let gb = buchberger(b, order);
    ga.contains_all(b) && gb.contains_all(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv() -> Vars {
        Vars::new(vec!["u".into(), "v".into()])
    }

    #[test]
    fn monomial_ideal_is_its_own_basis() {
        let v = uv();
        let gens = vec![v.parse("u^2").unwrap(), v.parse("v^2").unwrap()];
        let gb = buchberger(&gens, &MonomialOrder::lex(vec![0, 1]));
        assert_eq!(gb.polys.len(), 2);
        let st = quotient_standard_monomials(&gb, &[0, 1], None);
        assert!(st.zero_dimensional);
        assert_eq!(st.monomials.len(), 4);
    }

    #[test]
    fn hand_buchberger_example() {
        let v = uv();
        let gens = vec![v.parse("u^2 - v").unwrap(), v.parse("u*v - 1").unwrap()];
        let ord = MonomialOrder::lex(vec![0, 1]);
        let gb = buchberger(&gens, &ord);
        let expect = vec![v.parse("v^3 - 1").unwrap(), v.parse("u - v^2").unwrap()];
        assert_eq!(gb.polys, expect);
        assert_eq!(gb.normal_form(&v.parse("u").unwrap()), v.parse("v^2").unwrap());
        assert!(is_groebner_basis(&expect, &ord).is_groebner);
        assert!(!is_groebner_basis(&gens, &ord).is_groebner);
    }

    #[test]
    fn single_polynomial_is_groebner() {
        let v = uv();
        let cert = is_groebner_basis(&[v.parse("u^3 + v").unwrap()], &MonomialOrder::deglex(vec![0, 1]));
        assert!(cert.is_groebner);
    }

    #[test]
    fn order_parsing() {
        let v = Vars::ru(2);
        let o = MonomialOrder::parse("block:r1>r2|u2>u1", &v).unwrap();
        let a = v.parse("r1").unwrap();
        let b = v.parse("u1^5").unwrap();
        assert_eq!(o.cmp(a.terms.keys().next().unwrap(), b.terms.keys().next().unwrap()), Ordering::Greater);
        assert!(MonomialOrder::parse("lex:w", &v).is_err());
    }
}

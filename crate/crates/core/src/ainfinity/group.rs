//! Finite abelian group gradings, the character action, semidirect products
//! `A x| Gamma*` and the Fourier comparison with the model `A^theta` built on
//! the sum of shifted copies of the object.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::wbc::{twisted_by_patterns, Twistable};
use super::{basis_elem, elem_add_scaled, elem_sub, zero_elem, AInf, AInfAlgebra, Elem};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// `Gamma = (Z/m_1 + ... + Z/m_k) / <relations>`.
#[derive(Clone, Debug)]
pub struct FiniteAbelian {
    pub moduli: Vec<u32>,
    pub relations: Vec<Vec<u32>>,
    /// Canonical representative of each class (the smallest tuple).
    pub elements: Vec<Vec<u32>>,
    class_of: HashMap<Vec<u32>, usize>,
}

impl FiniteAbelian {
    pub fn new(moduli: Vec<u32>, relations: Vec<Vec<u32>>) -> Result<FiniteAbelian> {
        if moduli.contains(&0) || relations.iter().any(|r| r.len() != moduli.len()) {
            return Err(Error::Shape("moduli must be positive and relations must match their length".into()));
        }
        let total: usize = moduli.iter().map(|&m| m as usize).product();
        let mut all = Vec::with_capacity(total);
        let mut t = vec![0u32; moduli.len()];
        for _ in 0..total {
            all.push(t.clone());
            for i in (0..t.len()).rev() {
                t[i] += 1;
                if t[i] < moduli[i] {
                    break;
                }
                t[i] = 0;
            }
        }
        let mut class_of: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut elements = Vec::new();
        for start in &all {
            if class_of.contains_key(start) {
                continue;
            }
            let id = elements.len();
            elements.push(start.clone());
            let mut queue = VecDeque::from([start.clone()]);
            class_of.insert(start.clone(), id);
            while let Some(x) = queue.pop_front() {
                for r in &relations {
                    let y: Vec<u32> = x.iter().zip(r).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect();
                    if !class_of.contains_key(&y) {
                        class_of.insert(y.clone(), id);
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(FiniteAbelian { moduli, relations, elements, class_of })
    }

    /// `(Z/a)^n / diagonal`.
    pub fn type_a(n: usize, a: u32) -> FiniteAbelian {
        FiniteAbelian::new(vec![a; n], vec![vec![1; n]]).expect("valid moduli")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn class(&self, t: &[u32]) -> usize {
        let r: Vec<u32> = t.iter().zip(&self.moduli).map(|(a, m)| a % m).collect();
        self.class_of[&r]
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let s: Vec<u32> = self.elements[x].iter().zip(&self.elements[y]).map(|(a, b)| a + b).collect();
        self.class(&s)
    }

    pub fn zero(&self) -> usize {
        self.class(&vec![0; self.moduli.len()])
    }

    /// `lcm` of the moduli: the order of the root of unity needed for characters.
    pub fn exponent(&self) -> u32 {
        self.moduli.iter().fold(1u32, |acc, &m| num_integer::lcm(acc, m))
    }

    /// Characters as tuples `chi` with `chi(t) = root^(sum chi_i t_i M/m_i)`,
    /// those killing every relation.
    pub fn characters(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut c = vec![0u32; self.moduli.len()];
        loop {
            if self.relations.iter().all(|r| self.pair_exponent(&c, r) == 0) {
                out.push(c.clone());
            }
            let mut i = c.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                c[i] += 1;
                if c[i] < self.moduli[i] {
                    break;
                }
                c[i] = 0;
            }
        }
    }

    /// Exponent `e` with `chi(t) = root^e`.
    pub fn pair_exponent(&self, chi: &[u32], t: &[u32]) -> u32 {
        let big = self.exponent() as u64;
        let mut e = 0u64;
        for ((c, x), m) in chi.iter().zip(t).zip(&self.moduli) {
            e += *c as u64 * *x as u64 * (big / *m as u64);
        }
        (e % big) as u32
    }
}

/// A strict `Gamma`-grading of a finite algebra with the induced action of
/// the character group.
#[derive(Clone, Debug)]
pub struct GroupAction {
    pub gamma: FiniteAbelian,
    /// Gamma-degree (class index) of each basis vector.
    pub degrees: Vec<usize>,
    /// Gamma-degree of each coefficient variable; unlisted variables have degree 0.
    pub var_degrees: Vec<Vec<u32>>,
    pub characters: Vec<Vec<u32>>,
    /// Primitive root of unity of order `gamma.exponent()`.
    pub root: Scalar,
    root_powers: Vec<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrictnessViolation {
    pub tuple: Vec<String>,
    pub output: String,
}

impl GroupAction {
    pub fn new(gamma: FiniteAbelian, degrees: Vec<usize>, var_degrees: Vec<Vec<u32>>, root: Scalar) -> Result<GroupAction> {
        let m = gamma.exponent() as u64;
        if root.multiplicative_order(m) != Some(m) {
            return Err(Error::Invalid(format!("root must have multiplicative order {m}")));
        }
        let root_powers = (0..m).map(|e| root.pow(e)).collect();
        let characters = gamma.characters();
        Ok(GroupAction { gamma, degrees, var_degrees, characters, root, root_powers })
    }

    /// `Gamma^n_a` on the subset basis of `Lambda(theta_1..theta_n)`: `theta^K`
    /// has degree the indicator of `K`. Coefficient variables get degree 0.
    pub fn type_a_on_subsets(n: usize, a: u32, root: Scalar) -> Result<GroupAction> {
        let gamma = FiniteAbelian::type_a(n, a);
        let degrees = (0..1u32 << n).map(|m| gamma.class(&(0..n).map(|j| m >> j & 1).collect::<Vec<_>>())).collect();
        GroupAction::new(gamma, degrees, Vec::new(), root)
    }

    pub fn trivial(dim: usize) -> GroupAction {
        GroupAction::new(FiniteAbelian::new(vec![1], vec![]).expect("trivial group"), vec![0; dim], Vec::new(), Scalar::one())
            .expect("trivial root")
    }

    pub fn num_characters(&self) -> usize {
        self.characters.len()
    }

    pub fn char_value(&self, chi: usize, g: usize) -> Scalar {
        let e = self.gamma.pair_exponent(&self.characters[chi], &self.gamma.elements[g]);
        self.root_powers[e as usize].clone()
    }

    pub fn char_mul(&self, x: usize, y: usize) -> usize {
        let s: Vec<u32> =
            self.characters[x].iter().zip(&self.characters[y]).zip(&self.gamma.moduli).map(|((a, b), m)| (a + b) % m).collect();
        self.characters.iter().position(|c| *c == s).expect("characters form a group")
    }

    pub fn char_inv(&self, x: usize) -> usize {
        let s: Vec<u32> = self.characters[x].iter().zip(&self.gamma.moduli).map(|(a, m)| (m - a) % m).collect();
        self.characters.iter().position(|c| *c == s).expect("characters form a group")
    }

    pub fn char_one(&self) -> usize {
        self.characters.iter().position(|c| c.iter().all(|&x| x == 0)).expect("trivial character")
    }

    fn mono_degree(&self, m: &crate::poly::Mono) -> usize {
        let mut t = vec![0u32; self.gamma.moduli.len()];
        for (v, d) in self.var_degrees.iter().enumerate() {
            let e = m.0[v] as u32;
            for (ti, di) in t.iter_mut().zip(d) {
                *ti += e * di;
            }
        }
        self.gamma.class(&t)
    }

    /// Every table entry is Gamma-additive: inputs sum to output plus coefficient.
    pub fn check_strict(&self, alg: &AInfAlgebra) -> std::result::Result<(), StrictnessViolation> {
        for (key, outs) in &alg.mu.terms {
            let mut lhs = self.gamma.zero();
            for &b in key {
                lhs = self.gamma.add(lhs, self.degrees[b]);
            }
            for (&out, p) in outs {
                for m in p.terms.keys() {
                    if self.gamma.add(self.degrees[out], self.mono_degree(m)) != lhs {
                        return Err(StrictnessViolation { tuple: alg.tuple_labels(key), output: format!("{} {}", p.render(&alg.vars), alg.labels[out]) });
                    }
                }
            }
        }
        Ok(())
    }

    /// `chi . x`, scaling each basis vector by `chi` of its degree.
    pub fn act(&self, chi: usize, x: &Elem) -> Elem {
        x.iter().enumerate().map(|(b, p)| if p.is_zero() { Poly::zero() } else { p.scale(&self.char_value(chi, self.degrees[b])) }).collect()
    }
}

/// `A x| Gamma*` with basis `b (x) chi` at index `b * |Gamma*| + chi` and
/// `mu(a_s x chi_s, .., a_1 x chi_1) = mu(a_s, chi_s a_(s-1), .., chi_s..chi_2 a_1) x chi_s..chi_1`.
pub struct Semidirect<'a> {
    pub base: &'a dyn AInf,
    pub action: &'a GroupAction,
}

impl<'a> Semidirect<'a> {
    pub fn new(base: &'a dyn AInf, action: &'a GroupAction) -> Semidirect<'a> {
        Semidirect { base, action }
    }

    pub fn index(&self, b: usize, chi: usize) -> usize {
        b * self.action.num_characters() + chi
    }

    /// `x (x) chi` for `x` in the base.
    pub fn tensor(&self, x: &Elem, chi: usize) -> Elem {
        let mut out = zero_elem(self.dim());
        for (b, p) in x.iter().enumerate() {
            out[self.index(b, chi)] = p.clone();
        }
        out
    }

    fn components(&self, x: &Elem) -> Vec<(usize, Elem)> {
        let k = self.action.num_characters();
        let d = self.base.dim();
        (0..k)
            .filter_map(|chi| {
                let comp: Elem = (0..d).map(|b| x[b * k + chi].clone()).collect();
                if comp.iter().all(Poly::is_zero) {
                    None
                } else {
                    Some((chi, comp))
                }
            })
            .collect()
    }
}

impl AInf for Semidirect<'_> {
    fn dim(&self) -> usize {
        self.base.dim() * self.action.num_characters()
    }

    fn parity(&self, b: usize) -> u8 {
        self.base.parity(b / self.action.num_characters())
    }

    fn mu(&self, inputs: &[&Elem]) -> Elem {
        let mut out = zero_elem(self.dim());
        let comps: Vec<Vec<(usize, Elem)>> = inputs.iter().map(|x| self.components(x)).collect();
        if comps.iter().any(Vec::is_empty) {
            return out;
        }
        let s = inputs.len();
        let mut choice = vec![0usize; s];
        loop {
            // inputs are written left to right: a_s first.
            let mut prefix = self.action.char_one();
            let mut args: Vec<Elem> = Vec::with_capacity(s);
            for t in 0..s {
                let (chi, a) = &comps[t][choice[t]];
                args.push(if t == 0 { a.clone() } else { self.action.act(prefix, a) });
                prefix = self.action.char_mul(prefix, *chi);
            }
            let refs: Vec<&Elem> = args.iter().collect();
            let r = self.base.mu(&refs);
            let r = self.tensor(&r, prefix);
            elem_add_scaled(&mut out, &r, &Poly::one());
            let mut t = s;
            loop {
                if t == 0 {
                    return out;
                }
                t -= 1;
                choice[t] += 1;
                if choice[t] < comps[t].len() {
                    break;
                }
                choice[t] = 0;
            }
        }
    }

    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }

    fn label(&self, b: usize) -> String {
        let k = self.action.num_characters();
        format!("{}#x{}", self.base.label(b / k), b % k)
    }
}

impl Twistable for Semidirect<'_> {
    fn twisted(&self, alphas: &[&Elem], inputs: &[&Elem], max_total: usize) -> Elem {
        twisted_by_patterns(self, alphas, inputs, max_total)
    }

    fn as_ainf(&self) -> &dyn AInf {
        self
    }
}

/// `A^theta`: basis `(b, gamma)` at index `b * |Gamma| + gamma`, a copy of `b`
/// from the summand indexed by `gamma` to the one indexed by `gamma + deg b`.
/// Operations vanish unless the inputs are composable.
pub struct ThetaModel<'a> {
    pub base: &'a AInfAlgebra,
    pub action: &'a GroupAction,
}

impl<'a> ThetaModel<'a> {
    pub fn index(&self, b: usize, g: usize) -> usize {
        b * self.action.gamma.order() + g
    }

    /// `F(a x chi) = sum_gamma chi(gamma) gamma . f(a)`.
    pub fn fourier(&self, x: &Elem) -> Elem {
        let k = self.action.num_characters();
        let mut out = zero_elem(self.dim());
        for (idx, p) in x.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let (b, chi) = (idx / k, idx % k);
            for g in 0..self.action.gamma.order() {
                out[self.index(b, g)] = &out[self.index(b, g)] + &p.scale(&self.action.char_value(chi, g));
            }
        }
        out
    }
}

impl AInf for ThetaModel<'_> {
    fn dim(&self) -> usize {
        self.base.dim() * self.action.gamma.order()
    }

    fn parity(&self, b: usize) -> u8 {
        self.base.parity(b / self.action.gamma.order())
    }

    fn mu(&self, inputs: &[&Elem]) -> Elem {
        let go = self.action.gamma.order();
        let s = inputs.len();
        let mut out = zero_elem(self.dim());
        if s == 0 {
            return out;
        }
        let nz: Vec<Vec<(usize, usize, &Poly)>> = inputs
            .iter()
            .map(|x| x.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, p)| (i / go, i % go, p)).collect())
            .collect();
        // Walk from the rightmost input, which fixes the source summand.
        fn rec(
            m: &ThetaModel,
            nz: &[Vec<(usize, usize, &Poly)>],
            pos: usize,
            need: Option<usize>,
            key: &mut Vec<usize>,
            coeff: Poly,
            start: usize,
            out: &mut Elem,
        ) {
            let go = m.action.gamma.order();
            if key.len() == nz.len() {
                let mut k = key.clone();
                k.reverse();
                for (outb, p) in m.base.mu.terms.get(&k).into_iter().flatten() {
                    let i = outb * go + start;
                    out[i] = &out[i] + &(&coeff * p);
                }
                return;
            }
            for &(b, g, p) in &nz[pos] {
                if need.is_some_and(|n| n != g) {
                    continue;
                }
                key.push(b);
                let st = if need.is_none() { g } else { start };
                rec(m, nz, pos.wrapping_sub(1), Some(m.action.gamma.add(g, m.action.degrees[b])), key, &coeff * p, st, out);
                key.pop();
            }
        }
        let mut key = Vec::new();
        rec(self, &nz, s - 1, None, &mut key, Poly::one(), 0, &mut out);
        self.base.trunc.apply_elem(out)
    }

    fn max_arity(&self) -> usize {
        self.base.s_max
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierCertificate {
    pub group_order: usize,
    pub characters: usize,
    pub max_arity: usize,
    pub tuples_checked: usize,
    pub exhaustive: bool,
    pub passed: bool,
    pub failure: Option<Vec<String>>,
}

/// Checks `mu(F(x_s), .., F(x_1)) = F(mu(x_s, .., x_1))` on basis tuples of
/// `A x| Gamma*`. With `limit` set, only that many tuples per arity are checked,
/// spread deterministically over the tuple space.
pub fn fourier_check(alg: &AInfAlgebra, action: &GroupAction, max_arity: usize, limit: Option<usize>) -> FourierCertificate {
    let sd = Semidirect::new(alg, action);
    let th = ThetaModel { base: alg, action };
    let d = sd.dim();
    let mut checked = 0;
    let mut exhaustive = true;
    for s in 1..=max_arity {
        let total = (d as u128).pow(s as u32);
        let (count, stride) = match limit {
            Some(l) if (l as u128) < total => {
                exhaustive = false;
                (l as u128, (total / l as u128) | 1)
            }
            _ => (total, 1),
        };
        for i in 0..count {
            let mut idx = (i * stride) % total;
            let mut key = vec![0usize; s];
            for t in (0..s).rev() {
                key[t] = (idx % d as u128) as usize;
                idx /= d as u128;
            }
            let xs: Vec<Elem> = key.iter().map(|&b| basis_elem(d, b)).collect();
            let refs: Vec<&Elem> = xs.iter().collect();
            let fx: Vec<Elem> = xs.iter().map(|x| th.fourier(x)).collect();
            let frefs: Vec<&Elem> = fx.iter().collect();
            let lhs = th.mu(&frefs);
            let rhs = th.fourier(&alg.trunc.apply_elem(sd.mu(&refs)));
            checked += 1;
            if lhs != rhs {
                return FourierCertificate {
                    group_order: action.gamma.order(),
                    characters: action.num_characters(),
                    max_arity,
                    tuples_checked: checked,
                    exhaustive,
                    passed: false,
                    failure: Some(key.iter().map(|&b| sd.label(b)).collect()),
                };
            }
        }
    }
    FourierCertificate {
        group_order: action.gamma.order(),
        characters: action.num_characters(),
        max_arity,
        tuples_checked: checked,
        exhaustive,
        passed: true,
        failure: None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterUnitCertificate {
    pub character: Vec<u32>,
    /// `e x chi` is closed from `(L, alpha)` to `(L, chi alpha)`.
    pub forward_closed: bool,
    /// `e x chi^-1` is closed in the opposite direction.
    pub backward_closed: bool,
    /// Both compositions equal `e x 1`.
    pub compositions_are_unit: bool,
}

impl CharacterUnitCertificate {
    pub fn passed(&self) -> bool {
        self.forward_closed && self.backward_closed && self.compositions_are_unit
    }
}

/// Unit checks for `e x chi` between the twisted objects `(L, alpha)` and
/// `(L, chi . alpha)` in the semidirect product, at total arity `max_total`.
pub fn character_unit_check(base: &dyn AInf, action: &GroupAction, unit: usize, alpha: &Elem, chi: usize, max_total: usize) -> CharacterUnitCertificate {
    let sd = Semidirect::new(base, action);
    let one = action.char_one();
    let inv = action.char_inv(chi);
    let a = sd.tensor(alpha, one);
    let ca = sd.tensor(&action.act(chi, alpha), one);
    let e = basis_elem(base.dim(), unit);
    let e_chi = sd.tensor(&e, chi);
    let e_inv = sd.tensor(&e, inv);
    let e_one = sd.tensor(&e, one);
    let fwd = sd.twisted(&[&ca, &a], &[&e_chi], max_total);
    let bwd = sd.twisted(&[&a, &ca], &[&e_inv], max_total);
    let c1 = sd.twisted(&[&ca, &a, &ca], &[&e_chi, &e_inv], max_total);
    let c2 = sd.twisted(&[&a, &ca, &a], &[&e_inv, &e_chi], max_total);
    let zero = |x: &Elem| x.iter().all(Poly::is_zero);
    CharacterUnitCertificate {
        character: action.characters[chi].clone(),
        forward_closed: zero(&fwd),
        backward_closed: zero(&bwd),
        compositions_are_unit: zero(&elem_sub(&c1, &e_one)) && zero(&elem_sub(&c2, &e_one)),
    }
}

/// Characters as a set, for reports.
pub fn character_set(action: &GroupAction) -> BTreeSet<Vec<u32>> {
    action.characters.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfinity::ainf_verify;

    fn z2_on_exterior() -> (AInfAlgebra, GroupAction) {
        let alg = AInfAlgebra::exterior(1);
        let action = GroupAction::new(FiniteAbelian::new(vec![2], vec![]).unwrap(), vec![0, 1], Vec::new(), Scalar::int(-1)).unwrap();
        (alg, action)
    }

    #[test]
    fn type_a_group_matches_characters() {
        let g = FiniteAbelian::type_a(4, 3);
        assert_eq!(g.order(), 27);
        let chars = g.characters();
        assert_eq!(chars.len(), 27);
        assert!(chars.iter().all(|c| c.iter().sum::<u32>() % 3 == 0));
    }

    #[test]
    fn trivial_group_gives_the_algebra() {
        let alg = AInfAlgebra::exterior(2);
        let action = GroupAction::trivial(alg.dim());
        let sd = Semidirect::new(&alg, &action);
        assert_eq!(sd.dim(), alg.dim());
        let t = crate::ainfinity::tabulate(&sd, alg.labels.clone(), alg.vars.clone(), 3);
        assert_eq!(t.mu, alg.mu);
    }

    #[test]
    fn fourier_is_strict_on_z2_toy() {
        let (alg, action) = z2_on_exterior();
        action.check_strict(&alg).unwrap();
        let c = fourier_check(&alg, &action, 3, None);
        assert!(c.passed && c.exhaustive, "{c:?}");
        assert_eq!(c.tuples_checked, 4 + 16 + 64);
    }

    #[test]
    fn semidirect_product_is_ainfinity() {
        let (alg, action) = z2_on_exterior();
        let sd = Semidirect::new(&alg, &action);
        let labels = (0..sd.dim()).map(|b| sd.label(b)).collect();
        let t = crate::ainfinity::tabulate(&sd, labels, alg.vars.clone(), 3);
        assert!(ainf_verify(&t, None).passed);
    }

    #[test]
    fn character_units_on_clifford_toy() {
        // mu^2(t1, t1) = -e is Gamma-strict for Z/2 with t1 odd-degree; v t1 is
        // a weak bounding cochain and chi . (v t1) = -v t1.
        let (mut alg, action) = z2_on_exterior();
        alg.mu.add_term(&[1, 1], 0, &Poly::int(-1));
        action.check_strict(&alg).unwrap();
        let alpha = vec![Poly::zero(), Poly::int(3)];
        let c = character_unit_check(&alg, &action, 0, &alpha, 1, 4);
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn non_strict_grading_is_rejected() {
        let (mut alg, action) = z2_on_exterior();
        alg.mu.add_term(&[1, 1], 1, &Poly::int(1));
        assert!(action.check_strict(&alg).is_err());
    }
}

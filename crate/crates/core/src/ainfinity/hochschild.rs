//! Hochschild cochain operations: Gerstenhaber product and bracket, the
//! differential `[mu, -]`, the Yoneda product, the cap product on one-pointed
//! chains, and the Euler cochain.

use std::collections::BTreeMap;

use super::{sign, Cochain, Truncation};
use crate::poly::Poly;
use crate::scalar::Scalar;

fn red(parity: &[u8], keys: &[usize]) -> usize {
    keys.iter().map(|&b| parity[b] as usize + 1).sum()
}

/// `(phi o psi)(a_s..a_1) = sum (-1)^(sigma'(psi) * maltese^i_1) phi(.., psi(..), a_i..a_1)`,
/// keeping composites of arity at most `max_arity`.
pub fn gerstenhaber(phi: &Cochain, psi: &Cochain, parity: &[u8], max_arity: usize, trunc: &Truncation) -> Cochain {
    let by_out = psi.by_output();
    let mut out = Cochain::new();
    for (t, outs) in &phi.terms {
        let p = t.len();
        for slot in 0..p {
            let Some(list) = by_out.get(&t[slot]) else { continue };
            let right = red(parity, &t[slot + 1..]);
            for (u, c) in list {
                if p - 1 + u.len() > max_arity {
                    continue;
                }
                let psi_red = (Cochain::term_parity(u, t[slot], parity) as usize + 1) % 2;
                let s = sign(psi_red * right % 2 == 1);
                let mut key = t[..slot].to_vec();
                key.extend_from_slice(u);
                key.extend_from_slice(&t[slot + 1..]);
                for (o, d) in outs {
                    out.add_term(&key, *o, &trunc.apply((*c * d).scale(&s)));
                }
            }
        }
    }
    out
}

/// `[phi, psi] = phi o psi - (-1)^(sigma'(phi) sigma'(psi)) psi o phi`, extended bilinearly.
pub fn bracket(phi: &Cochain, psi: &Cochain, parity: &[u8], max_arity: usize, trunc: &Truncation) -> Cochain {
    let pp = phi.parity_parts(parity);
    let qq = psi.parity_parts(parity);
    let mut out = Cochain::new();
    for (a, x) in pp.iter().enumerate() {
        for (b, y) in qq.iter().enumerate() {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            out.add(&gerstenhaber(x, y, parity, max_arity, trunc), &Scalar::one());
            let s = sign((a + 1) * (b + 1) % 2 == 1);
            out.add(&gerstenhaber(y, x, parity, max_arity, trunc), &(-&s));
        }
    }
    out
}

/// Hochschild differential `delta phi = [mu, phi]`.
pub fn differential(mu: &Cochain, phi: &Cochain, parity: &[u8], max_arity: usize, trunc: &Truncation) -> Cochain {
    bracket(mu, phi, parity, max_arity, trunc)
}

/// Yoneda product
/// `phi * psi(a_s..a_1) = sum (-1)^(sigma'(phi) maltese^k_1 + sigma'(psi) maltese^i_1)
///  mu(a_s.., phi(a_l..a_(k+1)), a_k.., psi(a_j..a_(i+1)), a_i..a_1)`.
///
/// The sign for `psi` counts only the inputs to its right, as in the
/// Gerstenhaber product; counting its own inputs as well does not send
/// cocycles to cocycles.
pub fn yoneda(mu: &Cochain, phi: &Cochain, psi: &Cochain, parity: &[u8], max_arity: usize, trunc: &Truncation) -> Cochain {
    let phi_out = phi.by_output();
    let psi_out = psi.by_output();
    let mut out = Cochain::new();
    for (m, outs) in &mu.terms {
        let p = m.len();
        for sf in 0..p {
            let Some(fl) = phi_out.get(&m[sf]) else { continue };
            for sp in sf + 1..p {
                let Some(pl) = psi_out.get(&m[sp]) else { continue };
                let between = red(parity, &m[sf + 1..sp]);
                let right = red(parity, &m[sp + 1..]);
                for (fk, fc) in fl {
                    let f_red = (Cochain::term_parity(fk, m[sf], parity) as usize + 1) % 2;
                    for (pk, pc) in pl {
                        if p - 2 + fk.len() + pk.len() > max_arity {
                            continue;
                        }
                        let p_red = (Cochain::term_parity(pk, m[sp], parity) as usize + 1) % 2;
                        let psi_ins = red(parity, pk);
                        let e = f_red * (between + psi_ins + right) + p_red * right;
                        let s = sign(e % 2 == 1);
                        let mut key = m[..sf].to_vec();
                        key.extend_from_slice(fk);
                        key.extend_from_slice(&m[sf + 1..sp]);
                        key.extend_from_slice(pk);
                        key.extend_from_slice(&m[sp + 1..]);
                        let c = &(*fc * *pc).scale(&s);
                        for (o, d) in outs {
                            out.add_term(&key, *o, &trunc.apply(c * d));
                        }
                    }
                }
            }
        }
    }
    out
}

/// One-pointed Hochschild chains `m (x) a_s (x) .. (x) a_1`, keyed by `[m, a_s, .., a_1]`.
pub type Chain = BTreeMap<Vec<usize>, Poly>;

/// Cap product `alpha cap (m (x) a_s .. a_1)` with coefficients in the diagonal
/// bimodule, `mu^(k|1|l) = (-1)^(maltese^(|1)_(|l) + 1) mu^(k+1+l)`.
pub fn cap(mu: &Cochain, alpha: &Cochain, chain: &Chain, parity: &[u8], trunc: &Truncation) -> Chain {
    let mut out = Chain::new();
    for (key, coeff) in chain {
        let m = key[0];
        let a = &key[1..];
        let s = a.len();
        // a_idx for idx in 1..=s sits at position s - idx.
        let seg = |hi: usize, lo: usize| -> &[usize] { &a[s - hi..s - lo] };
        let mal = |hi: usize, lo: usize| red(parity, seg(hi, lo));
        for l in 0..=s {
            for k in 0..=l {
                let Some(al) = alpha.terms.get(seg(l, k)) else { continue };
                for j in 0..=k {
                    for i in 0..=j {
                        let diamond = mal(i, 0) * (parity[m] as usize + mal(s, i)) + mal(j, i);
                        for (o, c) in al {
                            let a_red = (Cochain::term_parity(seg(l, k), *o, parity) as usize + 1) % 2;
                            let d = diamond + a_red * mal(k, i);
                            let mut ins = seg(i, 0).to_vec();
                            ins.push(m);
                            let mut right = seg(s, l).to_vec();
                            right.push(*o);
                            right.extend_from_slice(seg(k, j));
                            let bimod = red(parity, &right) + 1;
                            ins.extend_from_slice(&right);
                            let Some(res) = mu.terms.get(&ins) else { continue };
                            let sg = sign((d + bimod) % 2 == 1);
                            let c = &(coeff * c).scale(&sg);
                            for (r, p) in res {
                                let mut nk = vec![*r];
                                nk.extend_from_slice(seg(j, i));
                                let e = out.entry(nk.clone()).or_default();
                                *e = &*e + &trunc.apply(c * p);
                                if e.is_zero() {
                                    out.remove(&nk);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Euler cochain `tau(x) = deg(x) x`.
pub fn euler_cochain(deg: &[i64]) -> Cochain {
    let mut t = Cochain::new();
    for (b, &d) in deg.iter().enumerate() {
        t.add_term(&[b], b, &Poly::int(d));
    }
    t
}

/// Checks `[mu, tau] = (sum deg(inputs) - deg(output)) mu` entry by entry.
pub fn euler_identity_holds(mu: &Cochain, deg: &[i64], parity: &[u8]) -> bool {
    let max = mu.max_arity().unwrap_or(0);
    let lhs = bracket(mu, &euler_cochain(deg), parity, max, &Truncation::none());
    let mut rhs = Cochain::new();
    for (k, outs) in &mu.terms {
        let w: i64 = k.iter().map(|&b| deg[b]).sum();
        for (o, p) in outs {
            rhs.add_term(k, *o, &p.scale(&Scalar::int(w - deg[*o])));
        }
    }
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::super::AInfAlgebra;
    use super::*;

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self, m: i64) -> i64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 33) % (2 * m as u64 + 1)) as i64 - m
        }
    }

    fn random_cochain(rng: &mut Lcg, dim: usize, arity: usize, density: i64) -> Cochain {
        let mut c = Cochain::new();
        let mut key = vec![0usize; arity];
        loop {
            for o in 0..dim {
                if rng.next(density) == 0 {
                    c.add_term(&key, o, &Poly::int(rng.next(3)));
                }
            }
            let mut t = arity;
            loop {
                if t == 0 {
                    return c;
                }
                t -= 1;
                key[t] += 1;
                if key[t] < dim {
                    break;
                }
                key[t] = 0;
            }
        }
    }

    #[test]
    fn differential_squares_to_zero() {
        let alg = AInfAlgebra::exterior(2);
        let mut rng = Lcg(7);
        for _ in 0..5 {
            let phi = random_cochain(&mut rng, 4, 1, 1);
            let t = Truncation::none();
            let d1 = differential(&alg.mu, &phi, &alg.parity, 6, &t);
            assert!(!d1.is_zero() || phi.is_zero());
            let d2 = differential(&alg.mu, &d1, &alg.parity, 6, &t);
            assert!(d2.is_zero(), "delta^2 = {:?}", d2);
        }
    }

    #[test]
    fn mu2_bracket_detects_associativity() {
        let alg = AInfAlgebra::exterior(2);
        let t = Truncation::none();
        assert!(bracket(&alg.mu, &alg.mu, &alg.parity, 3, &t).is_zero());
        let mut bad = alg.mu.clone();
        bad.add_term(&[1, 0], 1, &Poly::one());
        assert!(!bracket(&bad, &bad, &alg.parity, 3, &t).is_zero());
    }

    #[test]
    fn graded_jacobi() {
        let parity = vec![0, 1, 1, 0];
        let mut rng = Lcg(11);
        let t = Truncation::none();
        for _ in 0..4 {
            let x = random_cochain(&mut rng, 4, 1, 2);
            let y = random_cochain(&mut rng, 4, 2, 3);
            let z = random_cochain(&mut rng, 4, 1, 2);
            let mut total = Cochain::new();
            let parts = |c: &Cochain| c.parity_parts(&parity);
            for (a, xa) in parts(&x).iter().enumerate() {
                for (b, yb) in parts(&y).iter().enumerate() {
                    for (c, zc) in parts(&z).iter().enumerate() {
                        let (ra, rb, rc) = (a + 1, b + 1, c + 1);
                        let t1 = bracket(xa, &bracket(yb, zc, &parity, 8, &t), &parity, 8, &t);
                        let t2 = bracket(yb, &bracket(zc, xa, &parity, 8, &t), &parity, 8, &t);
                        let t3 = bracket(zc, &bracket(xa, yb, &parity, 8, &t), &parity, 8, &t);
                        total.add(&t1, &sign(ra * rc % 2 == 1));
                        total.add(&t2, &sign(rb * ra % 2 == 1));
                        total.add(&t3, &sign(rc * rb % 2 == 1));
                    }
                }
            }
            assert!(total.is_zero(), "Jacobi defect {total:?}");
        }
    }

    fn exterior_cocycles(alg: &AInfAlgebra) -> Vec<Cochain> {
        use crate::linalg::Matrix;
        let t = Truncation::none();
        let d = alg.labels.len();
        let mut cands = vec![euler_cochain(&alg.zdeg)];
        for m in [0usize, 3] {
            let mut c = Cochain::new();
            c.add_term(&[], m, &Poly::one());
            cands.push(c);
        }
        // Kernel of delta on length-1 cochains.
        let elems: Vec<Cochain> = (0..d * d)
            .map(|k| {
                let mut c = Cochain::new();
                c.add_term(&[k / d], k % d, &Poly::one());
                c
            })
            .collect();
        let images: Vec<Cochain> = elems.iter().map(|c| differential(&alg.mu, c, &alg.parity, 4, &t)).collect();
        let mut rows: Vec<(Vec<usize>, usize)> = images.iter().flat_map(|c| c.terms.iter().flat_map(|(k, o)| o.keys().map(move |x| (k.clone(), *x)))).collect();
        rows.sort();
        rows.dedup();
        let mut m = Matrix::zeros(rows.len(), elems.len());
        for (j, c) in images.iter().enumerate() {
            for (k, outs) in &c.terms {
                for (o, p) in outs {
                    let i = rows.binary_search(&(k.clone(), *o)).unwrap();
                    m[(i, j)] = p.constant_term();
                }
            }
        }
        for v in m.kernel() {
            let mut c = Cochain::new();
            for (j, x) in v.iter().enumerate() {
                c.add(&elems[j], x);
            }
            cands.push(c);
        }
        for c in &cands {
            assert!(differential(&alg.mu, c, &alg.parity, 4, &t).is_zero());
        }
        cands
    }

    #[test]
    fn yoneda_of_cocycles_is_cocycle() {
        let alg = AInfAlgebra::exterior(2);
        let t = Truncation::none();
        let cocycles = exterior_cocycles(&alg);
        assert!(cocycles.len() >= 3, "only {} cocycles", cocycles.len());
        for x in &cocycles {
            for y in &cocycles {
                let p = yoneda(&alg.mu, x, y, &alg.parity, 6, &t);
                let d = differential(&alg.mu, &p, &alg.parity, 6, &t);
                assert!(d.is_zero(), "delta(x*y) = {d:?}");
            }
        }
    }

    #[test]
    fn unit_caps_to_identity() {
        let alg = AInfAlgebra::exterior(2);
        let mut e = Cochain::new();
        e.add_term(&[], 0, &Poly::one());
        let t = Truncation::none();
        for key in [vec![1], vec![3, 1], vec![2, 1, 2], vec![1, 2, 3, 1]] {
            let mut c = Chain::new();
            c.insert(key.clone(), Poly::one());
            let r = cap(&alg.mu, &e, &c, &alg.parity, &t);
            assert_eq!(r, c, "e cap {key:?}");
        }
    }

    #[test]
    fn euler_identity() {
        let alg = AInfAlgebra::exterior(3);
        assert!(euler_identity_holds(&alg.mu, &alg.zdeg, &alg.parity));
        let mut rng = Lcg(3);
        let mut mu = random_cochain(&mut rng, 4, 3, 2);
        mu.add(&random_cochain(&mut rng, 4, 2, 2), &Scalar::one());
        assert!(euler_identity_holds(&mu, &[0, 1, -1, 3], &[0, 1, 1, 0]));
    }
}

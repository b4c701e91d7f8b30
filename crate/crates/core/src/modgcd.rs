//! Multivariate gcd by dense modular interpolation (Brown's algorithm).
//!
//! Images are computed modulo 31-bit primes, one variable at a time,
//! then lifted by Chinese remaindering and rational reconstruction. Every
//! candidate is checked by exact division before it is returned.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{Monomial, Poly, Symbol};

type Exps = Vec<u32>;
type MPoly = BTreeMap<Exps, u64>;
type UPoly = Vec<u64>;

const MAX_PRIMES: usize = 64;

fn primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| {
        let mut out = Vec::new();
        let mut n = (1u64 << 31) - 1;
        while out.len() < MAX_PRIMES {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

// primes stay below 2^31 so products fit a word
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// dense univariate, lowest power first, no trailing zeros

fn trim(mut a: UPoly) -> UPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn u_eval(a: &UPoly, x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, c| (mul_mod(acc, x, p) + c) % p)
}

fn u_scale(a: &UPoly, c: u64, p: u64) -> UPoly {
    trim(a.iter().map(|v| mul_mod(*v, c, p)).collect())
}

fn u_add(a: &UPoly, b: &UPoly, p: u64) -> UPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|k| (a.get(k).copied().unwrap_or(0) + b.get(k).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn u_mul(a: &UPoly, b: &UPoly, p: u64) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(*x, *y, p)) % p;
        }
    }
    trim(out)
}

fn u_divrem(a: &UPoly, b: &UPoly, p: u64) -> (UPoly, UPoly) {
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = mul_mod(*r.last().unwrap(), inv, p);
        q[shift] = f;
        for (k, c) in b.iter().enumerate() {
            r[k + shift] = (r[k + shift] + p - mul_mod(f, *c, p)) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn u_monic(a: &UPoly, p: u64) -> UPoly {
    match a.last() {
        Some(&lc) => u_scale(a, inv_mod(lc, p), p),
        None => Vec::new(),
    }
}

fn u_gcd(a: &UPoly, b: &UPoly, p: u64) -> UPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = u_divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    u_monic(&a, p)
}

// sparse multivariate modulo p, lex order with the first variable highest

fn lead(a: &MPoly) -> Option<(&Exps, u64)> {
    a.iter().next_back().map(|(e, c)| (e, *c))
}

fn m_monic(a: MPoly, p: u64) -> MPoly {
    let Some((_, lc)) = lead(&a) else { return a };
    let inv = inv_mod(lc, p);
    a.into_iter().map(|(e, c)| (e, mul_mod(c, inv, p))).collect()
}

/// Coefficients in the last variable, keyed by the remaining exponents.
fn split_last(a: &MPoly, p: u64) -> BTreeMap<Exps, UPoly> {
    let mut out: BTreeMap<Exps, UPoly> = BTreeMap::new();
    for (e, c) in a {
        let (rest, k) = (e[..e.len() - 1].to_vec(), e[e.len() - 1] as usize);
        let u = out.entry(rest).or_default();
        if u.len() <= k {
            u.resize(k + 1, 0);
        }
        u[k] = (u[k] + c) % p;
    }
    out
}

fn join_last(parts: &BTreeMap<Exps, UPoly>) -> MPoly {
    let mut out = MPoly::new();
    for (rest, u) in parts {
        for (k, c) in u.iter().enumerate() {
            if *c != 0 {
                let mut e = rest.clone();
                e.push(k as u32);
                out.insert(e, *c);
            }
        }
    }
    out
}

fn eval_parts(parts: &BTreeMap<Exps, UPoly>, x: u64, p: u64) -> MPoly {
    parts
        .iter()
        .filter_map(|(e, u)| {
            let v = u_eval(u, x, p);
            (v != 0).then(|| (e.clone(), v))
        })
        .collect()
}

fn m_mul(a: &MPoly, b: &MPoly, p: u64) -> MPoly {
    let mut out = MPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let v = out.entry(e).or_insert(0);
            *v = (*v + mul_mod(*ca, *cb, p)) % p;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Whether `d` divides `a` exactly.
fn m_divides(d: &MPoly, a: &MPoly, p: u64) -> bool {
    let Some((ld, lc)) = lead(d) else { return false };
    let (ld, inv) = (ld.clone(), inv_mod(lc, p));
    let mut r = a.clone();
    while let Some((lr, cr)) = lead(&r) {
        if lr.iter().zip(&ld).any(|(x, y)| x < y) {
            return false;
        }
        let shift: Exps = lr.iter().zip(&ld).map(|(x, y)| x - y).collect();
        let f = mul_mod(cr, inv, p);
        for (e, c) in d {
            let k: Exps = e.iter().zip(&shift).map(|(x, y)| x + y).collect();
            let v = (r.get(&k).copied().unwrap_or(0) + p - mul_mod(f, *c, p)) % p;
            if v == 0 {
                r.remove(&k);
            } else {
                r.insert(k, v);
            }
        }
    }
    true
}

fn constant(n: usize, c: u64) -> MPoly {
    let mut out = MPoly::new();
    out.insert(vec![0; n], c);
    out
}

fn content(parts: &BTreeMap<Exps, UPoly>, p: u64) -> UPoly {
    let mut g: UPoly = Vec::new();
    for u in parts.values() {
        g = u_gcd(&g, u, p);
        if g.len() == 1 {
            break;
        }
    }
    g
}

fn divide_parts(parts: &BTreeMap<Exps, UPoly>, c: &UPoly, p: u64) -> BTreeMap<Exps, UPoly> {
    parts
        .iter()
        .map(|(e, u)| (e.clone(), u_divrem(u, c, p).0))
        .collect()
}

/// Monic gcd of two nonzero polynomials in `n` variables modulo `p`.
fn pgcd(a: &MPoly, b: &MPoly, n: usize, p: u64) -> MPoly {
    if n == 0 {
        return constant(0, 1);
    }
    let (pa, pb) = (split_last(a, p), split_last(b, p));
    if n == 1 {
        let g = u_gcd(&pa[&Vec::new()], &pb[&Vec::new()], p);
        let mut one = BTreeMap::new();
        one.insert(Vec::new(), g);
        return join_last(&one);
    }
    let (ca, cb) = (content(&pa, p), content(&pb, p));
    let c = u_gcd(&ca, &cb, p);
    let (pa, pb) = (divide_parts(&pa, &ca, p), divide_parts(&pb, &cb, p));
    let la = pa.values().next_back().unwrap().clone();
    let lb = pb.values().next_back().unwrap().clone();
    let gamma = u_gcd(&la, &lb, p);
    let deg = |m: &BTreeMap<Exps, UPoly>| m.values().map(|u| u.len() - 1).max().unwrap_or(0);
    let bound = gamma.len() - 1 + deg(&pa).min(deg(&pb));
    let (a1, b1) = (join_last(&pa), join_last(&pb));
    let primitive = |parts: &BTreeMap<Exps, UPoly>| join_last(&divide_parts(parts, &content(parts, p), p));
    let finish = |pp: &MPoly| -> MPoly {
        let mut cy = BTreeMap::new();
        cy.insert(vec![0; n - 1], c.clone());
        m_monic(m_mul(pp, &join_last(&cy), p), p)
    };

    let mut interp: Option<(Exps, BTreeMap<Exps, UPoly>)> = None;
    let mut modulus: UPoly = vec![1];
    let mut points = 0usize;
    let mut x = 0u64;
    while x < p - 1 {
        x += 1;
        let gx = u_eval(&gamma, x, p);
        if gx == 0 || u_eval(&la, x, p) == 0 || u_eval(&lb, x, p) == 0 {
            continue;
        }
        let image = pgcd(&eval_parts(&pa, x, p), &eval_parts(&pb, x, p), n - 1, p);
        let image: MPoly = image.into_iter().map(|(e, v)| (e, mul_mod(v, gx, p))).collect();
        let lm = lead(&image).unwrap().0.clone();
        if lm.iter().all(|e| *e == 0) {
            let mut one = BTreeMap::new();
            one.insert(vec![0; n - 1], c.clone());
            return m_monic(join_last(&one), p);
        }
        let stable = match &mut interp {
            Some((cur, _)) if lm > *cur => continue,
            Some((cur, parts)) if lm == *cur => {
                let qx = u_eval(&modulus, x, p);
                let scale = inv_mod(qx, p);
                let mut keys: Vec<Exps> = parts.keys().cloned().collect();
                keys.extend(image.keys().cloned());
                let mut changed = false;
                for k in keys {
                    let old = parts.get(&k).cloned().unwrap_or_default();
                    let want = image.get(&k).copied().unwrap_or(0);
                    let diff = (want + p - u_eval(&old, x, p)) % p;
                    if diff != 0 {
                        changed = true;
                        let upd = u_add(&old, &u_scale(&modulus, mul_mod(diff, scale, p), p), p);
                        if upd.is_empty() {
                            parts.remove(&k);
                        } else {
                            parts.insert(k, upd);
                        }
                    }
                }
                modulus = u_mul(&modulus, &vec![p - x, 1], p);
                points += 1;
                !changed
            }
            _ => {
                let parts = image.into_iter().map(|(e, v)| (e, vec![v])).collect();
                interp = Some((lm, parts));
                modulus = vec![p - x, 1];
                points = 1;
                false
            }
        };
        let parts = &interp.as_ref().unwrap().1;
        if stable || points > bound {
            let pp = primitive(parts);
            if points > bound || (m_divides(&pp, &a1, p) && m_divides(&pp, &b1, p)) {
                return finish(&pp);
            }
        }
    }
    unreachable!("field exhausted without a good evaluation point")
}

fn to_mod(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits a word")
}

fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Monic gcd over the rationals, or `None` when the modular images never
/// produce a verified candidate.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let mut vars: Vec<Symbol> = a.symbols().into_iter().collect();
    for s in b.symbols() {
        if !vars.contains(&s) {
            vars.push(s);
        }
    }
    vars.sort();
    let n = vars.len();
    let ints = |q: &Poly| -> Vec<(Exps, BigInt)> {
        q.integer_primitive()
            .terms()
            .map(|(m, c)| (vars.iter().map(|s| m.exponent(s)).collect(), c.numer().clone()))
            .collect()
    };
    let (ia, ib) = (ints(a), ints(b));
    let lex_lead = |v: &[(Exps, BigInt)]| v.iter().max_by(|x, y| x.0.cmp(&y.0)).unwrap().clone();
    let (la, lb) = (lex_lead(&ia), lex_lead(&ib));

    let mut acc: Option<(Exps, BTreeMap<Exps, BigInt>, BigInt)> = None;
    let mut last: Option<Poly> = None;
    for &p in primes() {
        if to_mod(&la.1, p) == 0 || to_mod(&lb.1, p) == 0 {
            continue;
        }
        let reduce = |v: &[(Exps, BigInt)]| -> MPoly {
            v.iter()
                .map(|(e, c)| (e.clone(), to_mod(c, p)))
                .filter(|(_, c)| *c != 0)
                .collect()
        };
        let g = pgcd(&reduce(&ia), &reduce(&ib), n, p);
        let lm = lead(&g).unwrap().0.clone();
        if lm.iter().all(|e| *e == 0) {
            return Some(Poly::one());
        }
        match &mut acc {
            Some((cur, _, _)) if lm > *cur => continue,
            Some((cur, coeffs, m)) if lm == *cur => {
                let pb = BigInt::from(p);
                let inv = BigInt::from(inv_mod(to_mod(m, p), p));
                let mut keys: Vec<Exps> = coeffs.keys().cloned().collect();
                keys.extend(g.keys().cloned());
                for k in keys {
                    let r1 = coeffs.get(&k).cloned().unwrap_or_default();
                    let r2 = BigInt::from(g.get(&k).copied().unwrap_or(0));
                    let t = ((&r2 - &r1) * &inv).mod_floor(&pb);
                    coeffs.insert(k, r1 + &*m * t);
                }
                *m *= pb;
            }
            _ => {
                let coeffs = g.iter().map(|(e, c)| (e.clone(), BigInt::from(*c))).collect();
                acc = Some((lm, coeffs, BigInt::from(p)));
            }
        }
        let (_, coeffs, m) = acc.as_ref().unwrap();
        let mut cand = Poly::zero();
        let mut ok = true;
        for (e, r) in coeffs {
            if r.sign() == Sign::NoSign {
                continue;
            }
            let Some(q) = rational_reconstruct(r, m) else {
                ok = false;
                break;
            };
            let pairs = vars.iter().cloned().zip(e.iter().copied()).filter(|(_, k)| *k > 0).collect();
            cand = &cand + &Poly::term(q, Monomial::from_pairs(pairs));
        }
        if !ok {
            continue;
        }
        if (last.as_ref() == Some(&cand) || last.is_none())
            && a.div_exact(&cand).is_some()
            && b.div_exact(&cand).is_some()
        {
            return Some(cand.monic());
        }
        last = Some(cand);
    }
    None
}

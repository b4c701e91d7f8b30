//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic over the fixed [`Symbol`] order. The last entry of the
//! map is therefore the leading term.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A named variable: base symbol, parameter or jet coordinate.
///
/// Symbols order base names before jet coordinates (names carrying `'` or
/// `_`), then by name. This order is global and fixes every canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_jet_like(&self) -> bool {
        self.0.contains('\'') || self.0.contains('_')
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.is_jet_like()
            .cmp(&other.is_jet_like())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Power product of symbols, stored sorted by symbol with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Symbol, u32)>) -> Self {
        pairs.retain(|(_, e)| *e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(pairs.len());
        for (s, e) in pairs {
            match out.last_mut() {
                Some((last, le)) if *last == s => *le += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .binary_search_by(|(v, _)| v.cmp(s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.0.iter().map(|(s, _)| s)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (s, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *s {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *s {
                let oe = other.0[j].1;
                j += 1;
                match e.cmp(&oe) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s.clone(), e - oe)),
                }
            } else {
                out.push((s.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (s, e) in &self.0 {
            let oe = other.exponent(s);
            if oe > 0 {
                out.push((s.clone(), (*e).min(oe)));
            }
        }
        Monomial(out)
    }

    /// Splits off the power of `s`: returns `(exponent, remaining monomial)`.
    pub fn split_off(&self, s: &Symbol) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for (v, e) in &self.0 {
            if v == s {
                exp = *e;
            } else {
                rest.push((v.clone(), *e));
            }
        }
        (exp, Monomial(rest))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order; the smallest symbol is the most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn integer(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn var(s: Symbol) -> Self {
        Poly::term(BigRational::one(), Monomial::var(s))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.symbols().cloned())
            .collect()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) > 0)
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.mul(mono), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn diff(&self, s: &Symbol) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            if e == 0 {
                continue;
            }
            let nm = if e == 1 {
                rest
            } else {
                rest.mul(&Monomial::from_pairs(vec![(s.clone(), e - 1)]))
            };
            out.add_term(nm, c * rat(e as i64));
        }
        out
    }

    /// Coefficients as a polynomial in `s`, indexed by degree.
    pub fn coefficients_in(&self, s: &Symbol) -> Vec<Poly> {
        let deg = self.degree_in(s) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    fn coefficient_of_power(&self, s: &Symbol, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            if e == k {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Scales to integer coefficients with unit content and positive leading coefficient.
    /// Integer numerators over the common denominator.
    fn integer_terms(&self) -> (Vec<(&Monomial, BigInt)>, BigInt) {
        let d = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { acc.lcm(c.denom()) });
        let out = self
            .terms
            .iter()
            .map(|(m, c)| {
                let n = if d.is_one() { c.numer().clone() } else { c.numer() * (&d / c.denom()) };
                (m, n)
            })
            .collect();
        (out, d)
    }

    pub fn integer_primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&lcm / c.denom());
            g = g.gcd(&n);
        }
        let mut factor = BigRational::new(lcm, g);
        if self.leading_coefficient().is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), -(dc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Simultaneous substitution of polynomials for symbols.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Poly>) -> Poly {
        let mut cache: HashMap<(Symbol, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut prod = Poly::constant(c.clone());
            for (s, e) in m.factors() {
                match map.get(s) {
                    Some(p) => {
                        let pw = cache
                            .entry((s.clone(), *e))
                            .or_insert_with(|| p.pow(*e))
                            .clone();
                        prod = &prod * &pw;
                    }
                    None => kept.push((s.clone(), *e)),
                }
            }
            if !kept.is_empty() {
                prod = prod.mul_monomial(&Monomial::from_pairs(kept), &BigRational::one());
            }
            out = &out + &prod;
        }
        out
    }

    /// Evaluates in any commutative ring given coefficient and variable maps.
    pub fn eval_with<T, C, V>(&self, coeff: C, var: V) -> T
    where
        T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
        C: Fn(&BigRational) -> T,
        V: Fn(&Symbol) -> T,
    {
        let mut cache: HashMap<Symbol, T> = HashMap::new();
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut term = coeff(c);
            for (s, e) in m.factors() {
                let x = cache.entry(s.clone()).or_insert_with(|| var(s)).clone();
                for _ in 0..*e {
                    term = term * x.clone();
                }
            }
            total = total + term;
        }
        total
    }

    /// Rewrites every occurrence of `lead` by `replacement` until no term is
    /// divisible by `lead`.
    pub fn reduce_by(&self, lead: &Monomial, replacement: &Poly) -> Poly {
        let mut current = self.clone();
        loop {
            let mut changed = false;
            let mut next = Poly::zero();
            for (m, c) in &current.terms {
                match m.div(lead) {
                    Some(rest) => {
                        changed = true;
                        next = &next + &replacement.mul_monomial(&rest, c);
                    }
                    None => next.add_term(m.clone(), c.clone()),
                }
            }
            current = next;
            if !changed {
                return current;
            }
        }
    }

    fn content_in(&self, s: &Symbol) -> Poly {
        let mut g: Option<Poly> = None;
        for c in self.coefficients_in(s).into_iter().filter(|c| !c.is_zero()) {
            g = Some(match g {
                None => c.monic(),
                Some(prev) => gcd(&prev, &c),
            });
            if g.as_ref().is_some_and(Poly::is_constant) {
                return Poly::one();
            }
        }
        g.unwrap_or_else(Poly::zero)
    }

    fn primitive_part_in(&self, s: &Symbol) -> Poly {
        let c = self.content_in(s);
        self.div_exact(&c)
            .expect("content divides its polynomial")
            .integer_primitive()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        // integer accumulation avoids a gcd per coefficient product
        let (ia, da) = self.integer_terms();
        let (ib, db) = rhs.integer_terms();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(ia.len() * ib.len());
        for (ma, ca) in &ia {
            for (mb, cb) in &ib {
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += c,
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                }
            }
        }
        let d = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| {
                let q = if d.is_one() {
                    BigRational::from_integer(c)
                } else {
                    BigRational::new(c, d.clone())
                };
                (m, q)
            })
            .collect();
        Poly { terms }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Monic greatest common divisor over the rationals.
///
/// Modular images first; a primitive pseudo-remainder sequence is the
/// fallback when no verified modular candidate appears.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    if a.len() == 1 || b.len() == 1 {
        let (mono, other) = if a.len() == 1 { (a, b) } else { (b, a) };
        let mut g = mono.leading().unwrap().0.clone();
        for (m, _) in other.terms() {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        return Poly::term(BigRational::one(), g);
    }
    // split and CR checks keep asking for the same denominator gcds
    thread_local! {
        static MEMO: std::cell::RefCell<HashMap<(Poly, Poly), Poly>> = Default::default();
    }
    let key = (a.clone(), b.clone());
    let hit = MEMO.with(|m| {
        let m = m.borrow();
        m.get(&key).or_else(|| m.get(&(b.clone(), a.clone()))).cloned()
    });
    if let Some(g) = hit {
        return g;
    }
    let g = crate::modgcd::gcd(a, b).unwrap_or_else(|| prs_gcd(a, b));
    MEMO.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() >= 2048 {
            m.clear();
        }
        m.insert(key, g.clone());
    });
    g
}

fn prs_gcd(a: &Poly, b: &Poly) -> Poly {
    let sa = a.symbols();
    let sb = b.symbols();
    if let Some(x) = sa.difference(&sb).next() {
        return gcd(&a.content_in(x), b);
    }
    if let Some(x) = sb.difference(&sa).next() {
        return gcd(a, &b.content_in(x));
    }
    // main variable: the one with the smallest degree
    let x = sa
        .iter()
        .min_by_key(|s| a.degree_in(s).max(b.degree_in(s)))
        .unwrap()
        .clone();
    let ca = a.content_in(&x);
    let cb = b.content_in(&x);
    let pa = a.div_exact(&ca).unwrap().integer_primitive();
    let pb = b.div_exact(&cb).unwrap().integer_primitive();
    let c = gcd(&ca, &cb);
    let g = primitive_prs(pa, pb, &x);
    (&c * &g).monic()
}

fn pseudo_remainder(a: &Poly, b: &Poly, x: &Symbol) -> Poly {
    let db = b.degree_in(x);
    let lb = b.coefficient_of_power(x, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(x) >= db {
        let dr = r.degree_in(x);
        let lr = r.coefficient_of_power(x, dr);
        let shift = Monomial::from_pairs(vec![(x.clone(), dr - db)]);
        let t = (&lr * b).mul_monomial(&shift, &BigRational::one());
        r = &(&r * &lb) - &t;
        r = r.integer_primitive();
    }
    r
}

fn primitive_prs(a: Poly, b: Poly, x: &Symbol) -> Poly {
    let (mut a, mut b) = if a.degree_in(x) >= b.degree_in(x) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        let r = pseudo_remainder(&a, &b, x);
        if r.is_zero() {
            return b.primitive_part_in(x);
        }
        if r.degree_in(x) == 0 {
            return Poly::one();
        }
        a = b;
        b = r.primitive_part_in(x);
    }
}

/// Least common multiple, monic.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

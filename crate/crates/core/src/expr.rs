//! Canonical rational expressions and their syntax trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CsaError, Result};
use crate::poly::{fmt_rational, gcd, rat, Monomial, Poly, Symbol};

/// Unsimplified expression tree, as produced by the parser.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(BigRational),
    Sym(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Quotient(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn canonicalize(&self) -> Result<Expression> {
        Ok(match self {
            Expr::Const(c) => Expression::constant(c.clone()),
            Expr::Sym(s) => Expression::symbol(s.clone()),
            Expr::Sum(items) => {
                let mut acc = Expression::zero();
                for e in items {
                    acc = &acc + &e.canonicalize()?;
                }
                acc
            }
            Expr::Product(items) => {
                let mut acc = Expression::one();
                for e in items {
                    acc = &acc * &e.canonicalize()?;
                }
                acc
            }
            Expr::Pow(base, e) => base.canonicalize()?.powi(*e)?,
            Expr::Quotient(a, b) => a.canonicalize()?.checked_div(&b.canonicalize()?)?,
            Expr::Neg(a) => -&a.canonicalize()?,
        })
    }
}

/// Rational function in canonical form: `num / den` with `gcd(num, den) = 1`
/// and `den` monic under the global monomial order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expression {
    num: Poly,
    den: Poly,
}

impl Default for Expression {
    fn default() -> Self {
        Expression::zero()
    }
}

impl Expression {
    pub fn zero() -> Self {
        Expression {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expression::from_poly(Poly::one())
    }

    pub fn integer(n: i64) -> Self {
        Expression::from_poly(Poly::integer(n))
    }

    pub fn constant(c: BigRational) -> Self {
        Expression::from_poly(Poly::constant(c))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expression::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn symbol(s: Symbol) -> Self {
        Expression::from_poly(Poly::var(s))
    }

    pub fn var(name: &str) -> Self {
        Expression::symbol(Symbol::new(name))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expression {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` and reduces it to canonical form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(CsaError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expression::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(Expression::from_poly(num.scale(&c.recip())));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coefficient();
        if lc.is_one() {
            Ok(Expression { num, den })
        } else {
            let inv = lc.recip();
            Ok(Expression {
                num: num.scale(&inv),
                den: den.scale(&inv),
            })
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.num.contains(s) || self.den.contains(s)
    }

    pub fn scale(&self, c: &BigRational) -> Expression {
        if c.is_zero() {
            return Expression::zero();
        }
        Expression {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, other: &Expression) -> Result<Expression> {
        if other.is_zero() {
            return Err(CsaError::DivisionByZero);
        }
        Expression::from_parts(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn recip(&self) -> Result<Expression> {
        Expression::one().checked_div(self)
    }

    pub fn powi(&self, e: i32) -> Result<Expression> {
        if e >= 0 {
            Ok(Expression {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            })
        } else {
            self.recip()?.powi(-e)
        }
    }

    /// Formal partial derivative, all other symbols held fixed.
    pub fn diff(&self, s: &Symbol) -> Expression {
        let dn = self.num.diff(s);
        if self.den.is_one() {
            return Expression::from_poly(dn);
        }
        let dd = self.den.diff(s);
        if dd.is_zero() {
            return Expression::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        let g = gcd(&self.den, &dd);
        let rest = self.den.div_exact(&g).expect("gcd divides");
        let num = &(&dn * &rest) - &(&self.num * &dd.div_exact(&g).expect("gcd divides"));
        Expression::from_parts(num, &self.den * &rest).expect("nonzero denominator")
    }

    /// Simultaneous substitution followed by canonicalization.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expression>) -> Result<Expression> {
        let relevant: BTreeMap<&Symbol, &Expression> = bindings
            .iter()
            .filter(|(k, _)| self.contains(k))
            .collect();
        if relevant.is_empty() {
            return Ok(self.clone());
        }
        if relevant.values().all(|e| e.is_polynomial()) {
            let map: BTreeMap<Symbol, Poly> = relevant
                .iter()
                .map(|(k, v)| ((*k).clone(), v.num.clone()))
                .collect();
            let n = self.num.substitute(&map);
            let d = self.den.substitute(&map);
            if d.is_zero() {
                return Err(CsaError::Pole(format!(
                    "substitution makes the denominator {} vanish",
                    self.den
                )));
            }
            return Expression::from_parts(n, d);
        }
        let (nn, nd) = substitute_rational(&self.num, &relevant);
        let (dn, dd) = substitute_rational(&self.den, &relevant);
        if dn.is_zero() {
            return Err(CsaError::Pole(format!(
                "substitution makes the denominator {} vanish",
                self.den
            )));
        }
        Expression::from_parts(&nn * &dd, &nd * &dn)
    }

    pub fn substitute_one(&self, s: &Symbol, value: &Expression) -> Result<Expression> {
        let mut m = BTreeMap::new();
        m.insert(s.clone(), value.clone());
        self.substitute(&m)
    }

    pub fn eval_rational(&self, point: &BTreeMap<Symbol, BigRational>) -> Option<BigRational> {
        let ev = |p: &Poly| {
            p.eval_with(
                |c| c.clone(),
                |s| point.get(s).cloned().unwrap_or_else(BigRational::zero),
            )
        };
        let d = ev(&self.den);
        if d.is_zero() {
            None
        } else {
            Some(ev(&self.num) / d)
        }
    }

    /// Floating point evaluation; `None` at a pole or for non-finite values.
    pub fn eval_f64(&self, var: impl Fn(&Symbol) -> f64) -> Option<f64> {
        let cf = |c: &BigRational| ratio_to_f64(c);
        let d = self.den.eval_with(cf, &var);
        let n = self.num.eval_with(cf, &var);
        let v = n / d;
        if d == 0.0 || !v.is_finite() {
            None
        } else {
            Some(v)
        }
    }

    /// Evaluation in an arbitrary field-like type.
    pub fn eval_generic<T>(
        &self,
        coeff: impl Fn(&BigRational) -> T,
        var: impl Fn(&Symbol) -> T,
    ) -> (T, T)
    where
        T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
    {
        (
            self.num.eval_with(&coeff, &var),
            self.den.eval_with(&coeff, &var),
        )
    }

    /// Reduces the numerator and denominator modulo `lead -> replacement`.
    pub fn reduce_by(&self, lead: &Monomial, replacement: &Poly) -> Result<Expression> {
        let n = self.num.reduce_by(lead, replacement);
        let d = self.den.reduce_by(lead, replacement);
        Expression::from_parts(n, d)
    }
}

pub(crate) fn ratio_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

fn substitute_rational(p: &Poly, map: &BTreeMap<&Symbol, &Expression>) -> (Poly, Poly) {
    // homogenize by the maximal power of each substituted denominator
    let degrees: BTreeMap<&Symbol, u32> = map.keys().map(|s| (*s, p.degree_in(s))).collect();
    let mut den = Poly::one();
    for (s, e) in &degrees {
        den = &den * &map[s].den.pow(*e);
    }
    let mut num = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::constant(c.clone());
        let mut kept = Vec::new();
        for (s, e) in m.factors() {
            match map.get(s) {
                Some(v) => {
                    term = &term * &v.num.pow(*e);
                    term = &term * &v.den.pow(degrees[s] - e);
                }
                None => kept.push((s.clone(), *e)),
            }
        }
        for (s, d) in &degrees {
            if m.exponent(s) == 0 && *d > 0 {
                term = &term * &map[s].den.pow(*d);
            }
        }
        if !kept.is_empty() {
            term = term.mul_monomial(&Monomial::from_pairs(kept), &BigRational::one());
        }
        num = &num + &term;
    }
    (num, den)
}

/// Equality decision: canonical comparison, cross-checked by evaluation at
/// random rational points.
pub fn equals(a: &Expression, b: &Expression) -> bool {
    let canonical = a == b;
    let sampled = sampled_equal(a, b, 20);
    assert_eq!(
        canonical, sampled,
        "canonical and sampled equality disagree for {a} and {b}"
    );
    canonical
}

/// Compares by evaluation at `points` random rational points, re-drawing
/// points that hit a pole of either side.
pub fn sampled_equal(a: &Expression, b: &Expression, points: usize) -> bool {
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_dc5a);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < points {
        attempts += 1;
        if attempts > points * 50 {
            // every draw hits a pole: the expressions are degenerate
            return a == b;
        }
        let point: BTreeMap<Symbol, BigRational> = syms
            .iter()
            .map(|s| {
                let n: i64 = rng.gen_range(-97..=97);
                let d: i64 = rng.gen_range(1..=31);
                (s.clone(), BigRational::new(BigInt::from(n), BigInt::from(d)))
            })
            .collect();
        let (Some(va), Some(vb)) = (a.eval_rational(&point), b.eval_rational(&point)) else {
            continue;
        };
        if va != vb {
            return false;
        }
        accepted += 1;
    }
    true
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num_paren = self.num.len() > 1;
        let den_paren = self.den.len() > 1
            || self
                .den
                .leading()
                .is_some_and(|(m, c)| m.factors().len() > 1 || !c.is_one());
        if num_paren {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        f.write_str("/")?;
        if den_paren {
            write!(f, "({})", self.den)
        } else {
            write!(f, "{}", self.den)
        }
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &Expression {
    type Output = Expression;
    fn add(self, rhs: &Expression) -> Expression {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Expression::from_parts(&self.num + &rhs.num, self.den.clone())
                .expect("nonzero denominator");
        }
        if self.den.is_one() {
            return Expression {
                num: &(&self.num * &rhs.den) + &rhs.num,
                den: rhs.den.clone(),
            };
        }
        if rhs.den.is_one() {
            return Expression {
                num: &self.num + &(&rhs.num * &self.den),
                den: self.den.clone(),
            };
        }
        let g = gcd(&self.den, &rhs.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        Expression::from_parts(num, &self.den * &b).expect("nonzero denominator")
    }
}

impl Sub for &Expression {
    type Output = Expression;
    fn sub(self, rhs: &Expression) -> Expression {
        self + &(-rhs)
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &Expression {
    type Output = Expression;
    fn mul(self, rhs: &Expression) -> Expression {
        if self.is_zero() || rhs.is_zero() {
            return Expression::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expression::from_poly(&self.num * &rhs.num);
        }
        // cross cancellation keeps both factors reduced
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading_coefficient();
        if lc.is_one() {
            Expression { num, den }
        } else {
            let inv = lc.recip();
            Expression {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Expression {
            type Output = Expression;
            fn $m(self, rhs: Expression) -> Expression {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expression> for Expression {
            type Output = Expression;
            fn $m(self, rhs: &Expression) -> Expression {
                (&self).$m(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        -&self
    }
}

impl From<i64> for Expression {
    fn from(n: i64) -> Self {
        Expression::integer(n)
    }
}

/// Prints a rational constant in the expression grammar.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_negative() {
        format!("-{}", fmt_rational(&q.abs()))
    } else {
        fmt_rational(q)
    }
}

pub fn q(n: i64, d: i64) -> BigRational {
    if d == 1 {
        rat(n)
    } else {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: &str) -> Expression {
        Expression::var(n)
    }

    #[test]
    fn binomial_identity_cancels() {
        let (p, qv) = (x("p"), x("q"));
        let sq = (&p + &qv).powi(2).unwrap();
        let expanded = &(&(&p * &p) + &(&Expression::integer(2) * &(&p * &qv))) + &(&qv * &qv);
        assert!((&sq - &expanded).is_zero());
    }

    #[test]
    fn gcd_reduction() {
        let s = x("s");
        let e = s.checked_div(&(&s * &s)).unwrap();
        assert_eq!(e, Expression::one().checked_div(&s).unwrap());
        assert_eq!(e.to_string(), "1/s");
    }

    #[test]
    fn power_rule_quotient() {
        let (s, p, qv) = (x("s"), x("p"), x("q"));
        let f = (&(&p * &p) - &(&qv * &qv)).checked_div(&s.powi(5).unwrap()).unwrap();
        let d = f.diff(&Symbol::new("q"));
        let expected = (&Expression::integer(-2) * &qv).checked_div(&s.powi(5).unwrap()).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn zero_denominator_is_error() {
        assert_eq!(
            Expression::one().checked_div(&Expression::zero()),
            Err(CsaError::DivisionByZero)
        );
    }

    #[test]
    fn substitution_to_pole_is_reported() {
        let s = x("s");
        let e = Expression::one().checked_div(&s).unwrap();
        let r = e.substitute_one(&Symbol::new("s"), &Expression::zero());
        assert!(matches!(r, Err(CsaError::Pole(_))));
    }

    #[test]
    fn rational_substitution() {
        // s/(s^2 + t^2) with s -> 1/a
        let (s, t) = (x("s"), x("t"));
        let e = s.checked_div(&(&(&s * &s) + &(&t * &t))).unwrap();
        let a = x("a");
        let r = e
            .substitute_one(&Symbol::new("s"), &Expression::one().checked_div(&a).unwrap())
            .unwrap();
        let expected = a
            .checked_div(&(&Expression::one() + &(&(&a * &a) * &(&t * &t))))
            .unwrap();
        assert!(equals(&r, &expected));
    }

    #[test]
    fn equals_detects_difference() {
        assert!(!equals(&x("p"), &x("q")));
        assert!(equals(&(&x("u'") - &x("u'")), &Expression::zero()));
    }
}

//! Bicomplex numbers over rational expressions.
//!
//! Basis `{1, i, j, ij}` with commuting units, `i^2 = j^2 = -1`. Components
//! are stored in the bit order `1, i, j, ij` so that the product of two
//! units is the xor of their bits.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CsaError, Result};
use crate::expr::Expression;
use crate::poly::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    One,
    I,
    J,
    IJ,
}

impl Unit {
    pub const ALL: [Unit; 4] = [Unit::One, Unit::I, Unit::J, Unit::IJ];

    pub fn bits(self) -> usize {
        match self {
            Unit::One => 0,
            Unit::I => 1,
            Unit::J => 2,
            Unit::IJ => 3,
        }
    }

    pub fn from_bits(b: usize) -> Unit {
        Unit::ALL[b & 3]
    }

    /// `self * other = sign * unit`.
    pub fn mul(self, other: Unit) -> (i64, Unit) {
        let (a, b) = (self.bits(), other.bits());
        let both = a & b;
        let sign = if both.count_ones() % 2 == 1 { -1 } else { 1 };
        (sign, Unit::from_bits(a ^ b))
    }

    /// `self^-1 = sign * unit`.
    pub fn inverse(self) -> (i64, Unit) {
        match self {
            Unit::One | Unit::IJ => (1, self),
            Unit::I | Unit::J => (-1, self),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::One => "1",
            Unit::I => "i",
            Unit::J => "j",
            Unit::IJ => "ij",
        }
    }

    pub fn parse(s: &str) -> Option<Unit> {
        Unit::ALL.into_iter().find(|u| u.name() == s)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `sum_u c[u] * u` with rational expression components.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BicomplexExpression {
    c: [Expression; 4],
}

impl BicomplexExpression {
    pub fn new(c1: Expression, ci: Expression, cj: Expression, cij: Expression) -> Self {
        BicomplexExpression {
            c: [c1, ci, cj, cij],
        }
    }

    pub fn real(e: Expression) -> Self {
        let mut b = BicomplexExpression::default();
        b.c[0] = e;
        b
    }

    /// `e * unit`.
    pub fn along(unit: Unit, e: Expression) -> Self {
        let mut b = BicomplexExpression::default();
        b.c[unit.bits()] = e;
        b
    }

    pub fn unit(unit: Unit) -> Self {
        BicomplexExpression::along(unit, Expression::one())
    }

    pub fn component(&self, unit: Unit) -> &Expression {
        &self.c[unit.bits()]
    }

    pub fn components(&self) -> &[Expression; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Expression::is_zero)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        BicomplexExpression {
            c: std::array::from_fn(|k| self.c[k].scale(q)),
        }
    }

    pub fn mul_unit(&self, unit: Unit) -> Self {
        let mut out = BicomplexExpression::default();
        for u in Unit::ALL {
            let (sign, v) = u.mul(unit);
            out.c[v.bits()] = if sign < 0 {
                -&self.c[u.bits()]
            } else {
                self.c[u.bits()].clone()
            };
        }
        out
    }

    /// Conjugation `i -> -i`.
    pub fn conj_i(&self) -> Self {
        let [a, b, c, d] = &self.c;
        BicomplexExpression::new(a.clone(), -b, c.clone(), -d)
    }

    /// Conjugation `j -> -j`.
    pub fn conj_j(&self) -> Self {
        let [a, b, c, d] = &self.c;
        BicomplexExpression::new(a.clone(), b.clone(), -c, -d)
    }

    /// Division by clearing `i` first, then `j`, leaving a real norm.
    pub fn checked_div(&self, other: &BicomplexExpression) -> Result<Self> {
        let ci = other.conj_i();
        let m = other * &ci;
        let cj = m.conj_j();
        let norm = &m * &cj;
        let n = norm.component(Unit::One);
        if n.is_zero() {
            return Err(CsaError::Pole(format!(
                "bicomplex denominator {other} has identically zero norm"
            )));
        }
        let top = &(self * &ci) * &cj;
        let mut out = BicomplexExpression::default();
        for k in 0..4 {
            out.c[k] = top.c[k].checked_div(n)?;
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&Expression) -> Result<Expression>) -> Result<Self> {
        Ok(BicomplexExpression {
            c: [f(&self.c[0])?, f(&self.c[1])?, f(&self.c[2])?, f(&self.c[3])?],
        })
    }
}

impl fmt::Display for BicomplexExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.c[0], self.c[1], self.c[2], self.c[3]
        )
    }
}

impl fmt::Debug for BicomplexExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &BicomplexExpression {
    type Output = BicomplexExpression;
    fn add(self, rhs: &BicomplexExpression) -> BicomplexExpression {
        BicomplexExpression {
            c: std::array::from_fn(|k| &self.c[k] + &rhs.c[k]),
        }
    }
}

impl Sub for &BicomplexExpression {
    type Output = BicomplexExpression;
    fn sub(self, rhs: &BicomplexExpression) -> BicomplexExpression {
        BicomplexExpression {
            c: std::array::from_fn(|k| &self.c[k] - &rhs.c[k]),
        }
    }
}

impl Neg for &BicomplexExpression {
    type Output = BicomplexExpression;
    fn neg(self) -> BicomplexExpression {
        BicomplexExpression {
            c: std::array::from_fn(|k| -&self.c[k]),
        }
    }
}

impl Mul for &BicomplexExpression {
    type Output = BicomplexExpression;
    fn mul(self, rhs: &BicomplexExpression) -> BicomplexExpression {
        let mut acc: [Expression; 4] = Default::default();
        for a in Unit::ALL {
            let x = &self.c[a.bits()];
            if x.is_zero() {
                continue;
            }
            for b in Unit::ALL {
                let y = &rhs.c[b.bits()];
                if y.is_zero() {
                    continue;
                }
                let (sign, u) = a.mul(b);
                let p = x * y;
                let slot = &mut acc[u.bits()];
                *slot = if sign < 0 { &*slot - &p } else { &*slot + &p };
            }
        }
        BicomplexExpression { c: acc }
    }
}

impl Add for BicomplexExpression {
    type Output = BicomplexExpression;
    fn add(self, rhs: BicomplexExpression) -> BicomplexExpression {
        &self + &rhs
    }
}

impl Mul for BicomplexExpression {
    type Output = BicomplexExpression;
    fn mul(self, rhs: BicomplexExpression) -> BicomplexExpression {
        &self * &rhs
    }
}

impl Zero for BicomplexExpression {
    fn zero() -> Self {
        BicomplexExpression::default()
    }
    fn is_zero(&self) -> bool {
        BicomplexExpression::is_zero(self)
    }
}

impl One for BicomplexExpression {
    fn one() -> Self {
        BicomplexExpression::real(Expression::one())
    }
}

/// Replaces symbols by bicomplex values and expands exactly. Symbols not in
/// `map` stay real.
pub fn expand_with(
    e: &Expression,
    map: &BTreeMap<Symbol, BicomplexExpression>,
) -> Result<BicomplexExpression> {
    let value = |s: &Symbol| {
        map.get(s)
            .cloned()
            .unwrap_or_else(|| BicomplexExpression::real(Expression::symbol(s.clone())))
    };
    let coeff = |c: &BigRational| BicomplexExpression::real(Expression::constant(c.clone()));
    let (num, den) = e.eval_generic(coeff, value);
    if e.denominator().is_one() {
        return Ok(num);
    }
    num.checked_div(&den)
}

/// Expansion where each mapped symbol becomes `re + unit * im`.
pub fn bicomplex_expand(
    e: &Expression,
    pairs: &BTreeMap<Symbol, (Unit, Symbol, Symbol)>,
) -> Result<BicomplexExpression> {
    let map = pairs
        .iter()
        .map(|(s, (unit, re, im))| {
            let v = &BicomplexExpression::real(Expression::symbol(re.clone()))
                + &BicomplexExpression::along(*unit, Expression::symbol(im.clone()));
            (s.clone(), v)
        })
        .collect();
    expand_with(e, &map)
}

/// Floating bicomplex number `a + j b` with `a, b` complex in `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bicomplex64 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Bicomplex64 {
    pub fn from_components(c: [f64; 4]) -> Self {
        Bicomplex64 {
            a: Complex64::new(c[0], c[1]),
            b: Complex64::new(c[2], c[3]),
        }
    }

    /// Components in the order `1, i, j, ij`.
    pub fn components(&self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    pub fn recip(self) -> Self {
        // (a + jb)(a - jb) = a^2 + b^2
        let n = self.a * self.a + self.b * self.b;
        Bicomplex64 {
            a: self.a / n,
            b: -self.b / n,
        }
    }
}

impl Add for Bicomplex64 {
    type Output = Bicomplex64;
    fn add(self, o: Bicomplex64) -> Bicomplex64 {
        Bicomplex64 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Mul for Bicomplex64 {
    type Output = Bicomplex64;
    fn mul(self, o: Bicomplex64) -> Bicomplex64 {
        Bicomplex64 {
            a: self.a * o.a - self.b * o.b,
            b: self.a * o.b + self.b * o.a,
        }
    }
}

impl Zero for Bicomplex64 {
    fn zero() -> Self {
        Bicomplex64::from_components([0.0; 4])
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Bicomplex64 {
    fn one() -> Self {
        Bicomplex64::from_components([1.0, 0.0, 0.0, 0.0])
    }
}

/// Evaluates `e` at bicomplex values of its symbols.
pub fn eval_bicomplex(e: &Expression, var: impl Fn(&Symbol) -> Bicomplex64) -> Bicomplex64 {
    let coeff = |c: &BigRational| {
        Bicomplex64::from_components([crate::expr::ratio_to_f64(c), 0.0, 0.0, 0.0])
    };
    let (n, d) = e.eval_generic(coeff, var);
    n * d.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_table() {
        assert_eq!(Unit::I.mul(Unit::I), (-1, Unit::One));
        assert_eq!(Unit::I.mul(Unit::J), (1, Unit::IJ));
        assert_eq!(Unit::IJ.mul(Unit::IJ), (1, Unit::One));
        assert_eq!(Unit::IJ.mul(Unit::J), (-1, Unit::I));
        for u in Unit::ALL {
            let (s, v) = u.inverse();
            let (s2, w) = u.mul(v);
            assert_eq!((s * s2, w), (1, Unit::One));
        }
    }

    #[test]
    fn square_of_pair() {
        let mut pairs = BTreeMap::new();
        pairs.insert(Symbol::new("u"), (Unit::I, Symbol::new("p"), Symbol::new("q")));
        let u2 = &Expression::var("u") * &Expression::var("u");
        let b = bicomplex_expand(&u2, &pairs).unwrap();
        let (p, q) = (Expression::var("p"), Expression::var("q"));
        assert_eq!(b.component(Unit::One), &(&(&p * &p) - &(&q * &q)));
        assert_eq!(b.component(Unit::I), &(&Expression::integer(2) * &(&p * &q)));
        assert!(b.component(Unit::J).is_zero());
    }

    #[test]
    fn reciprocal_of_complex_point() {
        let mut pairs = BTreeMap::new();
        pairs.insert(Symbol::new("r"), (Unit::I, Symbol::new("s"), Symbol::new("t")));
        let inv = Expression::one().checked_div(&Expression::var("r")).unwrap();
        let b = bicomplex_expand(&inv, &pairs).unwrap();
        assert_eq!(b.component(Unit::One).to_string(), "s/(s^2 + t^2)");
        assert_eq!(b.component(Unit::I).to_string(), "-t/(s^2 + t^2)");
    }

    #[test]
    fn zero_norm_is_an_error() {
        // 1 + ij is a zero divisor
        let z = &BicomplexExpression::one() + &BicomplexExpression::unit(Unit::IJ);
        assert!(BicomplexExpression::one().checked_div(&z).is_err());
    }
}

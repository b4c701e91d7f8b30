//! Differential systems in solved second-order form and their text format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CsaError, Result};
use crate::expr::Expression;
use crate::jet::JetContext;
use crate::parse::parse;
use crate::poly::{Monomial, Poly, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitVariant {
    Ode2,
    Pde2,
    Ode3,
    Ode3Dual,
    Ode4,
    Pde4x2,
    Pde4x2Dual,
    Pde4x4,
}

impl SplitVariant {
    pub const ALL: [SplitVariant; 8] = [
        SplitVariant::Ode2,
        SplitVariant::Pde2,
        SplitVariant::Ode3,
        SplitVariant::Ode3Dual,
        SplitVariant::Ode4,
        SplitVariant::Pde4x2,
        SplitVariant::Pde4x2Dual,
        SplitVariant::Pde4x4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SplitVariant::Ode2 => "ode2",
            SplitVariant::Pde2 => "pde2",
            SplitVariant::Ode3 => "ode3",
            SplitVariant::Ode3Dual => "ode3-dual",
            SplitVariant::Ode4 => "ode4",
            SplitVariant::Pde4x2 => "pde4x2",
            SplitVariant::Pde4x2Dual => "pde4x2-dual",
            SplitVariant::Pde4x4 => "pde4x4",
        }
    }

    pub fn is_pde(self) -> bool {
        matches!(
            self,
            SplitVariant::Pde2 | SplitVariant::Pde4x2 | SplitVariant::Pde4x2Dual | SplitVariant::Pde4x4
        )
    }

    pub fn is_double(self) -> bool {
        !matches!(self, SplitVariant::Ode2 | SplitVariant::Pde2)
    }
}

impl fmt::Display for SplitVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SplitVariant {
    type Err = CsaError;
    fn from_str(s: &str) -> Result<Self> {
        SplitVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| CsaError::Format(format!("unknown variant `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Variant(SplitVariant),
    Generic,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Variant(v) => write!(f, "{v}"),
            Kind::Generic => f.write_str("generic"),
        }
    }
}

impl FromStr for Kind {
    type Err = CsaError;
    fn from_str(s: &str) -> Result<Self> {
        if s == "generic" {
            Ok(Kind::Generic)
        } else {
            Ok(Kind::Variant(s.parse()?))
        }
    }
}

/// `lhs = rhs`, `lhs` linear in second-order jets with constant coefficients
/// and `rhs` free of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Expression,
    pub rhs: Expression,
}

impl Equation {
    /// Brings an arbitrary relation `a = b` into solved form.
    pub fn solved(a: &Expression, b: &Expression, ctx: &JetContext) -> Result<Equation> {
        let e = a - b;
        let mut lhs = Expression::zero();
        for s in e.symbols() {
            if ctx.order_of(&s) != 2 {
                continue;
            }
            let c = e.diff(&s);
            let Some(c) = c.constant_value() else {
                return Err(CsaError::System(format!(
                    "equation is not linear with constant coefficients in `{s}`"
                )));
            };
            lhs = &lhs + &Expression::symbol(s).scale(&c);
        }
        if lhs.is_zero() {
            return Err(CsaError::System("equation has no second-order jet".into()));
        }
        let rhs = &lhs - &e;
        if ctx.expression_order(&rhs) > 1 {
            return Err(CsaError::System(
                "right-hand side still contains second-order jets".into(),
            ));
        }
        Ok(Equation { lhs, rhs })
    }

    pub fn residual(&self) -> Expression {
        &self.lhs - &self.rhs
    }
}

/// Polynomial relation `lead = replacement` used as a rewrite rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lead: Monomial,
    pub replacement: Poly,
}

impl Constraint {
    pub fn new(lhs: &Expression, rhs: &Expression) -> Result<Constraint> {
        let bad = || CsaError::System("constraint must read `monomial = polynomial`".into());
        if !lhs.is_polynomial() || !rhs.is_polynomial() || lhs.numerator().len() != 1 {
            return Err(bad());
        }
        let (m, c) = lhs.numerator().leading().ok_or_else(bad)?;
        if m.is_one() {
            return Err(bad());
        }
        let replacement = rhs.numerator().scale(&c.recip());
        if replacement.terms().any(|(t, _)| t.div(m).is_some()) {
            return Err(CsaError::System(format!(
                "constraint lead `{m}` occurs in its own replacement"
            )));
        }
        Ok(Constraint {
            lead: m.clone(),
            replacement,
        })
    }

    pub fn apply(&self, e: &Expression) -> Result<Expression> {
        e.reduce_by(&self.lead, &self.replacement)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lead, self.replacement)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub relations: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Rewrites to a fixed point.
    pub fn reduce(&self, e: &Expression) -> Result<Expression> {
        let mut cur = e.clone();
        for _ in 0..64 {
            let mut next = cur.clone();
            for c in &self.relations {
                next = c.apply(&next)?;
            }
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
        Err(CsaError::System("constraint rewriting does not terminate".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialSystem {
    pub ctx: JetContext,
    pub kind: Kind,
    pub equations: Vec<Equation>,
    pub constraints: ConstraintSet,
}

impl DifferentialSystem {
    pub fn new(ctx: JetContext, kind: Kind, equations: Vec<Equation>) -> Result<Self> {
        let sys = DifferentialSystem {
            ctx,
            kind,
            equations,
            constraints: ConstraintSet::default(),
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<()> {
        if self.equations.len() != self.ctx.deps().len() {
            return Err(CsaError::System(format!(
                "{} equations for {} dependents",
                self.equations.len(),
                self.ctx.deps().len()
            )));
        }
        for eq in &self.equations {
            if self.ctx.expression_order(&eq.rhs) > 1 {
                return Err(CsaError::System(
                    "right-hand side contains second-order jets".into(),
                ));
            }
        }
        self.principal_jets()?;
        Ok(())
    }

    pub fn variant(&self) -> Option<SplitVariant> {
        match self.kind {
            Kind::Variant(v) => Some(v),
            Kind::Generic => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.equations.iter().all(|e| e.rhs.is_polynomial())
    }

    /// One second-order jet per equation, solved for on shell: the first
    /// second-order jet of the equation's own dependent if it occurs, else
    /// the first unused one.
    pub fn principal_jets(&self) -> Result<Vec<Symbol>> {
        let mut chosen: Vec<Symbol> = Vec::new();
        for (k, eq) in self.equations.iter().enumerate() {
            let second: Vec<Symbol> = self
                .ctx
                .jets_of_order(2)
                .into_iter()
                .map(|(_, _, s)| s)
                .filter(|s| eq.lhs.contains(s) && !chosen.contains(s))
                .collect();
            let own = second.iter().find(|s| {
                matches!(self.ctx.role(s), Some(crate::jet::SymbolRole::Jet { dep, .. }) if dep == k)
            });
            match own.or(second.first()) {
                Some(s) => chosen.push(s.clone()),
                None => {
                    return Err(CsaError::System(format!(
                        "equation {} has no free second-order jet",
                        k + 1
                    )))
                }
            }
        }
        Ok(chosen)
    }

    /// Bindings expressing the principal jets through the remaining jets.
    pub fn on_shell(&self) -> Result<BTreeMap<Symbol, Expression>> {
        let principal = self.principal_jets()?;
        let n = principal.len();
        // a[k][m]: coefficient of principal jet m in lhs k; b[k]: rhs minus the rest
        let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut b: Vec<Expression> = Vec::with_capacity(n);
        for eq in &self.equations {
            let row: Vec<BigRational> = principal
                .iter()
                .map(|p| eq.lhs.diff(p).constant_value().unwrap_or_else(BigRational::zero))
                .collect();
            let mut rest = eq.lhs.clone();
            for (p, c) in principal.iter().zip(&row) {
                rest = &rest - &Expression::symbol(p.clone()).scale(c);
            }
            b.push(&eq.rhs - &rest);
            a.push(row);
        }
        // Gauss-Jordan on the constant matrix
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| CsaError::System("principal jets are not solvable".into()))?;
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x = &*x * &inv;
            }
            b[col] = b[col].scale(&inv);
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c2 in 0..n {
                    let v = &a[col][c2] * &f;
                    a[r][c2] = &a[r][c2] - &v;
                }
                b[r] = &b[r] - &b[col].scale(&f);
            }
        }
        Ok(principal.into_iter().zip(b).collect())
    }

    /// Parses the text format. Unknown header keys are errors.
    pub fn parse(text: &str) -> Result<DifferentialSystem> {
        let mut indeps: Option<Vec<String>> = None;
        let mut deps: Option<Vec<String>> = None;
        let mut params: Vec<String> = Vec::new();
        let mut kind = Kind::Generic;
        let mut eqs: Vec<(usize, String)> = Vec::new();
        let mut cons: Vec<(usize, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| {
                CsaError::Format(format!("line {}: expected `key: value`", n + 1))
            })?;
            let value = value.trim();
            let list = || -> Vec<String> {
                value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            };
            match key.trim() {
                "indep" => indeps = Some(list()),
                "dep" => deps = Some(list()),
                "param" => params.extend(list()),
                "kind" => kind = value.parse()?,
                "eq" => eqs.push((n + 1, value.to_string())),
                "constraint" => cons.push((n + 1, value.to_string())),
                other => {
                    return Err(CsaError::Format(format!(
                        "line {}: unknown key `{other}`",
                        n + 1
                    )))
                }
            }
        }
        let indeps = indeps.ok_or_else(|| CsaError::Format("missing `indep:` line".into()))?;
        let deps = deps.ok_or_else(|| CsaError::Format("missing `dep:` line".into()))?;
        let ctx = JetContext::with_params(&as_refs(&indeps), &as_refs(&deps), &as_refs(&params))?;
        let mut equations = Vec::new();
        for (line, text) in &eqs {
            let (a, b) = split_relation(text, *line, &ctx)?;
            equations.push(Equation::solved(&a, &b, &ctx).map_err(|e| at_line(e, *line))?);
        }
        let mut constraints = ConstraintSet::default();
        for (line, text) in &cons {
            let (a, b) = split_relation(text, *line, &ctx)?;
            constraints
                .relations
                .push(Constraint::new(&a, &b).map_err(|e| at_line(e, *line))?);
        }
        let mut sys = DifferentialSystem::new(ctx, kind, equations)?;
        sys.constraints = constraints;
        Ok(sys)
    }
}

fn at_line(e: CsaError, line: usize) -> CsaError {
    match e {
        CsaError::Syntax {
            line: l,
            column,
            message,
        } => CsaError::Syntax {
            line: line + l - 1,
            column,
            message,
        },
        CsaError::UnknownIdentifier { name, column, .. } => CsaError::UnknownIdentifier {
            name,
            line,
            column,
        },
        other => CsaError::Format(format!("line {line}: {other}")),
    }
}

fn split_relation(text: &str, line: usize, ctx: &JetContext) -> Result<(Expression, Expression)> {
    let (a, b) = text
        .split_once('=')
        .ok_or_else(|| CsaError::Format(format!("line {line}: expected `=`")))?;
    let a = parse(a, ctx).map_err(|e| at_line(e, line))?;
    let b = parse(b, ctx).map_err(|e| at_line(e, line))?;
    Ok((a, b))
}

impl fmt::Display for DifferentialSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Symbol]| v.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ");
        writeln!(f, "indep: {}", join(self.ctx.indeps()))?;
        writeln!(f, "dep: {}", join(self.ctx.deps()))?;
        if !self.ctx.params().is_empty() {
            writeln!(f, "param: {}", join(self.ctx.params()))?;
        }
        writeln!(f, "kind: {}", self.kind)?;
        for c in &self.constraints.relations {
            writeln!(f, "constraint: {c}")?;
        }
        for eq in &self.equations {
            writeln!(f, "eq: {} = {}", eq.lhs, eq.rhs)?;
        }
        Ok(())
    }
}

/// Scalar equation `u'' = f(r, u, u')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarODE {
    pub ctx: JetContext,
    pub rhs: Expression,
}

impl ScalarODE {
    pub fn new(indep: &str, dep: &str, rhs: Expression) -> Result<Self> {
        ScalarODE::with_params(indep, dep, &[], rhs)
    }

    pub fn with_params(indep: &str, dep: &str, params: &[&str], rhs: Expression) -> Result<Self> {
        let ctx = JetContext::with_params(&[indep], &[dep], params)?;
        if ctx.expression_order(&rhs) > 1 {
            return Err(CsaError::System(
                "right-hand side must not contain second derivatives".into(),
            ));
        }
        let ode = ScalarODE { ctx, rhs };
        Ok(ode)
    }

    /// Parses `f` in the variables `indep`, `dep`, `dep'`.
    pub fn parse(indep: &str, dep: &str, f: &str) -> Result<Self> {
        let ctx = JetContext::new(&[indep], &[dep])?;
        ScalarODE::new(indep, dep, parse(f, &ctx)?)
    }

    pub fn indep(&self) -> &Symbol {
        self.ctx.indep(0)
    }

    pub fn dep(&self) -> &Symbol {
        self.ctx.dep(0)
    }

    pub fn first_jet(&self) -> Symbol {
        self.ctx.jet(0, &[0])
    }

    pub fn to_system(&self) -> DifferentialSystem {
        let eq = Equation {
            lhs: Expression::symbol(self.ctx.jet(0, &[0, 0])),
            rhs: self.rhs.clone(),
        };
        DifferentialSystem::new(self.ctx.clone(), Kind::Generic, vec![eq])
            .expect("a scalar equation is a valid system")
    }

    /// Reads a one-equation generic system.
    pub fn from_system(sys: &DifferentialSystem) -> Result<Self> {
        if sys.ctx.indeps().len() != 1 || sys.ctx.deps().len() != 1 {
            return Err(CsaError::System(
                "a scalar equation has one independent and one dependent".into(),
            ));
        }
        let jet = Expression::symbol(sys.ctx.jet(0, &[0, 0]));
        let eq = &sys.equations[0];
        let c = eq.lhs.diff(&sys.ctx.jet(0, &[0, 0]));
        let c = c
            .constant_value()
            .filter(|c| !c.is_zero() && eq.lhs == jet.scale(c))
            .ok_or_else(|| CsaError::System("expected `u'' = f` form".into()))?;
        let rhs = if c.is_one() {
            eq.rhs.clone()
        } else {
            eq.rhs.scale(&c.recip())
        };
        let params: Vec<&str> = sys.ctx.params().iter().map(|s| s.name()).collect();
        ScalarODE::with_params(sys.ctx.indep(0).name(), sys.ctx.dep(0).name(), &params, rhs)
    }
}

impl fmt::Display for ScalarODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'' = {}", self.dep(), self.rhs)
    }
}

fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EMDEN: &str = "\
indep: s
dep: w, x, y, z
kind: ode4
# natural form
eq: w'' + 5*s^-1*w' + w^2 - x^2 - y^2 + z^2 = 0
eq: x'' + 5/s*x' + 2*w*x - 2*y*z = 0
eq: y'' + 5/s*y' + 2*w*y - 2*x*z = 0
eq: z'' + 5/s*z' + 2*w*z + 2*x*y = 0
";

    #[test]
    fn parse_solved_form_and_round_trip() {
        let sys = DifferentialSystem::parse(EMDEN).unwrap();
        assert_eq!(sys.kind, Kind::Variant(SplitVariant::Ode4));
        assert_eq!(sys.equations[0].lhs, Expression::var("w''"));
        let printed = sys.to_string();
        let again = DifferentialSystem::parse(&printed).unwrap();
        assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn on_shell_mixes_lhs_jets() {
        let text = "indep: s, t\ndep: p, q\nkind: pde2\n\
                    eq: p_ss - p_tt + 2*q_st = 0\neq: q_ss - q_tt - 2*p_st = 4*p\n";
        let sys = DifferentialSystem::parse(text).unwrap();
        let shell = sys.on_shell().unwrap();
        assert_eq!(shell.len(), 2);
        assert_eq!(
            shell[&Symbol::new("q_ss")].to_string(),
            "4*p + 2*p_st + q_tt"
        );
    }

    #[test]
    fn constraint_reduction() {
        let text = "indep: s\ndep: x, y, z\nconstraint: z^2 = x^2 + y^2\n\
                    eq: x'' = 0\neq: y'' = 0\neq: z'' = 0\n";
        let sys = DifferentialSystem::parse(text).unwrap();
        let ctx = &sys.ctx;
        let e = parse("x^2 + y^2 - z^2", ctx).unwrap();
        assert!(sys.constraints.reduce(&e).unwrap().is_zero());
    }

    #[test]
    fn header_errors() {
        assert!(DifferentialSystem::parse("dep: u\neq: u'' = 0").is_err());
        assert!(DifferentialSystem::parse("indep: r\ndep: u\nkind: nope\neq: u'' = 0").is_err());
        assert!(DifferentialSystem::parse("indep: r\ndep: u\neq: u' = 0").is_err());
    }
}

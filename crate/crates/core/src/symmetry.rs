//! Lie point symmetries: prolongation, on-shell verification, determining
//! equations under a polynomial ansatz, brackets and closure.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CsaError, Result};
use crate::expr::Expression;
use crate::jet::{JetContext, SymbolRole};
use crate::linalg::{Echelon, SparseRow};
use crate::parse::parse;
use crate::poly::{lcm, Monomial, Poly, Symbol};
use crate::split::split_generators;
use crate::system::{DifferentialSystem, SplitVariant};

/// `sum xi_a d/dx_a + sum eta_b d/du_b` with coefficients in base variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub ctx: JetContext,
    pub xi: Vec<Expression>,
    pub eta: Vec<Expression>,
    /// Imaginary markers, indexed like `xi` followed by `eta`.
    pub imag: Vec<bool>,
}

impl Generator {
    pub fn new(ctx: &JetContext, xi: Vec<Expression>, eta: Vec<Expression>) -> Result<Generator> {
        if xi.len() != ctx.indeps().len() || eta.len() != ctx.deps().len() {
            return Err(CsaError::Precondition(
                "generator components do not match the context".into(),
            ));
        }
        for e in xi.iter().chain(&eta) {
            if let Some(s) = e.symbols().into_iter().find(|s| ctx.order_of(s) > 0) {
                return Err(CsaError::Precondition(format!(
                    "point generator coefficient depends on the jet `{s}`"
                )));
            }
        }
        let n = xi.len() + eta.len();
        Ok(Generator {
            ctx: ctx.clone(),
            xi,
            eta,
            imag: vec![false; n],
        })
    }

    pub fn zero(ctx: &JetContext) -> Generator {
        Generator {
            ctx: ctx.clone(),
            xi: vec![Expression::zero(); ctx.indeps().len()],
            eta: vec![Expression::zero(); ctx.deps().len()],
            imag: vec![false; ctx.indeps().len() + ctx.deps().len()],
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Expression> {
        self.xi.iter().chain(&self.eta)
    }

    fn component_symbols(&self) -> Vec<&Symbol> {
        self.ctx.indeps().iter().chain(self.ctx.deps()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Expression::is_zero)
    }

    /// Scaled so that the first nonzero coefficient has leading coefficient 1.
    pub fn normalized(&self) -> Generator {
        let Some(first) = self.components().find(|e| !e.is_zero()) else {
            return self.clone();
        };
        let inv = first.numerator().leading_coefficient().recip();
        self.map(|e| e.scale(&inv))
    }

    pub fn map(&self, f: impl Fn(&Expression) -> Expression) -> Generator {
        Generator {
            ctx: self.ctx.clone(),
            xi: self.xi.iter().map(&f).collect(),
            eta: self.eta.iter().map(&f).collect(),
            imag: self.imag.clone(),
        }
    }

    /// Applies the vector field to a function of the base variables.
    pub fn apply(&self, f: &Expression) -> Expression {
        self.component_symbols()
            .into_iter()
            .zip(self.components())
            .filter(|(_, c)| !c.is_zero())
            .fold(Expression::zero(), |acc, (s, c)| &acc + &(c * &f.diff(s)))
    }

    /// Same generator in another context with the same coordinates.
    pub fn in_context(&self, ctx: &JetContext) -> Result<Generator> {
        if ctx.indeps() != self.ctx.indeps() || ctx.deps() != self.ctx.deps() {
            return Err(CsaError::Precondition(
                "generator and system use different coordinates".into(),
            ));
        }
        let mut g = self.clone();
        g.ctx = ctx.clone();
        Ok(g)
    }

    pub fn is_polynomial(&self) -> bool {
        self.components().all(Expression::is_polynomial)
    }

    pub fn degree(&self) -> u32 {
        self.components()
            .map(|e| e.numerator().total_degree())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (s, c) in self.component_symbols().into_iter().zip(self.components()) {
            if c.is_zero() {
                continue;
            }
            let text = if c.constant_value().is_some_and(|v| v.is_one()) {
                format!("∂{s}")
            } else if c.constant_value().is_some_and(|v| v == -BigRational::one()) {
                format!("-∂{s}")
            } else if c.is_polynomial() && c.numerator().len() == 1 {
                format!("{c}∂{s}")
            } else {
                format!("({c})∂{s}")
            };
            if out.is_empty() {
                out = text;
            } else if let Some(rest) = text.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&text);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

fn header(line: &str) -> Option<(&str, Vec<&str>)> {
    let (k, v) = line.split_once(':')?;
    let k = k.trim();
    matches!(k, "indep" | "dep" | "param").then(|| {
        (
            k,
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect(),
        )
    })
}

fn str_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Parses the generator file format: optional `indep:`/`dep:`/`param:`
/// headers, then blocks of `xi[s] = ...` / `eta[w] = ...` lines separated by
/// blank lines. A trailing `!imag` marks the component imaginary.
pub fn parse_generators(text: &str, ctx: Option<&JetContext>) -> Result<Vec<Generator>> {
    let mut indeps: Option<Vec<String>> = None;
    let mut deps: Option<Vec<String>> = None;
    let mut params: Vec<String> = Vec::new();
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !blocks.last().is_some_and(Vec::is_empty) {
                blocks.push(Vec::new());
            }
            continue;
        }
        if let Some((k, names)) = header(line) {
            let names: Vec<String> = names.into_iter().map(String::from).collect();
            match k {
                "indep" => indeps = Some(names),
                "dep" => deps = Some(names),
                _ => params = names,
            }
            continue;
        }
        blocks.last_mut().expect("block").push((no + 1, line));
    }
    let ctx = match (indeps, deps, ctx) {
        (Some(i), Some(d), _) => {
            JetContext::with_params(&str_refs(&i), &str_refs(&d), &str_refs(&params))?
        }
        (None, None, Some(c)) => c.clone(),
        _ => {
            return Err(CsaError::Format(
                "generator file needs `indep:` and `dep:` headers".into(),
            ))
        }
    };
    let mut out = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let mut g = Generator::zero(&ctx);
        for (no, line) in block {
            let bad = |m: &str| CsaError::Syntax {
                line: no,
                column: 1,
                message: m.to_string(),
            };
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| bad("expected `=`"))?;
            let (rhs, imag) = match rhs.trim().strip_suffix("!imag") {
                Some(r) => (r, true),
                None => (rhs, false),
            };
            let lhs = lhs.trim();
            let open = lhs.find('[').ok_or_else(|| bad("expected `xi[..]` or `eta[..]`"))?;
            let name = lhs[open + 1..]
                .strip_suffix(']')
                .ok_or_else(|| bad("missing `]`"))?
                .trim();
            let slot = match &lhs[..open] {
                "xi" => ctx.indep_index(name),
                "eta" => ctx.dep_index(name).map(|k| k + ctx.indeps().len()),
                _ => None,
            }
            .ok_or_else(|| bad(&format!("unknown component `{lhs}`")))?;
            let value = parse(rhs.trim(), &ctx).map_err(|e| match e {
                CsaError::Syntax { column, message, .. } => CsaError::Syntax {
                    line: no,
                    column,
                    message,
                },
                other => other,
            })?;
            if let Some(s) = value.symbols().into_iter().find(|s| ctx.order_of(s) > 0) {
                return Err(bad(&format!("coefficient depends on the jet `{s}`")));
            }
            let ni = ctx.indeps().len();
            if slot < ni {
                g.xi[slot] = value;
            } else {
                g.eta[slot - ni] = value;
            }
            g.imag[slot] = imag;
        }
        out.push(g);
    }
    Ok(out)
}

/// Prints generators in the file format accepted by [`parse_generators`].
pub fn format_generators(gens: &[Generator]) -> String {
    let mut s = String::new();
    if let Some(g) = gens.first() {
        let names = |v: &[Symbol]| v.iter().map(|x| x.name()).collect::<Vec<_>>().join(", ");
        s.push_str(&format!("indep: {}\n", names(g.ctx.indeps())));
        s.push_str(&format!("dep: {}\n", names(g.ctx.deps())));
        if !g.ctx.params().is_empty() {
            s.push_str(&format!("param: {}\n", names(g.ctx.params())));
        }
    }
    for g in gens {
        s.push('\n');
        let ni = g.xi.len();
        for (k, c) in g.components().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (kind, name) = if k < ni {
                ("xi", g.ctx.indep(k))
            } else {
                ("eta", g.ctx.dep(k - ni))
            };
            let mark = if g.imag[k] { " !imag" } else { "" };
            s.push_str(&format!("{kind}[{name}] = {c}{mark}\n"));
        }
    }
    s
}

/// Coefficients of the prolongation up to `order`, keyed by coordinate.
pub fn prolong(gen: &Generator, order: usize) -> Result<BTreeMap<Symbol, Expression>> {
    if !(1..=2).contains(&order) {
        return Err(CsaError::Unsupported(format!(
            "prolongation of order {order}; only 1 and 2 are available"
        )));
    }
    let ctx = &gen.ctx;
    let ni = ctx.indeps().len();
    let mut out = BTreeMap::new();
    for (k, x) in ctx.indeps().iter().enumerate() {
        out.insert(x.clone(), gen.xi[k].clone());
    }
    for (b, u) in ctx.deps().iter().enumerate() {
        out.insert(u.clone(), gen.eta[b].clone());
    }
    let dxi: Vec<Vec<Expression>> = (0..ni)
        .map(|a| {
            (0..ni)
                .map(|c| ctx.total_derivative(&gen.xi[c], a))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let step = |b: usize, prev: &Expression, base: &[usize], a: usize| -> Result<Expression> {
        let mut e = ctx.total_derivative(prev, a)?;
        for (c, d) in dxi[a].iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let mut idx = base.to_vec();
            idx.push(c);
            let jet = Expression::symbol(ctx.jet(b, &idx));
            e = &e - &(&jet * d);
        }
        Ok(e)
    };
    for (b, idx, s) in ctx.jets_of_order(1) {
        let e = step(b, &gen.eta[b], &[], idx[0])?;
        out.insert(s, e);
    }
    if order == 2 {
        for (b, idx, s) in ctx.jets_of_order(2) {
            let first = out[&ctx.jet(b, &idx[..1])].clone();
            let e = step(b, &first, &idx[..1], idx[1])?;
            out.insert(s, e);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    LieSymmetry,
    LieLike,
    Neither,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::LieSymmetry => "lie-symmetry",
            Classification::LieLike => "lie-like",
            Classification::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryVerdict {
    pub residuals: Vec<Expression>,
    pub is_symmetry: bool,
    pub tag: Classification,
}

fn raw_residuals(
    gen: &Generator,
    sys: &DifferentialSystem,
    shell: &BTreeMap<Symbol, Expression>,
) -> Result<Vec<Expression>> {
    let pro = prolong(gen, 2)?;
    sys.equations
        .iter()
        .map(|eq| {
            let r = eq.residual();
            let mut x = Expression::zero();
            for s in r.symbols() {
                if let Some(c) = pro.get(&s) {
                    if !c.is_zero() {
                        x = &x + &(c * &r.diff(&s));
                    }
                }
            }
            let x = x.substitute(shell)?;
            sys.constraints.reduce(&x)
        })
        .collect()
}

/// Second prolongation applied to every equation, evaluated on shell and
/// reduced by the constraints.
pub fn symmetry_residual(gen: &Generator, sys: &DifferentialSystem) -> Result<SymmetryVerdict> {
    let gen = gen.in_context(&sys.ctx)?;
    let shell = sys.on_shell()?;
    let residuals = raw_residuals(&gen, sys, &shell)?;
    let is_symmetry = residuals.iter().all(Expression::is_zero);
    Ok(SymmetryVerdict {
        residuals,
        is_symmetry,
        tag: Classification::Neither,
    })
}

/// Monomials of total degree at most `degree` in `vars`, by degree.
pub fn monomials_up_to(vars: &[Symbol], degree: u32) -> Vec<Monomial> {
    fn rec(vars: &[Symbol], left: u32, cur: &mut Vec<(Symbol, u32)>, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => out.push(Monomial::from_pairs(cur.clone())),
            Some((v, rest)) => {
                for e in 0..=left {
                    if e > 0 {
                        cur.push((v.clone(), e));
                    }
                    rec(rest, left - e, cur, out);
                    if e > 0 {
                        cur.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, degree, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
    out
}

/// Basis of the point symmetries whose coefficients are polynomials of
/// degree at most `ansatz_degree` in the base variables.
pub fn solve_determining(sys: &DifferentialSystem, ansatz_degree: u32) -> Result<Vec<Generator>> {
    if ansatz_degree < 1 {
        return Err(CsaError::Precondition("ansatz degree must be at least 1".into()));
    }
    let ctx = &sys.ctx;
    let vars: Vec<Symbol> = ctx.indeps().iter().chain(ctx.deps()).cloned().collect();
    let monos = monomials_up_to(&vars, ansatz_degree);
    let shell = sys.on_shell()?;
    let ncomp = vars.len();
    let ni = ctx.indeps().len();
    let mut columns: Vec<(usize, Monomial)> = Vec::new();
    for c in 0..ncomp {
        for m in &monos {
            columns.push((c, m.clone()));
        }
    }
    let basis_gen = |c: usize, m: &Monomial| {
        let mut g = Generator::zero(ctx);
        let e = Expression::from_poly(Poly::term(BigRational::one(), m.clone()));
        if c < ni {
            g.xi[c] = e;
        } else {
            g.eta[c - ni] = e;
        }
        g
    };
    let per_column: Vec<Vec<Expression>> = columns
        .iter()
        .map(|(c, m)| raw_residuals(&basis_gen(*c, m), sys, &shell))
        .collect::<Result<_>>()?;
    let mut ech = Echelon::new();
    for k in 0..sys.equations.len() {
        let den = per_column
            .iter()
            .map(|r| &r[k])
            .filter(|e| !e.is_zero())
            .fold(Poly::one(), |acc, e| lcm(&acc, e.denominator()));
        let mut rows: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
        for (col, r) in per_column.iter().enumerate() {
            let e = &r[k];
            if e.is_zero() {
                continue;
            }
            let factor = den
                .div_exact(e.denominator())
                .ok_or_else(|| CsaError::System("denominator does not divide lcm".into()))?;
            let p = e.numerator() * &factor;
            for (m, c) in p.terms() {
                rows.entry(m.clone()).or_default().insert(col, c.clone());
            }
        }
        for row in rows.values() {
            ech.insert(row);
        }
    }
    let gens = ech
        .nullspace(columns.len())
        .into_iter()
        .map(|v| {
            let mut g = Generator::zero(ctx);
            for ((c, m), x) in columns.iter().zip(v) {
                if x.is_zero() {
                    continue;
                }
                let t = Expression::from_poly(Poly::term(x, m.clone()));
                if *c < ni {
                    g.xi[*c] = &g.xi[*c] + &t;
                } else {
                    g.eta[*c - ni] = &g.eta[*c - ni] + &t;
                }
            }
            g.normalized()
        })
        .collect();
    Ok(gens)
}

pub fn lie_bracket(a: &Generator, b: &Generator) -> Result<Generator> {
    if a.ctx.indeps() != b.ctx.indeps() || a.ctx.deps() != b.ctx.deps() {
        return Err(CsaError::Precondition(
            "bracket of generators in different contexts".into(),
        ));
    }
    let comp = |x: &Expression, y: &Expression| &a.apply(y) - &b.apply(x);
    Ok(Generator {
        ctx: a.ctx.clone(),
        xi: a.xi.iter().zip(&b.xi).map(|(x, y)| comp(x, y)).collect(),
        eta: a.eta.iter().zip(&b.eta).map(|(x, y)| comp(x, y)).collect(),
        imag: vec![false; a.imag.len()],
    })
}

/// Coefficient vectors of generators over a shared column index.
struct Columns {
    index: BTreeMap<(usize, Monomial), usize>,
}

impl Columns {
    fn new() -> Columns {
        Columns {
            index: BTreeMap::new(),
        }
    }

    fn vector(&mut self, g: &Generator, den: &Poly) -> SparseRow {
        let mut row = SparseRow::new();
        for (k, e) in g.components().enumerate() {
            if e.is_zero() {
                continue;
            }
            let factor = den.div_exact(e.denominator()).expect("common denominator");
            for (m, c) in (e.numerator() * &factor).terms() {
                let n = self.index.len();
                let col = *self.index.entry((k, m.clone())).or_insert(n);
                row.insert(col, c.clone());
            }
        }
        row
    }
}

fn common_denominator(gens: &[Generator]) -> Poly {
    gens.iter()
        .flat_map(|g| g.components())
        .filter(|e| !e.is_zero())
        .fold(Poly::one(), |acc, e| lcm(&acc, e.denominator()))
}

/// Keeps the generators not in the span of the earlier ones.
pub fn independent_subset(gens: &[Generator]) -> Vec<Generator> {
    let den = common_denominator(gens);
    let mut cols = Columns::new();
    let mut ech = Echelon::new();
    gens.iter()
        .filter(|g| {
            let v = cols.vector(g, &den);
            ech.insert(&v)
        })
        .cloned()
        .collect()
}

/// Dimension of the span after repeatedly adding brackets.
pub fn closure_dimension(gens: &[Generator], degree_bound: u32) -> Result<usize> {
    let check = |g: &Generator, what: &str| -> Result<()> {
        if !g.is_polynomial() || g.degree() > degree_bound {
            return Err(CsaError::DegreeOverflow(format!(
                "{what} `{g}` exceeds polynomial degree {degree_bound}"
            )));
        }
        Ok(())
    };
    let one = Poly::one();
    let mut cols = Columns::new();
    let mut ech = Echelon::new();
    let mut basis: Vec<Generator> = Vec::new();
    for g in gens {
        check(g, "generator")?;
        if ech.insert(&cols.vector(g, &one)) {
            basis.push(g.clone());
        }
    }
    let mut done = 0;
    while done < basis.len() {
        for k in 0..done {
            let br = lie_bracket(&basis[k], &basis[done])?;
            check(&br, "bracket")?;
            if ech.insert(&cols.vector(&br, &one)) {
                basis.push(br);
            }
        }
        done += 1;
    }
    Ok(basis.len())
}

/// Splits the base generators, removes dependent operators and tags each
/// one by whether it is a symmetry of `sys`.
pub fn classify_split_operators(
    base_gens: &[Generator],
    sys: &DifferentialSystem,
    variant: SplitVariant,
) -> Result<Vec<(Generator, SymmetryVerdict)>> {
    let ops = split_generators(base_gens, variant)?;
    ops.into_iter()
        .map(|g| {
            let mut v = symmetry_residual(&g, sys)?;
            v.tag = if v.is_symmetry {
                Classification::LieSymmetry
            } else {
                Classification::LieLike
            };
            Ok((g, v))
        })
        .collect()
}

/// Role of a coordinate of a generator, for callers working by name.
pub fn component_slot(ctx: &JetContext, name: &str) -> Option<usize> {
    match ctx.role_of_name(name)? {
        SymbolRole::Independent(k) => Some(k),
        SymbolRole::Dependent(k) => Some(ctx.indeps().len() + k),
        _ => None,
    }
}

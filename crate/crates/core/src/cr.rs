//! Cauchy-Riemann conditions of split systems: derivation, evaluation,
//! audit against the published sets, and base reconstruction.
//!
//! A split right side `F = sum_e e F_e` is analytic in a bicomplex argument
//! `A = sum_e e a_e` iff `dF/da_e = e dF/da_1` for every unit present. With
//! `D_e = (1/c_e) d/da_e` the families used here are
//!
//! ```text
//! outer:  (D_i - j D_ij) F = i (D_1 - j D_j) F     (D_i F = i D_1 F without j)
//! inner:  D_j F = j D_1 F,   D_ij F = j D_i F
//! ```
//!
//! taken component by component. Rows touching a component the layout does
//! not have are dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bicomplex::Unit;
use crate::error::{CsaError, Result};
use crate::expr::{format_rational, q, Expression};
use crate::jet::JetContext;
use crate::linalg;
use crate::poly::Symbol;
use crate::printed::{PrintedGroup, Target, GROUPS};
use crate::split::{Combination, Layout};
use crate::system::{DifferentialSystem, Equation, Kind, ScalarODE, SplitVariant};

/// The bicomplex argument a family differentiates in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arg {
    /// The independent variable.
    R,
    /// The dependent variable.
    U,
    /// Its first derivative.
    Du,
    /// The dependents as functions of the independents.
    Jets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Form {
    Outer,
    Inner,
}

/// Condition families that characterize each variant.
pub fn families(variant: SplitVariant) -> Vec<(Arg, Form)> {
    use Arg::*;
    use Form::*;
    match variant {
        SplitVariant::Ode2 => vec![(U, Outer), (Du, Outer)],
        SplitVariant::Ode3 | SplitVariant::Ode3Dual => vec![(U, Inner), (Du, Inner)],
        SplitVariant::Ode4 => vec![(U, Outer), (U, Inner), (Du, Outer), (Du, Inner)],
        SplitVariant::Pde2 => vec![(Jets, Outer), (R, Outer), (U, Outer), (Du, Outer)],
        SplitVariant::Pde4x2 => vec![
            (Jets, Inner),
            (R, Inner),
            (U, Outer),
            (U, Inner),
            (Du, Outer),
            (Du, Inner),
        ],
        SplitVariant::Pde4x2Dual => vec![
            (Jets, Outer),
            (R, Outer),
            (U, Outer),
            (U, Inner),
            (Du, Outer),
            (Du, Inner),
        ],
        SplitVariant::Pde4x4 => vec![
            (Jets, Outer),
            (Jets, Inner),
            (R, Outer),
            (R, Inner),
            (U, Outer),
            (U, Inner),
            (Du, Outer),
            (Du, Inner),
        ],
    }
}

/// Partial derivative of the component `func` in the coordinate `var`.
pub type Atom = (Unit, Unit);
pub type LinearForm = BTreeMap<Atom, BigRational>;

/// A derived condition `left = right` between partial derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub arg: Arg,
    pub form: Form,
    pub left: LinearForm,
    pub right: LinearForm,
}

const ROW_ORDER: [Unit; 4] = [Unit::One, Unit::J, Unit::I, Unit::IJ];

type BiForm = [LinearForm; 4];

fn d(var: Unit, scale: &BigRational) -> BiForm {
    std::array::from_fn(|k| {
        let mut m = LinearForm::new();
        m.insert((Unit::from_bits(k), var), scale.clone());
        m
    })
}

fn times_unit(f: &BiForm, u: Unit) -> BiForm {
    let mut out: BiForm = Default::default();
    for k in Unit::ALL {
        let (s, v) = k.mul(u);
        out[v.bits()] = f[k.bits()]
            .iter()
            .map(|(a, c)| (*a, if s < 0 { -c } else { c.clone() }))
            .collect();
    }
    out
}

fn add_forms(a: &LinearForm, b: &LinearForm, sign: i64) -> LinearForm {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(*k).or_insert_with(BigRational::zero);
        *e = if sign < 0 { &*e - v } else { &*e + v };
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn bi_sub(a: &BiForm, b: &BiForm) -> BiForm {
    std::array::from_fn(|k| add_forms(&a[k], &b[k], -1))
}

/// Units present among functions and among coordinates, plus `1/c_e`.
#[derive(Clone, Debug)]
pub struct FamilyShape {
    pub funcs: BTreeSet<Unit>,
    pub vars: BTreeMap<Unit, BigRational>,
}

/// Derives the rows of one family for the given shape.
pub fn derive_rows(arg: Arg, form: Form, shape: &FamilyShape) -> Vec<Row> {
    let scale = |u: Unit| {
        shape
            .vars
            .get(&u)
            .cloned()
            .unwrap_or_else(BigRational::one)
    };
    let dd = |u: Unit| d(u, &scale(u));
    let full = shape.vars.len() == 4;
    let mut pairs: Vec<(BiForm, BiForm)> = Vec::new();
    match form {
        Form::Outer if full => {
            let l = bi_sub(&dd(Unit::I), &times_unit(&dd(Unit::IJ), Unit::J));
            let r = times_unit(&bi_sub(&dd(Unit::One), &times_unit(&dd(Unit::J), Unit::J)), Unit::I);
            pairs.push((l, r));
        }
        Form::Outer => pairs.push((dd(Unit::I), times_unit(&dd(Unit::One), Unit::I))),
        Form::Inner => {
            pairs.push((dd(Unit::J), times_unit(&dd(Unit::One), Unit::J)));
            pairs.push((dd(Unit::IJ), times_unit(&dd(Unit::I), Unit::J)));
        }
    }
    let present = |f: &LinearForm| {
        f.keys()
            .all(|(fu, vu)| shape.funcs.contains(fu) && shape.vars.contains_key(vu))
    };
    let mut out: Vec<Row> = Vec::new();
    let mut seen = BTreeSet::new();
    for (l, r) in &pairs {
        for k in ROW_ORDER {
            let (left, right) = (&l[k.bits()], &r[k.bits()]);
            if (left.is_empty() && right.is_empty()) || !present(left) || !present(right) {
                continue;
            }
            let (left, right) = normalize_sides(left, right);
            if seen.insert(normalized_difference(&left, &right)) {
                out.push(Row {
                    arg,
                    form,
                    left,
                    right,
                });
            }
        }
    }
    out
}

fn normalize_sides(left: &LinearForm, right: &LinearForm) -> (LinearForm, LinearForm) {
    let first = left
        .values()
        .next()
        .or_else(|| right.values().next())
        .cloned()
        .unwrap_or_else(BigRational::one);
    let inv = first.recip();
    let sc = |f: &LinearForm| f.iter().map(|(k, v)| (*k, v * &inv)).collect();
    (sc(left), sc(right))
}

fn normalized_difference<K: Ord + Clone>(
    left: &BTreeMap<K, BigRational>,
    right: &BTreeMap<K, BigRational>,
) -> Vec<(K, BigRational)> {
    let mut diff = left.clone();
    for (k, v) in right {
        let e = diff.entry(k.clone()).or_insert_with(BigRational::zero);
        *e = &*e - v;
    }
    diff.retain(|_, v| !v.is_zero());
    let first = diff.values().next().cloned().unwrap_or_else(BigRational::one);
    diff.into_iter().map(|(k, v)| (k, v / &first)).collect()
}

/// Names of the components and coordinates of a variant.
#[derive(Clone, Debug)]
pub struct Naming {
    pub layout: Layout,
    pub ctx: JetContext,
    pub combinations: Vec<Combination>,
}

impl Naming {
    pub fn new(variant: SplitVariant, base_indep: &str) -> Result<Naming> {
        let layout = Layout::new(variant, base_indep);
        let ctx = layout.context()?;
        let combinations = layout.combinations(&ctx);
        Ok(Naming {
            layout,
            ctx,
            combinations,
        })
    }

    pub fn for_system(sys: &DifferentialSystem) -> Result<Naming> {
        let variant = sys.variant().ok_or_else(|| {
            CsaError::Precondition("no condition family is defined for a generic system".into())
        })?;
        let naming = Naming::new(variant, sys.ctx.indep(0).name())?;
        if naming.ctx.indeps() != sys.ctx.indeps() || naming.ctx.deps() != sys.ctx.deps() {
            let names = |v: &[Symbol]| v.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ");
            return Err(CsaError::Precondition(format!(
                "kind {variant} expects independents ({}) and dependents ({})",
                names(naming.ctx.indeps()),
                names(naming.ctx.deps())
            )));
        }
        Ok(naming)
    }

    pub fn variant(&self) -> SplitVariant {
        self.layout.variant
    }

    pub fn func_name(&self, arg: Arg, u: Unit) -> String {
        if arg == Arg::Jets {
            let k = self.layout.dep_with_unit(u).expect("dependent with unit");
            return self.layout.deps[k].name.clone();
        }
        match self.variant() {
            SplitVariant::Ode2 | SplitVariant::Pde2 => {
                if u == Unit::One { "fr" } else { "fi" }.to_string()
            }
            _ => match u {
                Unit::One => "g",
                Unit::J => "h",
                Unit::I => "k",
                Unit::IJ => "l",
            }
            .to_string(),
        }
    }

    pub fn var_name(&self, arg: Arg, u: Unit) -> String {
        match arg {
            Arg::R | Arg::Jets => {
                let k = self.layout.indep_with_unit(u).expect("independent with unit");
                self.layout.indeps[k].name.clone()
            }
            Arg::U => {
                let k = self.layout.dep_with_unit(u).expect("dependent with unit");
                self.layout.deps[k].name.clone()
            }
            Arg::Du => {
                if self.variant().is_pde() {
                    self.combination(u).expect("combination").name.clone()
                } else {
                    let k = self.layout.dep_with_unit(u).expect("dependent with unit");
                    self.ctx.jet(k, &[0]).name().to_string()
                }
            }
        }
    }

    pub fn combination(&self, u: Unit) -> Option<&Combination> {
        self.combinations.iter().find(|c| c.unit == u)
    }

    pub fn shape(&self, arg: Arg) -> FamilyShape {
        let funcs: BTreeSet<Unit> = self.layout.deps.iter().map(|c| c.unit).collect();
        let vars: BTreeMap<Unit, BigRational> = match arg {
            Arg::R | Arg::Jets => self
                .layout
                .indeps
                .iter()
                .map(|c| (c.unit, BigRational::one()))
                .collect(),
            Arg::U => self
                .layout
                .deps
                .iter()
                .map(|c| (c.unit, BigRational::one()))
                .collect(),
            Arg::Du if self.variant().is_pde() => self
                .combinations
                .iter()
                .map(|c| (c.unit, c.coefficient.recip()))
                .collect(),
            Arg::Du => self
                .layout
                .deps
                .iter()
                .map(|c| (c.unit, BigRational::one()))
                .collect(),
        };
        FamilyShape { funcs, vars }
    }

    /// Symbol whose partial realizes the coordinate `u` of `arg`.
    fn var_symbol(&self, arg: Arg, u: Unit) -> Symbol {
        match arg {
            Arg::R | Arg::Jets => {
                let k = self.layout.indep_with_unit(u).expect("independent");
                self.ctx.indep(k).clone()
            }
            Arg::U => self.ctx.dep(self.layout.dep_with_unit(u).expect("dependent")).clone(),
            Arg::Du if self.variant().is_pde() => self.combination(u).expect("combination").lead.clone(),
            Arg::Du => self.ctx.jet(self.layout.dep_with_unit(u).expect("dependent"), &[0]),
        }
    }

    pub fn rows(&self, arg: Arg, form: Form) -> Vec<Row> {
        derive_rows(arg, form, &self.shape(arg))
    }

    pub fn form_text(&self, arg: Arg, f: &LinearForm) -> String {
        let items: Vec<(String, BigRational)> = f
            .iter()
            .map(|((fu, vu), c)| {
                (
                    format!("{}_{}", self.func_name(arg, *fu), self.var_name(arg, *vu)),
                    c.clone(),
                )
            })
            .collect();
        linear_text(&items)
    }

    pub fn row_text(&self, row: &Row) -> String {
        format!(
            "{} = {}",
            self.form_text(row.arg, &row.left),
            self.form_text(row.arg, &row.right)
        )
    }
}

fn linear_text(items: &[(String, BigRational)]) -> String {
    if items.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (name, c)) in items.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            s.push_str(&format_rational(&abs));
            s.push('*');
        }
        s.push_str(name);
    }
    s
}

/// One evaluated condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub id: String,
    pub left: Expression,
    pub right: Expression,
    pub residual: Expression,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CRReport {
    pub conditions: Vec<Condition>,
    pub verdict: bool,
    pub deviations: Vec<String>,
    /// Conditions on the solution itself, stated but not evaluated.
    pub solution_constraints: Vec<String>,
}

impl CRReport {
    fn from_conditions(conditions: Vec<Condition>) -> CRReport {
        let verdict = conditions.iter().all(|c| c.pass);
        CRReport {
            conditions,
            verdict,
            deviations: Vec::new(),
            solution_constraints: Vec::new(),
        }
    }

    pub fn failures(&self) -> Vec<String> {
        self.conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.id.clone())
            .collect()
    }

    pub fn view(&self) -> view::ReportView {
        view::report(self)
    }
}

impl fmt::Display for CRReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.conditions.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.conditions {
            writeln!(
                f,
                "{:<width$}  {}  {}",
                c.id,
                if c.pass { "pass" } else { "FAIL" },
                c.residual
            )?;
        }
        for s in &self.solution_constraints {
            writeln!(f, "solution: {s}")?;
        }
        for d in &self.deviations {
            writeln!(f, "deviation: {d}")?;
        }
        writeln!(f, "verdict: {}", if self.verdict { "pass" } else { "fail" })
    }
}

/// Plain serializable mirror of a report.
pub mod view {
    use serde::Serialize;

    #[derive(Serialize, Debug, Clone, PartialEq, Eq)]
    pub struct ConditionValue {
        pub id: String,
        pub residual: String,
        pub pass: bool,
    }

    #[derive(Serialize, Debug, Clone, PartialEq, Eq)]
    pub struct ReportView {
        pub conditions: Vec<ConditionValue>,
        pub verdict: bool,
        pub deviations: Vec<String>,
    }

    pub fn report(r: &super::CRReport) -> ReportView {
        ReportView {
            conditions: r
                .conditions
                .iter()
                .map(|c| ConditionValue {
                    id: c.id.clone(),
                    residual: c.residual.to_string(),
                    pass: c.pass,
                })
                .collect(),
            verdict: r.verdict,
            deviations: r.deviations.clone(),
        }
    }
}

/// Split components `F_e`, i.e. right sides divided by `n^2`.
fn components(naming: &Naming, sys: &DifferentialSystem) -> BTreeMap<Unit, Expression> {
    let n = naming.layout.n() as i64;
    let inv = q(1, n * n);
    naming
        .layout
        .deps
        .iter()
        .zip(&sys.equations)
        .map(|(c, eq)| (c.unit, eq.rhs.scale(&inv)))
        .collect()
}

fn evaluate_form(
    naming: &Naming,
    arg: Arg,
    f: &LinearForm,
    comps: &BTreeMap<Unit, Expression>,
) -> Expression {
    f.iter().fold(Expression::zero(), |acc, ((fu, vu), c)| {
        let v = comps[fu].diff(&naming.var_symbol(arg, *vu));
        &acc + &v.scale(c)
    })
}

fn evaluate_rows(
    naming: &Naming,
    rows: &[Row],
    comps: &BTreeMap<Unit, Expression>,
) -> Vec<Condition> {
    rows.iter()
        .map(|row| {
            let left = evaluate_form(naming, row.arg, &row.left, comps);
            let right = evaluate_form(naming, row.arg, &row.right, comps);
            let residual = &left - &right;
            Condition {
                id: naming.row_text(row),
                pass: residual.is_zero(),
                left,
                right,
                residual,
            }
        })
        .collect()
}

/// Rows evaluated by [`check_cr`], in report order.
pub fn point_rows(naming: &Naming) -> Vec<Row> {
    let variant = naming.variant();
    let mut rows = Vec::new();
    for (arg, form) in families(variant) {
        let keep = match arg {
            Arg::R | Arg::U => true,
            Arg::Du => !variant.is_pde(),
            Arg::Jets => false,
        };
        if keep {
            rows.extend(naming.rows(arg, form));
        }
    }
    dedupe_rows(rows)
}

fn dedupe_rows(rows: Vec<Row>) -> Vec<Row> {
    let mut seen = BTreeSet::new();
    rows.into_iter()
        .filter(|r| seen.insert((r.arg, normalized_difference(&r.left, &r.right))))
        .collect()
}

/// Rows evaluated by [`check_derivative_dependence`] after the annihilation
/// identities.
pub fn combination_rows(naming: &Naming) -> Vec<Row> {
    let rows = families(naming.variant())
        .into_iter()
        .filter(|(a, _)| *a == Arg::Du)
        .flat_map(|(a, f)| naming.rows(a, f))
        .collect();
    dedupe_rows(rows)
}

pub fn solution_rows(naming: &Naming) -> Vec<Row> {
    let rows = families(naming.variant())
        .into_iter()
        .filter(|(a, _)| *a == Arg::Jets)
        .flat_map(|(a, f)| naming.rows(a, f))
        .collect();
    dedupe_rows(rows)
}

fn lhs_conditions(naming: &Naming, sys: &DifferentialSystem) -> Vec<Condition> {
    naming
        .layout
        .deps
        .iter()
        .zip(&sys.equations)
        .map(|(c, eq)| {
            let expected = naming.layout.lhs_pattern(&naming.ctx, c.unit);
            let residual = &eq.lhs - &expected;
            Condition {
                id: format!("lhs {} = {}", c.name, expected),
                pass: residual.is_zero(),
                left: eq.lhs.clone(),
                right: expected,
                residual,
            }
        })
        .collect()
}

/// Evaluates the point-level conditions and the left-side patterns.
pub fn check_cr(sys: &DifferentialSystem) -> Result<CRReport> {
    let naming = Naming::for_system(sys)?;
    let comps = components(&naming, sys);
    let mut conditions = lhs_conditions(&naming, sys);
    conditions.extend(evaluate_rows(&naming, &point_rows(&naming), &comps));
    let mut report = CRReport::from_conditions(conditions);
    report.solution_constraints = solution_rows(&naming)
        .iter()
        .map(|r| naming.row_text(r))
        .collect();
    report.deviations = deviations_for(&naming, |g| {
        !matches!(g.target, Target::Rows(f) if f.iter().all(|(a, _)| *a == Arg::Du))
    });
    Ok(report)
}

/// Dependence on first derivatives only through the combinations, then the
/// combination-level conditions.
pub fn check_derivative_dependence(sys: &DifferentialSystem) -> Result<CRReport> {
    let naming = Naming::for_system(sys)?;
    if !naming.variant().is_pde() {
        return Err(CsaError::Precondition(
            "derivative combinations exist only for the PDE variants".into(),
        ));
    }
    let comps = components(&naming, sys);
    let mut conditions = Vec::new();
    for (c, eq) in naming.layout.deps.iter().zip(&sys.equations) {
        let fname = naming.func_name(Arg::Du, c.unit);
        for comb in &naming.combinations {
            let lead = eq.rhs.diff(&comb.lead);
            for (jet, sign) in comb.terms.iter().skip(1) {
                let left = eq.rhs.diff(jet);
                let right = lead.scale(&q(*sign, 1));
                let residual = &left - &right;
                conditions.push(Condition {
                    id: format!(
                        "d{fname}/d{jet} = {}{fname}_{}",
                        if *sign < 0 { "-" } else { "" },
                        comb.name
                    ),
                    pass: residual.is_zero(),
                    left,
                    right,
                    residual,
                });
            }
        }
    }
    conditions.extend(evaluate_rows(&naming, &combination_rows(&naming), &comps));
    let mut report = CRReport::from_conditions(conditions);
    report.deviations = deviations_for(&naming, |g| match g.target {
        Target::Combinations => true,
        Target::Rows(f) => f.iter().all(|(a, _)| *a == Arg::Du),
    });
    Ok(report)
}

/// Both checks, as appropriate for the kind.
pub fn check_all(sys: &DifferentialSystem) -> Result<CRReport> {
    let mut report = check_cr(sys)?;
    if sys.variant().is_some_and(SplitVariant::is_pde) {
        let more = check_derivative_dependence(sys)?;
        report.conditions.extend(more.conditions);
        report.deviations.extend(more.deviations);
        report.verdict = report.conditions.iter().all(|c| c.pass);
    }
    Ok(report)
}

fn deviations_for(naming: &Naming, select: impl Fn(&PrintedGroup) -> bool) -> Vec<String> {
    GROUPS
        .iter()
        .filter(|g| g.variant == naming.variant() && select(g))
        .flat_map(|g| {
            let audit = audit_group_with(g, naming);
            audit.deviations()
        })
        .collect()
}

/// Outcome of comparing a printed group with the derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Audit {
    pub group: String,
    /// Printed rows with no derived counterpart.
    pub printed_only: Vec<String>,
    /// Derived rows absent from the printed group.
    pub derived_only: Vec<String>,
}

impl Audit {
    pub fn is_exact(&self) -> bool {
        self.printed_only.is_empty() && self.derived_only.is_empty()
    }

    pub fn deviations(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .printed_only
            .iter()
            .map(|r| format!("{}: printed `{r}` is not derived", self.group))
            .collect();
        out.extend(
            self.derived_only
                .iter()
                .map(|r| format!("{}: derived `{r}` is not printed", self.group)),
        );
        out
    }
}

type NamedForm = BTreeMap<String, BigRational>;

/// Parses `a_b + c_d = -e_f` style rows into named linear forms.
fn parse_named_row(row: &str) -> Result<(NamedForm, NamedForm)> {
    let (l, r) = row
        .split_once('=')
        .ok_or_else(|| CsaError::Format(format!("printed row `{row}` lacks `=`")))?;
    Ok((parse_named_form(l)?, parse_named_form(r)?))
}

fn parse_named_form(text: &str) -> Result<NamedForm> {
    let mut out = NamedForm::new();
    let mut sign = 1;
    let mut coeff: Option<BigRational> = None;
    let cleaned = text.replace('-', " - ").replace('+', " + ").replace('*', " * ");
    for tok in cleaned.split_whitespace() {
        match tok {
            "+" => sign = 1,
            "-" => sign = -sign,
            "*" => {}
            t if t.chars().next().is_some_and(|c| c.is_ascii_digit()) => {
                let v: BigRational = t
                    .parse()
                    .map_err(|_| CsaError::Format(format!("bad coefficient `{t}`")))?;
                coeff = Some(v);
            }
            t => {
                let c = coeff.take().unwrap_or_else(BigRational::one) * q(sign, 1);
                let e = out.entry(t.to_string()).or_insert_with(BigRational::zero);
                *e = &*e + c;
                sign = 1;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn named(naming: &Naming, arg: Arg, f: &LinearForm) -> NamedForm {
    f.iter()
        .map(|((fu, vu), c)| {
            (
                format!("{}_{}", naming.func_name(arg, *fu), naming.var_name(arg, *vu)),
                c.clone(),
            )
        })
        .collect()
}

fn named_text(f: &NamedForm) -> String {
    let items: Vec<(String, BigRational)> = f.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    linear_text(&items)
}

pub fn audit_group(group: &PrintedGroup) -> Result<Audit> {
    let naming = Naming::new(group.variant, "r")?;
    Ok(audit_group_with(group, &naming))
}

fn audit_group_with(group: &PrintedGroup, naming: &Naming) -> Audit {
    let mut audit = Audit {
        group: group.id.to_string(),
        printed_only: Vec::new(),
        derived_only: Vec::new(),
    };
    match group.target {
        Target::Combinations => {
            let derived: BTreeMap<String, NamedForm> = naming
                .combinations
                .iter()
                .map(|c| {
                    let f = c
                        .terms
                        .iter()
                        .map(|(jet, s)| (jet.name().to_string(), q(*s, 1)))
                        .collect();
                    (c.name.clone(), f)
                })
                .collect();
            let mut matched = BTreeSet::new();
            for row in group.rows {
                let ok = parse_named_row(row).ok().and_then(|(l, r)| {
                    let name = l.keys().next()?.clone();
                    (derived.get(&name) == Some(&r)).then_some(name)
                });
                match ok {
                    Some(name) => {
                        matched.insert(name);
                    }
                    None => audit.printed_only.push(row.to_string()),
                }
            }
            for (name, f) in &derived {
                if !matched.contains(name) {
                    audit.derived_only.push(format!("{name} = {}", named_text(f)));
                }
            }
        }
        Target::Rows(fams) => {
            let mut derived: Vec<(Vec<(String, BigRational)>, String)> = Vec::new();
            for (arg, form) in fams {
                for row in naming.rows(*arg, *form) {
                    let key = normalized_difference(
                        &named(naming, *arg, &row.left),
                        &named(naming, *arg, &row.right),
                    );
                    if !derived.iter().any(|(k, _)| *k == key) {
                        derived.push((key, naming.row_text(&row)));
                    }
                }
            }
            let mut used = vec![false; derived.len()];
            for row in group.rows {
                let key = parse_named_row(row)
                    .ok()
                    .map(|(l, r)| normalized_difference(&l, &r));
                match key.and_then(|k| derived.iter().position(|(d, _)| *d == k)) {
                    Some(p) => used[p] = true,
                    None => audit.printed_only.push(row.to_string()),
                }
            }
            for ((_, text), u) in derived.iter().zip(used) {
                if !u {
                    audit.derived_only.push(text.clone());
                }
            }
        }
    }
    audit
}

/// Audits every printed group.
pub fn audit_all() -> Result<Vec<Audit>> {
    GROUPS.iter().map(audit_group).collect()
}

/// Perturbs the right sides by linear terms so that exactly the point
/// condition with the given index changes, by `+1` in its normalized form.
pub fn perturb(sys: &DifferentialSystem, index: usize) -> Result<DifferentialSystem> {
    let naming = Naming::for_system(sys)?;
    let rows = point_rows(&naming);
    if index >= rows.len() {
        return Err(CsaError::Precondition(format!(
            "condition index {index} out of range ({} conditions)",
            rows.len()
        )));
    }
    let mut atoms: Vec<(Arg, Atom)> = Vec::new();
    let mut linear_rows: Vec<BTreeMap<usize, BigRational>> = Vec::new();
    for row in &rows {
        let diff = add_forms(&row.left, &row.right, -1);
        let mut m = BTreeMap::new();
        for (a, c) in diff {
            let key = (row.arg, a);
            let col = match atoms.iter().position(|x| *x == key) {
                Some(p) => p,
                None => {
                    atoms.push(key);
                    atoms.len() - 1
                }
            };
            m.insert(col, c);
        }
        linear_rows.push(m);
    }
    let system: Vec<(BTreeMap<usize, BigRational>, BigRational)> = linear_rows
        .into_iter()
        .enumerate()
        .map(|(k, r)| (r, if k == index { BigRational::one() } else { BigRational::zero() }))
        .collect();
    let solution = linalg::solve(&system, atoms.len()).ok_or_else(|| {
        CsaError::Precondition("conditions are dependent; no isolated perturbation".into())
    })?;
    let n = naming.layout.n() as i64;
    let mut out = sys.clone();
    for ((arg, (fu, vu)), a) in atoms.iter().zip(solution) {
        if a.is_zero() {
            continue;
        }
        let k = naming.layout.dep_with_unit(*fu).expect("dependent");
        let var = Expression::symbol(naming.var_symbol(*arg, *vu));
        let scale = naming.shape(*arg).vars[vu].recip();
        let term = var.scale(&(a * scale * q(n * n, 1)));
        out.equations[k].rhs = &out.equations[k].rhs + &term;
    }
    Ok(out)
}

/// Identifier of the point condition with the given index.
pub fn point_condition_id(sys: &DifferentialSystem, index: usize) -> Result<String> {
    let naming = Naming::for_system(sys)?;
    point_rows(&naming)
        .get(index)
        .map(|r| naming.row_text(r))
        .ok_or_else(|| CsaError::Precondition(format!("condition index {index} out of range")))
}

/// Recovers the base equation by restricting to the real slice.
pub fn reconstruct_base(sys: &DifferentialSystem) -> Result<ScalarODE> {
    let naming = Naming::for_system(sys)?;
    let report = check_all(sys)?;
    if !report.verdict {
        return Err(CsaError::Precondition(format!(
            "conditions fail: {}",
            report.failures().join("; ")
        )));
    }
    let layout = &naming.layout;
    let pde = naming.variant().is_pde();
    let indep = if pde { "r".to_string() } else { layout.indeps[0].name.clone() };
    let r = Expression::var(&indep);
    let u = Expression::var("u");
    let du = Expression::var("u'");
    let mut slice = BTreeMap::new();
    for (a, c) in layout.indeps.iter().enumerate() {
        let v = if c.unit == Unit::One { r.clone() } else { Expression::zero() };
        slice.insert(naming.ctx.indep(a).clone(), v);
    }
    for (b, cb) in layout.deps.iter().enumerate() {
        let v = if cb.unit == Unit::One { u.clone() } else { Expression::zero() };
        slice.insert(naming.ctx.dep(b).clone(), v);
        for (a, ca) in layout.indeps.iter().enumerate() {
            let v = if ca.unit == cb.unit { du.clone() } else { Expression::zero() };
            slice.insert(naming.ctx.jet(b, &[a]), v);
        }
    }
    let k = layout.dep_with_unit(Unit::One).expect("real dependent");
    let n = layout.n() as i64;
    let f = sys.equations[k].rhs.substitute(&slice)?.scale(&q(1, n * n));
    let params: Vec<&str> = sys.ctx.params().iter().map(|s| s.name()).collect();
    ScalarODE::with_params(&indep, "u", &params, f)
}

/// System of the kind with every right side zero.
pub fn free_system(variant: SplitVariant, base_indep: &str) -> Result<DifferentialSystem> {
    let naming = Naming::new(variant, base_indep)?;
    let eqs = naming
        .layout
        .deps
        .iter()
        .map(|c| Equation {
            lhs: naming.layout.lhs_pattern(&naming.ctx, c.unit),
            rhs: Expression::zero(),
        })
        .collect();
    DifferentialSystem::new(naming.ctx.clone(), Kind::Variant(variant), eqs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode4_outer_first_row() {
        let naming = Naming::new(SplitVariant::Ode4, "r").unwrap();
        let rows = naming.rows(Arg::U, Form::Outer);
        let texts: Vec<String> = rows.iter().map(|r| naming.row_text(r)).collect();
        assert!(texts.contains(&"g_y + h_z = -k_w - l_x".to_string()), "{texts:?}");
        assert_eq!(rows.len(), 4);
    }

    #[test]
    fn ode3_inner_drops_absent_components() {
        let naming = Naming::new(SplitVariant::Ode3, "r").unwrap();
        let texts: Vec<String> = naming
            .rows(Arg::U, Form::Inner)
            .iter()
            .map(|r| naming.row_text(r))
            .collect();
        assert_eq!(texts, vec!["k_z = -l_y", "l_z = k_y"]);
    }

    #[test]
    fn named_form_parsing() {
        let (l, r) = parse_named_row("g_w' + h_x' = -k_y' + 2*l_z'").unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(r["k_y'"], q(-1, 1));
        assert_eq!(r["l_z'"], q(2, 1));
    }

    #[test]
    fn free_systems_pass() {
        for v in SplitVariant::ALL {
            let sys = free_system(v, "r").unwrap();
            assert!(check_all(&sys).unwrap().verdict, "{v}");
        }
    }
}

//! Single and double complex splitting of scalar second-order equations.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::bicomplex::{expand_with, BicomplexExpression, Unit};
use crate::cr::{self, Condition};
use crate::error::{CsaError, Result};
use crate::expr::{q, Expression};
use crate::jet::JetContext;
use crate::poly::Symbol;
use crate::symmetry::Generator;
use crate::system::{DifferentialSystem, Equation, Kind, ScalarODE, SplitVariant};

/// A real coordinate carrying one bicomplex unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub name: String,
    pub unit: Unit,
}

fn coords(spec: &[(&str, Unit)]) -> Vec<Coordinate> {
    spec.iter()
        .map(|(n, u)| Coordinate {
            name: n.to_string(),
            unit: *u,
        })
        .collect()
}

/// Variables of a split system and the units they carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub variant: SplitVariant,
    pub indeps: Vec<Coordinate>,
    pub deps: Vec<Coordinate>,
}

impl Layout {
    /// `base_indep` names the independent of ODE variants.
    pub fn new(variant: SplitVariant, base_indep: &str) -> Layout {
        use Unit::*;
        let full = [("w", One), ("x", J), ("y", I), ("z", IJ)];
        let (indeps, deps): (Vec<(&str, Unit)>, Vec<(&str, Unit)>) = match variant {
            SplitVariant::Ode2 => (vec![(base_indep, One)], vec![("p", One), ("q", I)]),
            SplitVariant::Ode3 => (vec![(base_indep, One)], vec![("x", One), ("y", I), ("z", IJ)]),
            SplitVariant::Ode3Dual => {
                (vec![(base_indep, One)], vec![("x", One), ("y", J), ("z", I)])
            }
            SplitVariant::Ode4 => (vec![(base_indep, One)], full.to_vec()),
            SplitVariant::Pde2 => (vec![("s", One), ("t", I)], vec![("p", One), ("q", I)]),
            SplitVariant::Pde4x2 => (vec![("s", One), ("t", J)], full.to_vec()),
            SplitVariant::Pde4x2Dual => (vec![("s", One), ("t", I)], full.to_vec()),
            SplitVariant::Pde4x4 => (
                vec![("s", One), ("t", J), ("u", I), ("v", IJ)],
                full.to_vec(),
            ),
        };
        Layout {
            variant,
            indeps: coords(&indeps),
            deps: coords(&deps),
        }
    }

    /// Number of real independents.
    pub fn n(&self) -> usize {
        self.indeps.len()
    }

    pub fn context(&self) -> Result<JetContext> {
        let i: Vec<&str> = self.indeps.iter().map(|c| c.name.as_str()).collect();
        let d: Vec<&str> = self.deps.iter().map(|c| c.name.as_str()).collect();
        JetContext::new(&i, &d)
    }

    pub fn dep_with_unit(&self, unit: Unit) -> Option<usize> {
        self.deps.iter().position(|c| c.unit == unit)
    }

    pub fn indep_with_unit(&self, unit: Unit) -> Option<usize> {
        self.indeps.iter().position(|c| c.unit == unit)
    }

    /// `sum_a e_a x_a`.
    pub fn indep_value(&self) -> BicomplexExpression {
        combine(&self.indeps, |c| Expression::var(&c.name))
    }

    /// `sum_b e_b w_b`.
    pub fn dep_value(&self) -> BicomplexExpression {
        combine(&self.deps, |c| Expression::var(&c.name))
    }

    /// `d/dr` of the dependent, `(1/n) sum_{a,b} e_a^-1 e_b (w_b)_a`.
    pub fn first_derivative_value(&self, ctx: &JetContext) -> BicomplexExpression {
        let mut acc = BicomplexExpression::default();
        for (a, ca) in self.indeps.iter().enumerate() {
            let (sa, ua) = ca.unit.inverse();
            for (b, cb) in self.deps.iter().enumerate() {
                let (sb, u) = ua.mul(cb.unit);
                let jet = Expression::symbol(ctx.jet(b, &[a])).scale(&q(sa * sb, 1));
                acc = &acc + &BicomplexExpression::along(u, jet);
            }
        }
        acc.scale(&q(1, self.n() as i64))
    }

    /// Left side `n^2 d^2/dr^2` of the dependent, component `unit`.
    pub fn lhs_pattern(&self, ctx: &JetContext, unit: Unit) -> Expression {
        let mut acc = Expression::zero();
        for (a, ca) in self.indeps.iter().enumerate() {
            let (sa, ua) = ca.unit.inverse();
            for (c, cc) in self.indeps.iter().enumerate() {
                let (sc, uc) = cc.unit.inverse();
                let (s1, uac) = ua.mul(uc);
                for (b, cb) in self.deps.iter().enumerate() {
                    let (s2, u) = uac.mul(cb.unit);
                    if u != unit {
                        continue;
                    }
                    let jet = Expression::symbol(ctx.jet(b, &[a, c]));
                    acc = &acc + &jet.scale(&q(sa * sc * s1 * s2, 1));
                }
            }
        }
        acc
    }

    /// Combinations of first-order jets through which a split right side
    /// depends on derivatives, one per unit.
    pub fn combinations(&self, ctx: &JetContext) -> Vec<Combination> {
        let names: [&str; 4] = match self.variant {
            SplitVariant::Pde2 => ["phi", "psi", "", ""],
            SplitVariant::Pde4x2 => ["phi", "kappa", "psi", "lambda"],
            SplitVariant::Pde4x2Dual | SplitVariant::Pde4x4 => ["alpha", "gamma", "beta", "delta"],
            _ => return Vec::new(),
        };
        let order = [Unit::One, Unit::J, Unit::I, Unit::IJ];
        let mut out = Vec::new();
        for unit in order {
            let mut terms: Vec<(usize, usize, i64)> = Vec::new();
            for (a, ca) in self.indeps.iter().enumerate() {
                let (sa, ua) = ca.unit.inverse();
                for (b, cb) in self.deps.iter().enumerate() {
                    let (sb, u) = ua.mul(cb.unit);
                    if u == unit {
                        terms.push((b, a, sa * sb));
                    }
                }
            }
            if terms.is_empty() {
                continue;
            }
            terms.sort();
            let lead_sign = terms[0].2;
            let definition = terms.iter().fold(Expression::zero(), |acc, &(b, a, s)| {
                &acc + &Expression::symbol(ctx.jet(b, &[a])).scale(&q(s * lead_sign, 1))
            });
            out.push(Combination {
                name: names[unit.bits()].to_string(),
                unit,
                coefficient: q(lead_sign, self.n() as i64),
                lead: ctx.jet(terms[0].0, &[terms[0].1]),
                terms: terms
                    .iter()
                    .map(|&(b, a, s)| (ctx.jet(b, &[a]), s * lead_sign))
                    .collect(),
                definition,
            });
        }
        out
    }

    /// Wirtinger weight of each coordinate: `d/dZ = sum weight * d/dx`.
    fn weights(coords: &[Coordinate]) -> Vec<BicomplexExpression> {
        coords
            .iter()
            .map(|c| {
                let ibit = c.unit.bits() & 1;
                let part = coords.iter().filter(|d| d.unit.bits() & 1 == ibit).count();
                let other_half = coords.iter().any(|d| d.unit.bits() & 1 != ibit);
                let den = part as i64 * if other_half { 2 } else { 1 };
                let (s, u) = c.unit.inverse();
                BicomplexExpression::along(u, Expression::constant(q(s, den)))
            })
            .collect()
    }
}

fn combine(coords: &[Coordinate], f: impl Fn(&Coordinate) -> Expression) -> BicomplexExpression {
    coords.iter().fold(BicomplexExpression::default(), |acc, c| {
        &acc + &BicomplexExpression::along(c.unit, f(c))
    })
}

/// Linear combination of first-order jets, e.g. `phi = p_s + q_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    pub name: String,
    pub unit: Unit,
    /// The combination enters `u'` as `coefficient * unit * definition`.
    pub coefficient: BigRational,
    pub lead: Symbol,
    pub terms: Vec<(Symbol, i64)>,
    pub definition: Expression,
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub system: DifferentialSystem,
    /// Base symbol and the bicomplex value it was replaced by.
    pub substitution: Vec<(Symbol, BicomplexExpression)>,
    /// Recipe consistency residuals (three-equation variants only).
    pub residuals: Vec<Expression>,
    pub conditions: Vec<Condition>,
}

/// Substitution of the base symbols by bicomplex values.
pub fn substitution_map(
    ode: &ScalarODE,
    layout: &Layout,
    ctx: &JetContext,
) -> BTreeMap<Symbol, BicomplexExpression> {
    let mut map = BTreeMap::new();
    map.insert(ode.indep().clone(), layout.indep_value());
    map.insert(ode.dep().clone(), layout.dep_value());
    map.insert(ode.first_jet(), layout.first_derivative_value(ctx));
    map
}

fn check_names(ode: &ScalarODE, ctx: &JetContext) -> Result<()> {
    for p in ode.ctx.params() {
        if ctx.role(p).is_some() {
            return Err(CsaError::Precondition(format!(
                "parameter `{p}` collides with a split variable"
            )));
        }
    }
    Ok(())
}

pub fn split(ode: &ScalarODE, variant: SplitVariant) -> Result<SplitResult> {
    let layout = Layout::new(variant, ode.indep().name());
    let base_ctx = layout.context()?;
    check_names(ode, &base_ctx)?;
    let params: Vec<&str> = ode.ctx.params().iter().map(|s| s.name()).collect();
    let names = |v: &[Coordinate]| v.iter().map(|c| c.name.clone()).collect::<Vec<_>>();
    let (i, d) = (names(&layout.indeps), names(&layout.deps));
    let ctx = JetContext::with_params(
        &i.iter().map(String::as_str).collect::<Vec<_>>(),
        &d.iter().map(String::as_str).collect::<Vec<_>>(),
        &params,
    )?;
    let map = substitution_map(ode, &layout, &ctx);
    let f = expand_with(&ode.rhs, &map)?;
    let n2 = q((layout.n() * layout.n()) as i64, 1);
    let mut equations = Vec::new();
    let mut residuals = Vec::new();
    for c in &layout.deps {
        let lhs = layout.lhs_pattern(&ctx, c.unit);
        let rhs = f.component(c.unit).scale(&n2);
        equations.push(Equation { lhs, rhs });
    }
    match variant {
        SplitVariant::Ode3 => {
            // g keeps the terms free of the imaginary part
            let mut real = BTreeMap::new();
            real.insert(ode.dep().clone(), Expression::var("x"));
            real.insert(ode.first_jet(), Expression::symbol(ctx.jet(0, &[0])));
            let g = ode.rhs.substitute(&real)?;
            residuals.push(&g - f.component(Unit::One));
            residuals.push(-f.component(Unit::J));
            equations[0].rhs = g;
        }
        SplitVariant::Ode3Dual => residuals.push(f.component(Unit::IJ).clone()),
        _ => {}
    }
    let system = DifferentialSystem::new(ctx, Kind::Variant(variant), equations)?;
    let report = cr::check_cr(&system)?;
    if !report.verdict {
        return Err(CsaError::Precondition(format!(
            "split output violates its own conditions: {}",
            report.failures().join("; ")
        )));
    }
    Ok(SplitResult {
        system,
        substitution: map.into_iter().collect(),
        residuals,
        conditions: report.conditions,
    })
}

/// Real operators from a complex generator `xi d/dr + eta d/du`, one per
/// bicomplex component, with the Wirtinger weights of the layout.
pub fn split_generator(gen: &Generator, variant: SplitVariant) -> Result<Vec<Generator>> {
    let ode_ctx = &gen.ctx;
    if ode_ctx.indeps().len() != 1 || ode_ctx.deps().len() != 1 {
        return Err(CsaError::Precondition(
            "split_generator expects a scalar generator".into(),
        ));
    }
    let layout = Layout::new(variant, ode_ctx.indep(0).name());
    let ctx = layout.context()?;
    let mut map = BTreeMap::new();
    map.insert(ode_ctx.indep(0).clone(), layout.indep_value());
    map.insert(ode_ctx.dep(0).clone(), layout.dep_value());
    let xi = expand_with(&gen.xi[0], &map)?;
    let eta = expand_with(&gen.eta[0], &map)?;
    let wx = Layout::weights(&layout.indeps);
    let wu = Layout::weights(&layout.deps);
    let xi_parts: Vec<BicomplexExpression> = wx.iter().map(|w| &xi * w).collect();
    let eta_parts: Vec<BicomplexExpression> = wu.iter().map(|w| &eta * w).collect();
    let units: &[Unit] = if variant.is_double() {
        &Unit::ALL
    } else {
        &[Unit::One, Unit::I]
    };
    let imag_dep = |c: &Coordinate| variant == SplitVariant::Ode3Dual && c.unit == Unit::I;
    let mut out: Vec<Generator> = Vec::new();
    for &u in units {
        let g = Generator {
            ctx: ctx.clone(),
            xi: xi_parts.iter().map(|b| b.component(u).clone()).collect(),
            eta: eta_parts.iter().map(|b| b.component(u).clone()).collect(),
            imag: layout
                .indeps
                .iter()
                .map(|_| false)
                .chain(layout.deps.iter().map(imag_dep))
                .collect(),
        };
        if g.is_zero() {
            continue;
        }
        out.push(g.normalized());
    }
    Ok(crate::symmetry::independent_subset(&out))
}

/// Splits every generator and removes linearly dependent operators.
pub fn split_generators(gens: &[Generator], variant: SplitVariant) -> Result<Vec<Generator>> {
    let mut all = Vec::new();
    for g in gens {
        all.extend(split_generator(g, variant)?);
    }
    Ok(crate::symmetry::independent_subset(&all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pde2_pattern_and_combinations() {
        let layout = Layout::new(SplitVariant::Pde2, "r");
        let ctx = layout.context().unwrap();
        assert_eq!(
            layout.lhs_pattern(&ctx, Unit::One).to_string(),
            "p_ss - p_tt + 2*q_st"
        );
        assert_eq!(
            layout.lhs_pattern(&ctx, Unit::I).to_string(),
            "-2*p_st + q_ss - q_tt"
        );
        let c = layout.combinations(&ctx);
        assert_eq!(c[0].definition.to_string(), "p_s + q_t");
        assert_eq!(c[1].definition.to_string(), "p_t - q_s");
        assert_eq!(c[1].coefficient, q(-1, 2));
    }

    #[test]
    fn wirtinger_weights_sum_to_one() {
        for v in SplitVariant::ALL {
            let layout = Layout::new(v, "r");
            for coords in [&layout.indeps, &layout.deps] {
                let w = Layout::weights(coords);
                let total = coords.iter().zip(&w).fold(BicomplexExpression::default(), |acc, (c, w)| {
                    &acc + &(w * &BicomplexExpression::unit(c.unit))
                });
                assert_eq!(total, BicomplexExpression::real(Expression::one()), "{v}");
            }
        }
    }
}

//! Jet space coordinates and total derivatives.

use std::collections::BTreeSet;

use crate::error::{CsaError, Result};
use crate::expr::Expression;
use crate::poly::Symbol;

/// What a symbol denotes inside a [`JetContext`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolRole {
    Independent(usize),
    Dependent(usize),
    /// Derivative of dependent `dep` along the sorted independent indices.
    Jet { dep: usize, index: Vec<usize> },
    Parameter,
}

/// Independent and dependent variables plus the jet naming scheme.
///
/// With one independent `r` the jets of `u` are `u'`, `u''`. With several
/// independents (single-letter names) a jet is `u_st`, its indices sorted
/// by declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetContext {
    indeps: Vec<Symbol>,
    deps: Vec<Symbol>,
    params: Vec<Symbol>,
    max_order: usize,
}

impl JetContext {
    pub fn new(indeps: &[&str], deps: &[&str]) -> Result<Self> {
        JetContext::with_params(indeps, deps, &[])
    }

    pub fn with_params(indeps: &[&str], deps: &[&str], params: &[&str]) -> Result<Self> {
        let ctx = JetContext {
            indeps: indeps.iter().map(|s| Symbol::new(s)).collect(),
            deps: deps.iter().map(|s| Symbol::new(s)).collect(),
            params: params.iter().map(|s| Symbol::new(s)).collect(),
            max_order: 2,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    fn validate(&self) -> Result<()> {
        if self.indeps.is_empty() || self.deps.is_empty() {
            return Err(CsaError::Context(
                "need at least one independent and one dependent".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for s in self.indeps.iter().chain(&self.deps).chain(&self.params) {
            let n = s.name();
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric());
            if !valid {
                return Err(CsaError::Context(format!("invalid symbol name `{n}`")));
            }
            if n == "i" || n == "j" {
                return Err(CsaError::Context(format!(
                    "`{n}` is reserved for an imaginary unit"
                )));
            }
            if !seen.insert(n.to_string()) {
                return Err(CsaError::Context(format!("symbol `{n}` declared twice")));
            }
        }
        if self.indeps.len() > 1 && self.indeps.iter().any(|s| s.name().len() != 1) {
            return Err(CsaError::Context(
                "with several independents their names must be single letters".into(),
            ));
        }
        Ok(())
    }

    pub fn indeps(&self) -> &[Symbol] {
        &self.indeps
    }

    pub fn deps(&self) -> &[Symbol] {
        &self.deps
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn indep(&self, k: usize) -> &Symbol {
        &self.indeps[k]
    }

    pub fn dep(&self, k: usize) -> &Symbol {
        &self.deps[k]
    }

    pub fn indep_index(&self, name: &str) -> Option<usize> {
        self.indeps.iter().position(|s| s.name() == name)
    }

    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.deps.iter().position(|s| s.name() == name)
    }

    pub fn is_single_indep(&self) -> bool {
        self.indeps.len() == 1
    }

    /// Name of the jet coordinate `d^|index| dep / d indices`.
    pub fn jet(&self, dep: usize, index: &[usize]) -> Symbol {
        let mut index = index.to_vec();
        index.sort_unstable();
        if index.is_empty() {
            return self.deps[dep].clone();
        }
        let base = self.deps[dep].name();
        if self.is_single_indep() {
            Symbol::new(&format!("{base}{}", "'".repeat(index.len())))
        } else {
            let letters: String = index.iter().map(|&k| self.indeps[k].name()).collect();
            Symbol::new(&format!("{base}_{letters}"))
        }
    }

    /// All multi-indices of the given order, sorted.
    pub fn multi_indices(&self, order: usize) -> Vec<Vec<usize>> {
        fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for k in start..n {
                cur.push(k);
                rec(n, k, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(self.indeps.len(), 0, order, &mut Vec::new(), &mut out);
        out
    }

    /// Jet coordinates of exactly the given order as `(dep, index, symbol)`.
    pub fn jets_of_order(&self, order: usize) -> Vec<(usize, Vec<usize>, Symbol)> {
        let mut out = Vec::new();
        for d in 0..self.deps.len() {
            for idx in self.multi_indices(order) {
                let s = self.jet(d, &idx);
                out.push((d, idx, s));
            }
        }
        out
    }

    /// Classifies a name; jets of any order are recognized.
    pub fn role_of_name(&self, name: &str) -> Option<SymbolRole> {
        if let Some(k) = self.indep_index(name) {
            return Some(SymbolRole::Independent(k));
        }
        if let Some(k) = self.dep_index(name) {
            return Some(SymbolRole::Dependent(k));
        }
        if self.params.iter().any(|p| p.name() == name) {
            return Some(SymbolRole::Parameter);
        }
        if self.is_single_indep() {
            let base = name.trim_end_matches('\'');
            let order = name.len() - base.len();
            if order > 0 {
                let dep = self.dep_index(base)?;
                return Some(SymbolRole::Jet {
                    dep,
                    index: vec![0; order],
                });
            }
            return None;
        }
        let (base, letters) = name.split_once('_')?;
        let dep = self.dep_index(base)?;
        if letters.is_empty() {
            return None;
        }
        let mut index = Vec::new();
        for c in letters.chars() {
            index.push(self.indep_index(&c.to_string())?);
        }
        if index.windows(2).any(|w| w[0] > w[1]) {
            return None;
        }
        Some(SymbolRole::Jet { dep, index })
    }

    pub fn role(&self, s: &Symbol) -> Option<SymbolRole> {
        self.role_of_name(s.name())
    }

    pub fn order_of(&self, s: &Symbol) -> usize {
        match self.role(s) {
            Some(SymbolRole::Jet { index, .. }) => index.len(),
            _ => 0,
        }
    }

    /// Highest jet order occurring in `e`.
    pub fn expression_order(&self, e: &Expression) -> usize {
        e.symbols().iter().map(|s| self.order_of(s)).max().unwrap_or(0)
    }

    /// Total derivative `D_x` along the independent with position `x`.
    pub fn total_derivative(&self, e: &Expression, x: usize) -> Result<Expression> {
        let mut out = e.diff(&self.indeps[x]);
        for s in e.symbols() {
            let (dep, mut index) = match self.role(&s) {
                Some(SymbolRole::Dependent(d)) => (d, Vec::new()),
                Some(SymbolRole::Jet { dep, index }) => (dep, index),
                _ => continue,
            };
            index.push(x);
            if index.len() > self.max_order + 1 {
                return Err(CsaError::OrderExceeded {
                    name: self.jet(dep, &index).name().to_string(),
                    order: index.len(),
                    max: self.max_order + 1,
                });
            }
            let next = Expression::symbol(self.jet(dep, &index));
            out = &out + &(&next * &e.diff(&s));
        }
        Ok(out)
    }
}

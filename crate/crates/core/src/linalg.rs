//! Exact sparse linear algebra over the rationals.
//!
//! Rows are stored as primitive integer vectors and reduced fraction-free;
//! rationals only appear during back-substitution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type SparseRow = BTreeMap<usize, BigRational>;
type IntRow = BTreeMap<usize, BigInt>;

fn to_integer(row: &SparseRow) -> IntRow {
    let l = row
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let out: IntRow = row
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (*k, c.numer() * (&l / c.denom())))
        .collect();
    primitive(out)
}

fn primitive(mut row: IntRow) -> IntRow {
    let g = row.values().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return row;
    }
    let neg = row.values().next().is_some_and(|c| c.is_negative());
    let g = if neg { -g } else { g };
    if !g.is_one() {
        for c in row.values_mut() {
            *c = &*c / &g;
        }
    }
    row
}

/// Row echelon form built incrementally.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    /// Rows keyed by pivot column; each row's first entry is its pivot.
    rows: BTreeMap<usize, IntRow>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    fn reduce(&self, row: IntRow) -> IntRow {
        let mut row = row;
        let mut from = 0usize;
        loop {
            let next = row
                .iter()
                .find(|(k, _)| **k >= from && self.rows.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, c)) = next else { break };
            let pivot_row = &self.rows[&col];
            let p = &pivot_row[&col];
            let g = p.gcd(&c);
            let (mr, mp) = (p / &g, &c / &g);
            let mut out = IntRow::new();
            for (k, v) in &row {
                out.insert(*k, v * &mr);
            }
            for (k, v) in pivot_row {
                let e = out.entry(*k).or_insert_with(BigInt::zero);
                *e -= v * &mp;
            }
            out.retain(|_, v| !v.is_zero());
            row = primitive(out);
            from = col + 1;
        }
        row
    }

    /// Adds a row; returns whether it was independent of the stored ones.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        let reduced = self.reduce(to_integer(row));
        match reduced.keys().next().copied() {
            Some(col) => {
                self.rows.insert(col, reduced);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(to_integer(row)).is_empty()
    }

    /// Solution of the stored rows with the given values on free columns.
    fn back_substitute(&self, values: &mut BTreeMap<usize, BigRational>) {
        for (&col, row) in self.rows.iter().rev() {
            let mut acc = BigRational::zero();
            for (k, c) in row.iter().skip(1) {
                if let Some(v) = values.get(k) {
                    acc += BigRational::from_integer(c.clone()) * v;
                }
            }
            let x = -acc / BigRational::from_integer(row[&col].clone());
            values.insert(col, x);
        }
    }

    /// Basis of `{x : row . x = 0}` over columns `0..ncols`.
    pub fn nullspace(&self, ncols: usize) -> Vec<Vec<BigRational>> {
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !self.rows.contains_key(c)) {
            let mut values = BTreeMap::new();
            for c in (0..ncols).filter(|c| !self.rows.contains_key(c)) {
                let v = if c == free { BigRational::one() } else { BigRational::zero() };
                values.insert(c, v);
            }
            self.back_substitute(&mut values);
            out.push(
                (0..ncols)
                    .map(|c| values.get(&c).cloned().unwrap_or_else(BigRational::zero))
                    .collect(),
            );
        }
        out
    }
}

/// Solves `row . x = rhs` for all rows, free unknowns set to zero.
pub fn solve(system: &[(SparseRow, BigRational)], ncols: usize) -> Option<Vec<BigRational>> {
    let mut ech = Echelon::new();
    for (row, rhs) in system {
        let mut aug = row.clone();
        aug.retain(|_, v| !v.is_zero());
        if !rhs.is_zero() {
            aug.insert(ncols, -rhs.clone());
        }
        ech.insert(&aug);
    }
    if ech.rows.contains_key(&ncols) {
        return None;
    }
    let mut values = BTreeMap::new();
    values.insert(ncols, BigRational::one());
    for c in (0..ncols).filter(|c| !ech.rows.contains_key(c)) {
        values.insert(c, BigRational::zero());
    }
    ech.back_substitute(&mut values);
    Some(
        (0..ncols)
            .map(|c| values.get(&c).cloned().unwrap_or_else(BigRational::zero))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    fn row(v: &[(usize, i64)]) -> SparseRow {
        v.iter().map(|(k, c)| (*k, q(*c, 1))).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let mut e = Echelon::new();
        assert!(e.insert(&row(&[(0, 1), (1, 2), (2, 3)])));
        assert!(e.insert(&row(&[(0, 2), (1, 4), (2, 7)])));
        assert!(!e.insert(&row(&[(0, 3), (1, 6), (2, 10)])));
        assert_eq!(e.rank(), 2);
        let ns = e.nullspace(3);
        assert_eq!(ns, vec![vec![q(-2, 1), q(1, 1), q(0, 1)]]);
    }

    #[test]
    fn solve_consistent_and_not() {
        let sys = vec![(row(&[(0, 1), (1, 1)]), q(3, 1)), (row(&[(0, 1), (1, -1)]), q(1, 1))];
        assert_eq!(solve(&sys, 2), Some(vec![q(2, 1), q(1, 1)]));
        let bad = vec![(row(&[(0, 1)]), q(1, 1)), (row(&[(0, 2)]), q(3, 1))];
        assert_eq!(solve(&bad, 1), None);
    }
}

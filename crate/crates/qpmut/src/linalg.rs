//! Exact incremental Gaussian elimination over sparse rows.
//!
//! Rows are sparse vectors indexed by `usize` columns; the eliminator keeps a
//! reduced row-echelon basis keyed by pivot column, supports rank queries,
//! membership tests, and residual reduction. Pivoting is deterministic
//! (lowest column index wins), which downstream code relies on for
//! reproducible bases.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// A sparse row: column -> nonzero coefficient.
pub type Row = BTreeMap<usize, Scalar>;

/// Incremental reduced-row-echelon workspace.
#[derive(Clone, Debug, Default)]
pub struct RowSpace {
    /// pivot column -> row (row has coefficient 1 at the pivot and is reduced
    /// against all other pivots).
    rows: BTreeMap<usize, Row>,
}

fn row_axpy(target: &mut Row, coeff: &Scalar, source: &Row) {
    for (c, v) in source {
        let add = coeff * v;
        match target.get_mut(c) {
            Some(t) => {
                *t += add;
                if t.is_zero() {
                    target.remove(c);
                }
            }
            None => {
                if !add.is_zero() {
                    target.insert(*c, add);
                }
            }
        }
    }
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the current basis; the returned residual has no
    /// support on any pivot column.
    pub fn reduce(&self, mut row: Row) -> Row {
        loop {
            let hit = row
                .iter()
                .find(|(c, _)| self.rows.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            match hit {
                None => return row,
                // The pivot entry cancels exactly (the basis row is 1 there).
                Some((c, v)) => row_axpy(&mut row, &(-v), &self.rows[&c]),
            }
        }
    }

    /// Insert a row; returns true iff it was independent of the span.
    pub fn insert(&mut self, row: Row) -> bool {
        let mut residual = self.reduce(row);
        let Some((&pivot, _)) = residual.iter().next() else {
            return false;
        };
        let lead = residual[&pivot].clone();
        let inv = lead.inv();
        for v in residual.values_mut() {
            *v *= inv.clone();
        }
        // Back-substitute into existing rows to keep the basis fully reduced.
        for r in self.rows.values_mut() {
            if let Some(coeff) = r.get(&pivot).cloned() {
                row_axpy(r, &(-coeff), &residual);
            }
        }
        self.rows.insert(pivot, residual);
        true
    }

    /// True iff `row` lies in the span.
    pub fn contains(&self, row: Row) -> bool {
        self.reduce(row).is_empty()
    }

    /// The reduced row-echelon basis, ordered by pivot column.
    pub fn basis(&self) -> impl Iterator<Item = &Row> {
        self.rows.values()
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }
}

/// Solve `A x = b` exactly where `A` is given column-wise (each column a sparse
/// Row over row-indices). Returns one solution (deterministic: free variables
/// set to zero) or None if inconsistent.
pub fn solve(columns: &[Row], b: &Row) -> Option<Vec<Option<Scalar>>> {
    // Eliminate on the augmented system: track for each inserted column which
    // combination of original columns produced it.
    let mut space = RowSpace::new();
    // For pivot column c of the row space, combo[c] = coefficients over input columns.
    let mut combos: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();

    // We eliminate columns one at a time, remembering the expression of each
    // reduced column in terms of the originals.
    let mut reduced_cols: Vec<(usize, Row, Vec<(usize, Scalar)>)> = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut row = col.clone();
        let mut expr: Vec<(usize, Scalar)> = vec![(j, one_like(col, b)?)];
        loop {
            let hit = row
                .iter()
                .find(|(c, _)| space.rows.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            match hit {
                None => break,
                Some((c, v)) => {
                    row_axpy(&mut row, &(-v.clone()), &space.rows[&c]);
                    for (k, w) in &combos[&c] {
                        expr.push((*k, -(&v * w)));
                    }
                }
            }
        }
        if let Some((&pivot, _)) = row.iter().next() {
            let inv = row[&pivot].inv();
            for v in row.values_mut() {
                *v *= inv.clone();
            }
            for (_, w) in expr.iter_mut() {
                *w *= inv.clone();
            }
            for (c, r) in space.rows.iter_mut() {
                if let Some(coeff) = r.get(&pivot).cloned() {
                    row_axpy(r, &(-coeff.clone()), &row);
                    let extra: Vec<(usize, Scalar)> = expr
                        .iter()
                        .map(|(k, w)| (*k, -(&coeff * w)))
                        .collect();
                    combos.get_mut(c).unwrap().extend(extra);
                }
            }
            space.rows.insert(pivot, row.clone());
            combos.insert(pivot, expr.clone());
            reduced_cols.push((pivot, row, expr));
        }
    }

    // Reduce b; must reach zero.
    let mut row = b.clone();
    let mut sol: BTreeMap<usize, Scalar> = BTreeMap::new();
    loop {
        let hit = row
            .iter()
            .find(|(c, _)| space.rows.contains_key(c))
            .map(|(c, v)| (*c, v.clone()));
        match hit {
            None => break,
            Some((c, v)) => {
                row_axpy(&mut row, &(-v.clone()), &space.rows[&c]);
                for (k, w) in &combos[&c] {
                    let add = &v * w;
                    match sol.get_mut(k) {
                        Some(t) => {
                            *t += add;
                            if t.is_zero() {
                                sol.remove(k);
                            }
                        }
                        None => {
                            if !add.is_zero() {
                                sol.insert(*k, add);
                            }
                        }
                    }
                }
            }
        }
    }
    if !row.is_empty() {
        return None;
    }
    let mut out = vec![None; columns.len()];
    for (k, v) in sol {
        out[k] = Some(v);
    }
    Some(out)
}

fn one_like(col: &Row, b: &Row) -> Option<Scalar> {
    col.values()
        .next()
        .or_else(|| b.values().next())
        .map(|s| Scalar::one(s.field()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Field, Scalar};

    fn row(entries: &[(usize, i64)]) -> Row {
        entries
            .iter()
            .filter(|(_, v)| *v != 0)
            .map(|&(c, v)| (c, Scalar::from_i64(v, Field::Rational)))
            .collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut s = RowSpace::new();
        assert!(s.insert(row(&[(0, 1), (1, 2)])));
        assert!(s.insert(row(&[(1, 1), (2, 1)])));
        assert!(!s.insert(row(&[(0, 1), (2, -2)]))); // dependent
        assert_eq!(s.rank(), 2);
        assert!(s.contains(row(&[(0, 2), (1, 4)])));
        assert!(!s.contains(row(&[(2, 1)])));
    }

    #[test]
    fn solve_small_system() {
        // columns of [[1,1],[0,1]]; b = (3,2) -> x = (1,2)
        let cols = vec![row(&[(0, 1)]), row(&[(0, 1), (1, 1)])];
        let b = row(&[(0, 3), (1, 2)]);
        let sol = solve(&cols, &b).unwrap();
        assert_eq!(sol[0].clone().unwrap().to_string(), "1");
        assert_eq!(sol[1].clone().unwrap().to_string(), "2");
        let b2 = row(&[(1, 1)]);
        assert!(solve(&cols, &b2).is_some());
        // inconsistent system
        let cols2 = vec![row(&[(0, 1)])];
        assert!(solve(&cols2, &row(&[(1, 1)])).is_none());
    }
}

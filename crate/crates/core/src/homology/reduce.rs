//! Sparse integer elimination on unit pivots.
//!
//! Each pivot `B[r, c] = s = ±1` records the substitution
//! `e_r ↦ −s Σ_{i≠r} B[i, c] e_i`, which maps the quotient `Zᵐ / colspan(B)`
//! isomorphically onto the quotient with row `r` and column `c` removed.
//! What cannot be eliminated (non-unit entries, or an i64 overflow) is left
//! as a small dense remainder for the Smith normal form.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;

use super::snf::IntMatrix;

#[derive(Clone, Debug)]
pub struct Rule {
    pub row: usize,
    pub combo: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub rules: Vec<Rule>,
    /// Rows never eliminated, ascending.
    pub rows: Vec<usize>,
    /// Dense remainder, rows ordered as `rows`.
    pub remainder: IntMatrix,
}

impl Reduction {
    pub fn pivots(&self) -> usize {
        self.rules.len()
    }
}

type Column = Vec<(usize, i64)>;

/// `a − f·b` for sorted sparse columns; `None` on overflow.
fn combine(a: &Column, b: &Column, f: i64) -> Option<Column> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ra = a.get(i).map_or(usize::MAX, |x| x.0);
        let rb = b.get(j).map_or(usize::MAX, |x| x.0);
        if ra < rb {
            out.push(a[i]);
            i += 1;
        } else if rb < ra {
            out.push((rb, b[j].1.checked_mul(f)?.checked_neg()?));
            j += 1;
        } else {
            let v = a[i].1.checked_sub(b[j].1.checked_mul(f)?)?;
            if v != 0 {
                out.push((ra, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Eliminates unit pivots from the `nrows × columns.len()` matrix given by
/// sparse columns (row indices sorted). Pivot choice: shortest column first,
/// then the unit entry whose row is shortest.
pub fn reduce(nrows: usize, mut columns: Vec<Column>) -> Reduction {
    let ncols = columns.len();
    let mut row_cols: Vec<HashSet<usize>> = vec![HashSet::new(); nrows];
    for (c, col) in columns.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r].insert(c);
        }
    }
    let mut alive_row = vec![true; nrows];
    let mut alive_col = vec![true; ncols];
    let mut active: BTreeSet<(usize, usize)> =
        columns.iter().enumerate().map(|(c, col)| (col.len(), c)).collect();
    let mut deferred: HashSet<usize> = HashSet::new();
    let mut rules = Vec::new();

    while let Some((len, c)) = active.pop_first() {
        if len == 0 {
            alive_col[c] = false;
            continue;
        }
        let pivot = columns[c]
            .iter()
            .filter(|&&(_, v)| v == 1 || v == -1)
            .min_by_key(|&&(r, _)| (row_cols[r].len(), r))
            .copied();
        let Some((r, s)) = pivot else {
            deferred.insert(c);
            continue;
        };

        let pivot_col = columns[c].clone();
        let others: Vec<usize> = row_cols[r].iter().copied().filter(|&o| o != c).collect();
        let mut updated = Vec::with_capacity(others.len());
        let mut overflow = false;
        for &o in &others {
            let f = columns[o]
                .iter()
                .find(|x| x.0 == r)
                .map(|x| x.1 * s)
                .expect("row index consistent");
            match combine(&columns[o], &pivot_col, f) {
                Some(col) => updated.push((o, col)),
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        if overflow {
            log::warn!("integer elimination overflowed i64; finishing with dense Smith form");
            deferred.insert(c);
            deferred.extend(active.iter().map(|&(_, c)| c));
            active.clear();
            break;
        }

        rules.push(Rule {
            row: r,
            combo: pivot_col
                .iter()
                .filter(|x| x.0 != r)
                .map(|&(i, v)| (i, -s * v))
                .collect(),
        });
        for &(i, _) in &pivot_col {
            row_cols[i].remove(&c);
        }
        alive_col[c] = false;
        columns[c].clear();
        for (o, col) in updated {
            for &(i, _) in &columns[o] {
                row_cols[i].remove(&o);
            }
            for &(i, _) in &col {
                row_cols[i].insert(o);
            }
            let was_active = active.remove(&(columns[o].len(), o));
            let was_deferred = deferred.remove(&o);
            debug_assert!(was_active || was_deferred);
            columns[o] = col;
            active.insert((columns[o].len(), o));
        }
        alive_row[r] = false;
        debug_assert!(row_cols[r].is_empty());
    }

    let rows: Vec<usize> = (0..nrows).filter(|&r| alive_row[r]).collect();
    let mut local = vec![usize::MAX; nrows];
    for (k, &r) in rows.iter().enumerate() {
        local[r] = k;
    }
    let mut rest: Vec<usize> = deferred
        .into_iter()
        .filter(|&c| alive_col[c] && !columns[c].is_empty())
        .collect();
    rest.sort_unstable();
    let mut remainder = IntMatrix::zeros(rows.len(), rest.len());
    for (j, &c) in rest.iter().enumerate() {
        for &(r, v) in &columns[c] {
            remainder.set(local[r], j, BigInt::from(v));
        }
    }
    Reduction {
        rules,
        rows,
        remainder,
    }
}

/// Extends a covector given on the surviving rows to all rows by replaying
/// the substitution rules backwards. Eliminated rows take the value the
/// substitution assigns them, so the result vanishes on the column span.
pub fn pull_back_covector(red: &Reduction, nrows: usize, survivors: &[BigInt]) -> Vec<BigInt> {
    let mut value = vec![BigInt::from(0); nrows];
    for (k, &r) in red.rows.iter().enumerate() {
        value[r] = survivors[k].clone();
    }
    for rule in red.rules.iter().rev() {
        let mut acc = BigInt::from(0);
        for &(i, coef) in &rule.combo {
            acc += &value[i] * coef;
        }
        value[rule.row] = acc;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::snf::smith_normal_form;

    fn to_columns(dense: &[Vec<i64>]) -> Vec<Column> {
        let ncols = dense[0].len();
        (0..ncols)
            .map(|c| {
                dense
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| row[c] != 0)
                    .map(|(r, row)| (r, row[c]))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn reduction_preserves_invariant_factors() {
        let a = vec![
            vec![1i64, 0, 2, 0],
            vec![-1, 1, 0, 0],
            vec![0, -1, 0, 4],
            vec![0, 0, 2, 6],
        ];
        let red = reduce(4, to_columns(&a));
        let full = smith_normal_form(&IntMatrix::from_rows(&a)).invariant_factors();
        let mut got: Vec<BigInt> = vec![BigInt::from(1); red.pivots()];
        got.extend(smith_normal_form(&red.remainder).invariant_factors());
        got.sort();
        let mut want = full.clone();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn pulled_back_covectors_annihilate_columns() {
        // Boundary of a square split into two triangles, as rows = edges.
        let a = vec![
            vec![1i64, 0],
            vec![-1, 1],
            vec![0, 1],
            vec![1, 0],
            vec![0, -1],
        ];
        let red = reduce(5, to_columns(&a));
        for k in 0..red.rows.len() {
            let mut e = vec![BigInt::from(0); red.rows.len()];
            e[k] = BigInt::from(1);
            let w = pull_back_covector(&red, 5, &e);
            for c in 0..2 {
                let s: BigInt = (0..5).map(|r| &w[r] * a[r][c]).sum();
                assert_eq!(s, BigInt::from(0));
            }
        }
    }
}

//! Exact rank of sparse matrices over the rationals.
//!
//! Rows whose live support is a single column are peeled first (they kill
//! that column outright, no arithmetic needed). The remaining rows are
//! scaled to primitive integer vectors and reduced by fraction-free
//! elimination, dividing out the content after every update.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A sparse row: `(column, value)` pairs, columns distinct.
pub type SparseRow = Vec<(usize, BigRational)>;

#[derive(Debug, Default)]
pub struct SparseMatrix {
    ncols: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(ncols: usize) -> Self {
        SparseMatrix { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row, merging duplicate columns and dropping zeros.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, BigRational)>) {
        let mut acc: Vec<(usize, BigRational)> = entries.into_iter().collect();
        acc.sort_by_key(|e| e.0);
        let mut row: SparseRow = Vec::with_capacity(acc.len());
        for (c, v) in acc {
            assert!(c < self.ncols, "column {c} out of range {}", self.ncols);
            match row.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => row.push((c, v)),
            }
        }
        row.retain(|(_, v)| !v.is_zero());
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn rank(&self) -> usize {
        rank_with_killed(&self.rows, self.ncols, &vec![false; self.ncols])
    }

    /// Rank of the matrix stacked on top of the unit rows `e_c` for every
    /// column with `killed[c]`, minus the number of killed columns. Equivalently
    /// the rank of the rows after projecting away the killed columns.
    pub fn rank_modulo(&self, killed: &[bool]) -> usize {
        assert_eq!(killed.len(), self.ncols);
        rank_with_killed(&self.rows, self.ncols, killed)
    }
}

fn rank_with_killed(rows: &[SparseRow], ncols: usize, killed_in: &[bool]) -> usize {
    let mut killed = killed_in.to_vec();
    let mut live: Vec<usize> = rows
        .iter()
        .map(|r| r.iter().filter(|(c, _)| !killed[*c]).count())
        .collect();
    let mut by_col: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        if live[i] >= 1 {
            for (c, _) in r {
                if !killed[*c] {
                    by_col[*c].push(i as u32);
                }
            }
        }
    }
    let mut used = vec![false; rows.len()];
    let mut rank = 0usize;
    let mut queue: Vec<usize> = (0..rows.len()).filter(|&i| live[i] == 1).collect();
    while let Some(i) = queue.pop() {
        if used[i] || live[i] != 1 {
            continue;
        }
        used[i] = true;
        let col = rows[i]
            .iter()
            .map(|(c, _)| *c)
            .find(|c| !killed[*c])
            .expect("one live column");
        killed[col] = true;
        rank += 1;
        for &k in &by_col[col] {
            let k = k as usize;
            if used[k] || k == i {
                continue;
            }
            live[k] -= 1;
            if live[k] == 1 {
                queue.push(k);
            }
        }
    }

    let mut echelon = Echelon::default();
    for (i, r) in rows.iter().enumerate() {
        if used[i] || live[i] == 0 {
            continue;
        }
        let entries: Vec<(usize, &BigRational)> =
            r.iter().filter(|(c, _)| !killed[*c]).map(|(c, v)| (*c, v)).collect();
        echelon.insert(primitive_integer_row(&entries));
    }
    rank + echelon.rank()
}

/// Scales a rational row to a primitive integer row with positive leading entry.
fn primitive_integer_row(entries: &[(usize, &BigRational)]) -> Vec<(usize, BigInt)> {
    let lcm = entries
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let row: Vec<(usize, BigInt)> = entries
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    normalize(row)
}

fn normalize(mut row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    if row.is_empty() {
        return row;
    }
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    let flip = row[0].1.is_negative();
    if !g.is_one() || flip {
        let g = if flip { -g } else { g };
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
    row
}

#[derive(Default)]
struct Echelon {
    pivots: HashMap<usize, Vec<(usize, BigInt)>>,
}

impl Echelon {
    fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn insert(&mut self, mut row: Vec<(usize, BigInt)>) {
        while let Some((lead, lead_val)) = row.first().cloned() {
            match self.pivots.get(&lead) {
                None => {
                    self.pivots.insert(lead, row);
                    return;
                }
                Some(piv) => {
                    // row <- piv_lead * row - lead_val * piv, cancelling `lead`
                    let pv = &piv[0].1;
                    row = normalize(combine(&row, pv, piv, &lead_val));
                }
            }
        }
    }
}

fn combine(
    row: &[(usize, BigInt)],
    a: &BigInt,
    piv: &[(usize, BigInt)],
    b: &BigInt,
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < piv.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = piv.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ci < cj {
            out.push((ci, a * &row[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(b * &piv[j].1)));
            j += 1;
        } else {
            let v = a * &row[i].1 - b * &piv[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn dense_rank(m: &[Vec<i64>]) -> usize {
        // plain Gaussian elimination over Q as an independent check
        let mut a: Vec<Vec<BigRational>> =
            m.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect();
        let (rows, cols) = (a.len(), a.first().map_or(0, Vec::len));
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(rank, p);
            for i in 0..rows {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for k in 0..cols {
                        let d = &f * &a[rank][k];
                        a[i][k] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn sparse(m: &[Vec<i64>]) -> SparseMatrix {
        let mut s = SparseMatrix::new(m[0].len());
        for row in m {
            s.push_row(row.iter().enumerate().map(|(c, &v)| (c, r(v))));
        }
        s
    }

    #[test]
    fn small_ranks() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(sparse(&m).rank(), 2);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(sparse(&id).rank(), 2);
        assert_eq!(SparseMatrix::new(4).rank(), 0);
    }

    #[test]
    fn killed_columns_project_away() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let s = sparse(&m);
        assert_eq!(s.rank_modulo(&[false, true, false]), 2);
        assert_eq!(s.rank_modulo(&[true, true, false]), 1);
        assert_eq!(s.rank_modulo(&[true, true, true]), 0);
    }

    #[test]
    fn fractions_are_exact() {
        let mut s = SparseMatrix::new(2);
        s.push_row([(0, BigRational::new(1.into(), 3.into())), (1, r(1))]);
        s.push_row([(0, r(1)), (1, r(3))]);
        assert_eq!(s.rank(), 1);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn agrees_with_dense_elimination(
            m in prop::collection::vec(prop::collection::vec(-2i64..=2, 6), 1..8)
        ) {
            prop_assert_eq!(sparse(&m).rank(), dense_rank(&m));
        }
    }
}

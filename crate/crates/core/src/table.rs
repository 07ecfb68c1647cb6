//! Reproduction of the invariant table for rank-2 bundles on `W_1, W_2, W_3`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cech::{CechOptions, Dim};
use crate::error::{Error, Result};
use crate::geometry::{Bundle, ExtensionBundle, TotalSpace};
use crate::invariants::{f, f0, g, invariant_report};
use crate::laurent::LaurentPoly;

/// A cell of the published table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    Num(u64),
    Inf,
    /// `f_k(j)`
    F(u32),
    /// `g_k(j)`
    G(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Same values for every extension class.
    AnyP(u64),
    /// Split bundles, expanded over a list of `j ≥ 2`.
    Split,
    Fixed(u64, &'static str),
}

use Entry::{Inf, Num, F, G};

/// `(χ, h′, w′)` for `W_1 | W_2 | W_3`, row by row, as published.
pub const PUBLISHED_TABLE: [(RowKind, [[Entry; 3]; 3]); 10] = [
    (RowKind::AnyP(0), [[Num(0), Num(0), Num(0)], [Num(0), Num(0), Num(0)], [Inf, Num(0), Num(0)]]),
    (RowKind::AnyP(1), [[Num(0), Num(0), Num(1)], [Num(0), Num(0), Num(0)], [Inf, Num(0), Num(0)]]),
    (RowKind::Split, [[F(0), F(1), G(1)], [Inf, F(2), G(2)], [Inf, F(3), G(3)]]),
    (RowKind::Fixed(3, "u1"), [[Num(3), Num(2), Num(1)], [Inf, Num(2), Num(1)], [Inf, Num(2), Num(1)]]),
    (RowKind::Fixed(4, "z*u1"), [[Num(6), Num(3), Num(1)], [Inf, Num(3), Num(0)], [Inf, Num(3), Num(0)]]),
    (RowKind::Fixed(4, "z^3*u1"), [[Num(7), Num(4), Num(6)], [Inf, Num(3), Num(2)], [Inf, Num(3), Num(1)]]),
    (RowKind::Fixed(4, "z^3*u1^2"), [[Num(9), Num(5), Num(6)], [Inf, Num(4), Num(2)], [Inf, Num(3), Num(2)]]),
    (RowKind::Fixed(5, "z*u1"), [[Num(10), Num(4), Num(1)], [Inf, Num(4), Num(0)], [Inf, Num(4), Num(0)]]),
    (RowKind::Fixed(5, "z^3*u1"), [[Num(11), Num(5), Num(6)], [Inf, Num(4), Num(2)], [Inf, Num(4), Num(1)]]),
    (RowKind::Fixed(5, "z^3*u1^2"), [[Num(16), Num(7), Num(6)], [Inf, Num(6), Num(2)], [Inf, Num(5), Num(2)]]),
];

/// Extension classes tried for the rows that hold for any `p`.
pub const SAMPLE_CLASSES: [&str; 6] = ["0", "u1", "u2", "z*u1 + u2^2", "z^-1*u2^2", "u1*u2 - 2*z^2*u2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub chi: Dim,
    pub h_prime: u64,
    pub w_prime: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub j: u64,
    pub p: String,
    pub w1: Cell,
    pub w2: Cell,
    pub w3: Cell,
}

impl TableRow {
    pub fn cells(&self) -> [Cell; 3] {
        [self.w1, self.w2, self.w3]
    }

    pub fn csv_header() -> Vec<String> {
        let mut h = vec!["j".to_string(), "p".to_string()];
        for i in 1..=3 {
            for name in ["chi", "h_prime", "w_prime"] {
                h.push(format!("W{i}_{name}"));
            }
        }
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut r = vec![self.j.to_string(), self.p.clone()];
        for c in self.cells() {
            r.extend([c.chi.to_string(), c.h_prime.to_string(), c.w_prime.to_string()]);
        }
        r
    }
}

fn resolve(e: Entry, j: u64) -> Dim {
    match e {
        Num(v) => Dim::Finite(v),
        Inf => Dim::Infinite,
        F(0) => Dim::Finite(f0(j)),
        F(k) => Dim::Finite(f(k, j)),
        G(k) => Dim::Finite(g(k, j)),
    }
}

fn expected_cell(entries: [Entry; 3], j: u64) -> Cell {
    let fin = |e| resolve(e, j).finite().expect("partial invariants are finite");
    Cell { chi: resolve(entries[0], j), h_prime: fin(entries[1]), w_prime: fin(entries[2]) }
}

/// `(j, p label, classes to evaluate, published cells)` for every output row.
fn layout(split_js: &[u64]) -> Vec<(u64, String, Vec<&'static str>, [Cell; 3])> {
    let mut out = Vec::new();
    for (kind, cells) in PUBLISHED_TABLE {
        let expect = |j| cells.map(|c| expected_cell(c, j));
        match kind {
            RowKind::AnyP(j) => out.push((j, "any".to_string(), SAMPLE_CLASSES.to_vec(), expect(j))),
            RowKind::Split => {
                for &j in split_js {
                    out.push((j, "0".to_string(), vec!["0"], expect(j)));
                }
            }
            RowKind::Fixed(j, p) => out.push((j, p.to_string(), vec![p], expect(j))),
        }
    }
    out
}

/// The published values, with the split row expanded at `split_js`.
pub fn published_rows(split_js: &[u64]) -> Vec<TableRow> {
    layout(split_js)
        .into_iter()
        .map(|(j, p, _, [w1, w2, w3])| TableRow { j, p, w1, w2, w3 })
        .collect()
}

/// Invariants of one bundle as a table cell.
pub fn compute_cell(space: &TotalSpace, j: u64, p: &str, opts: &CechOptions) -> Result<Cell> {
    let poly = LaurentPoly::parse(p, space.n())?;
    let j = u32::try_from(j).map_err(|_| Error::InvalidInput(format!("j = {j} is too large")))?;
    let bundle: Bundle = ExtensionBundle::new(space.clone(), j, poly)?.into();
    let r = invariant_report(space, &bundle, opts)?;
    Ok(Cell {
        chi: r.chi,
        h_prime: r.h_prime.expect("W_i has h'"),
        w_prime: r.w_prime.expect("W_i has w'"),
    })
}

/// Recomputes every cell. Rows that hold for any `p` are evaluated on
/// several classes, which must agree.
pub fn reproduce_table(split_js: &[u64], opts: &CechOptions) -> Result<Vec<TableRow>> {
    let rows = layout(split_js);
    let jobs: Vec<(usize, usize, u64, &str)> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, (j, _, classes, _))| {
            (0..3).flat_map(move |s| classes.iter().map(move |p| (r, s, *j, *p)))
        })
        .collect();
    let results: Vec<Cell> = jobs
        .par_iter()
        .map(|&(_, s, j, p)| compute_cell(&TotalSpace::w(s as i64 + 1), j, p, opts))
        .collect::<Result<_>>()?;

    let mut cells: Vec<[Option<Cell>; 3]> = vec![[None; 3]; rows.len()];
    for (&(r, s, j, p), cell) in jobs.iter().zip(results) {
        match cells[r][s] {
            None => cells[r][s] = Some(cell),
            Some(prev) if prev == cell => {}
            Some(prev) => {
                return Err(Error::InternalMismatch(format!(
                    "W{} j={j}: p={p} gives {cell:?}, another class gave {prev:?}",
                    s + 1
                )))
            }
        }
    }
    Ok(rows
        .into_iter()
        .zip(cells)
        .map(|((j, p, _, _), c)| {
            let [w1, w2, w3] = c.map(|x| x.expect("every cell computed"));
            TableRow { j, p, w1, w2, w3 }
        })
        .collect())
}

/// Cells where `computed` differs from the published table.
pub fn compare_with_published(computed: &[TableRow], split_js: &[u64]) -> Vec<String> {
    let expected = published_rows(split_js);
    if expected.len() != computed.len() {
        return vec![format!("{} rows computed, {} published", computed.len(), expected.len())];
    }
    let mut diffs = Vec::new();
    for (c, e) in computed.iter().zip(&expected) {
        for (s, (cc, ec)) in c.cells().iter().zip(e.cells()).enumerate() {
            if *cc != ec {
                diffs.push(format!("j={} p={} W{}: computed {:?}, published {:?}", e.j, e.p, s + 1, cc, ec));
            }
        }
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        let rows = published_rows(&[2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(rows.len(), 16);
        let three = published_rows(&[3]);
        let split = three.iter().find(|r| r.p == "0").unwrap();
        assert_eq!(split.w1, Cell { chi: Dim::Finite(4), h_prime: 3, w_prime: 6 });
        let infinite = PUBLISHED_TABLE
            .iter()
            .flat_map(|(_, cells)| cells.iter())
            .filter(|c| c[0] == Inf)
            .count();
        assert_eq!(infinite, 18);
    }

    #[test]
    fn one_row() {
        let o = CechOptions::default();
        let c = compute_cell(&TotalSpace::w(1), 5, "z^3*u1^2", &o).unwrap();
        assert_eq!(c, Cell { chi: Dim::Finite(16), h_prime: 7, w_prime: 6 });
    }
}

//! Čech cohomology of bundles on the infinitesimal neighbourhoods `Z^{(m)}`
//! of the zero section, for the two-chart cover `U ∪ V`.
//!
//! Cochains on `U ∩ V` are written in the V-frame and U-coordinates:
//! vectors of monomials `z^c u^I e_l` with `|I| ≤ m`. The coboundary of a
//! pair `(s_U, s_V)` is `s_V - T s_U`. A V-regular monomial `ξ^k v^I`
//! becomes `z^{I·b - k} u^I`, so V-sections hit exactly the monomials with
//! `c ≤ I·b`.
//!
//! H¹ is computed in the z-window `[-K, K]`: every cochain monomial outside
//! the window is already a coboundary once `K` is large enough, so
//! `h¹ = #window - rank(projected coboundaries)`. Each answer is recomputed
//! with the window doubled and the two must agree.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{Bundle, TotalSpace, Transition};
use crate::linalg::SparseMatrix;

/// A dimension that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Finite(u64),
    Infinite,
}

impl Dim {
    pub fn finite(self) -> Option<u64> {
        match self {
            Dim::Finite(v) => Some(v),
            Dim::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Dim::Infinite
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::Finite(v) => write!(f, "{v}"),
            Dim::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dim::Finite(v) => s.serialize_u64(*v),
            Dim::Infinite => s.serialize_str("inf"),
        }
    }
}

/// How a formal dimension was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Certificate {
    /// Ample conormal bundle; levels computed until they provably vanish.
    AmpleStabilized,
    /// Decided by degree arithmetic on the summands of `E|_Z ⊗ Sᵗ N*`.
    SplitDegreeArithmetic,
    /// Every level in the inspection range contributes, and the associated
    /// split bundle is infinite. Evidence, not proof.
    DivergenceDetected,
    /// Relies on the published claim that bundles on `W_i`, `i > 1`, have
    /// infinite `χ`.
    PaperAsserted,
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimResult {
    pub value: Dim,
    /// `δ_t = h(level t) - h(level t-1)`.
    pub levels: Vec<u64>,
    pub certificate: Certificate,
}

/// Truncation overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CechOptions {
    /// Multiplies every z-window (and width box); `1` is the default size.
    pub window_scale: u32,
    /// Minimum number of levels to inspect in formal computations.
    pub depth: Option<u32>,
}

impl Default for CechOptions {
    fn default() -> Self {
        CechOptions { window_scale: 1, depth: None }
    }
}

/// `h¹(P¹, O(d))`.
pub fn h1_line_p1(d: i64) -> u64 {
    (-d - 1).max(0) as u64
}

/// `h⁰(P¹, O(d))`.
pub fn h0_line_p1(d: i64) -> u64 {
    (d + 1).max(0) as u64
}

/// Exponent vectors of total degree `t` in `n` variables, lexicographically
/// descending in the first variable.
pub fn u_monomials(n: usize, t: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, t: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(t);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=t).rev() {
            prefix.push(e);
            rec(n, t - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if t == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, t, &mut Vec::new(), &mut out);
    out
}

fn dot(u: &[u32], b: &[i64]) -> i64 {
    u.iter().zip(b).map(|(&e, &w)| i64::from(e) * w).sum()
}

/// Degrees of the line-bundle summands of `Sᵗ(N*)`, one per monomial.
pub fn sym_power_degrees(twists: &[i64], t: u32) -> Vec<i64> {
    u_monomials(twists.len(), t).iter().map(|u| dot(u, twists)).collect()
}

/// Closed-level `h¹` of a split bundle (or of its `End`) at level `t`.
pub fn split_h1_level(space: &TotalSpace, degrees: &[i64], t: u32, twist_with_end: bool) -> u64 {
    let sym = sym_power_degrees(space.twists(), t);
    summand_degrees(degrees, twist_with_end)
        .iter()
        .map(|a| sym.iter().map(|d| h1_line_p1(a + d)).sum::<u64>())
        .sum()
}

/// Closed-level `h⁰` of a split bundle at level `t`.
pub fn split_h0_level(space: &TotalSpace, degrees: &[i64], t: u32) -> u64 {
    let sym = sym_power_degrees(space.twists(), t);
    degrees
        .iter()
        .map(|a| sym.iter().map(|d| h0_line_p1(a + d)).sum::<u64>())
        .sum()
}

fn summand_degrees(degrees: &[i64], twist_with_end: bool) -> Vec<i64> {
    if twist_with_end {
        degrees
            .iter()
            .flat_map(|ai| degrees.iter().map(move |aj| aj - ai))
            .collect()
    } else {
        degrees.to_vec()
    }
}

/// Long-run behaviour of `t ↦ h¹(O(a) ⊗ Sᵗ N*)` decided from the twists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelProfile {
    /// Contributions vanish for every level after `last` (`None`: all zero).
    Finite { last: Option<u32> },
    /// Contributions are positive at every level from `onset` on.
    Infinite { onset: u32 },
}

pub fn line_profile(a: i64, twists: &[i64]) -> LevelProfile {
    let bmin = twists.iter().copied().min().expect("at least one twist");
    if bmin < 0 {
        // the monomial u_k^t with b_k = bmin has degree a + t·bmin
        let onset = (a + 2).max(0);
        let step = -bmin;
        return LevelProfile::Infinite { onset: ((onset + step - 1) / step) as u32 };
    }
    if bmin == 0 {
        return if a <= -2 {
            LevelProfile::Infinite { onset: 0 }
        } else {
            LevelProfile::Finite { last: None }
        };
    }
    if a <= -2 {
        LevelProfile::Finite { last: Some(((-2 - a) / bmin) as u32) }
    } else {
        LevelProfile::Finite { last: None }
    }
}

/// Combined profile of a split bundle (or its `End`).
pub fn split_profile(space: &TotalSpace, degrees: &[i64], twist_with_end: bool) -> LevelProfile {
    let mut last: Option<u32> = None;
    let mut onset: Option<u32> = None;
    for a in summand_degrees(degrees, twist_with_end) {
        match line_profile(a, space.twists()) {
            LevelProfile::Finite { last: l } => last = last.max(l),
            LevelProfile::Infinite { onset: o } => onset = Some(onset.map_or(o, |x| x.min(o))),
        }
    }
    match onset {
        Some(onset) => LevelProfile::Infinite { onset },
        None => LevelProfile::Finite { last },
    }
}

/// The windowed Čech complex of a bundle at level `m`.
pub(crate) struct Complex<'a> {
    twists: &'a [i64],
    t: &'a Transition,
    level: u32,
    window: i64,
    monos: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl<'a> Complex<'a> {
    pub(crate) fn new(twists: &'a [i64], t: &'a Transition, level: u32, window: i64) -> Self {
        let monos: Vec<Vec<u32>> = (0..=level).flat_map(|d| u_monomials(twists.len(), d)).collect();
        let index = monos.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        Complex { twists, t, level, window, monos, index }
    }

    /// Default half-width of the z-window at level `m`.
    pub(crate) fn default_window(space: &TotalSpace, t: &Transition, m: u32) -> i64 {
        let amax = t.degrees.iter().map(|a| a.abs()).max().unwrap_or(0);
        amax + t.degree_gap() + i64::from(m) * space.max_abs_twist() + t.off_diagonal_span() + 1
    }

    fn width(&self) -> usize {
        (2 * self.window + 1) as usize
    }

    pub(crate) fn ncols(&self) -> usize {
        self.monos.len() * self.t.rank() * self.width()
    }

    pub(crate) fn col(&self, l: usize, c: i64, u: &[u32]) -> Option<usize> {
        if c.abs() > self.window {
            return None;
        }
        let i = *self.index.get(u)?;
        Some((i * self.t.rank() + l) * self.width() + (c + self.window) as usize)
    }

    /// Columns already hit by V-regular sections (`c ≤ I·b`).
    pub(crate) fn v_killed(&self) -> Vec<bool> {
        let mut killed = vec![false; self.ncols()];
        for u in &self.monos {
            let top = dot(u, self.twists).min(self.window);
            for l in 0..self.t.rank() {
                for c in -self.window..=top {
                    killed[self.col(l, c, u).expect("in window")] = true;
                }
            }
        }
        killed
    }

    /// Image of `z^a u^I e_l` under `T`, truncated to the level, as
    /// `(row component, z exponent, u exponents, coefficient)` terms.
    pub(crate) fn apply_t(&self, l: usize, a: i64, u: &[u32]) -> Vec<(usize, i64, Vec<u32>, BigRational)> {
        let mut out = Vec::new();
        for row in 0..self.t.rank() {
            for (mono, coeff) in self.t.entries[row][l].terms() {
                let v: Vec<u32> = u.iter().zip(&mono.u_exps).map(|(x, y)| x + y).collect();
                if v.iter().sum::<u32>() <= self.level {
                    out.push((row, a + mono.z_exp, v, coeff.clone()));
                }
            }
        }
        out
    }

    /// Rows for the images of the U-regular monomial sections that touch the window.
    pub(crate) fn push_u_rows(&self, mat: &mut SparseMatrix) {
        for l in 0..self.t.rank() {
            let kmin = (0..self.t.rank())
                .filter_map(|row| self.t.entries[row][l].min_z_exp())
                .min()
                .expect("diagonal entry is nonzero");
            for u in &self.monos {
                for a in 0..=(self.window - kmin).max(-1) {
                    let row = self
                        .apply_t(l, a, u)
                        .into_iter()
                        .filter_map(|(r, c, v, coeff)| self.col(r, c, &v).map(|col| (col, coeff)));
                    mat.push_row(row);
                }
            }
        }
    }

    /// `dim H¹(Z^{(m)}, E)` in this window.
    pub(crate) fn h1(&self) -> u64 {
        let killed = self.v_killed();
        let mut mat = SparseMatrix::new(self.ncols());
        self.push_u_rows(&mut mat);
        let nkilled = killed.iter().filter(|k| **k).count();
        (self.ncols() - nkilled - mat.rank_modulo(&killed)) as u64
    }

    /// `dim H⁰(Z^{(m)}, E)`: kernel of the coboundary on sections with
    /// z-exponents (U) and ξ-exponents (V) in `[0, K]`.
    pub(crate) fn h0(&self) -> u64 {
        let mut cols: HashMap<(usize, i64, Vec<u32>), usize> = HashMap::new();
        let mut rows: Vec<Vec<(usize, BigRational)>> = Vec::new();
        let mut intern = |key: (usize, i64, Vec<u32>)| {
            let next = cols.len();
            *cols.entry(key).or_insert(next)
        };
        for l in 0..self.t.rank() {
            for u in &self.monos {
                for a in 0..=self.window {
                    let row = self
                        .apply_t(l, a, u)
                        .into_iter()
                        .map(|(r, c, v, coeff)| (intern((r, c, v)), -coeff))
                        .collect();
                    rows.push(row);
                    let c = dot(u, self.twists) - a;
                    rows.push(vec![(intern((l, c, u.clone())), BigRational::one())]);
                }
            }
        }
        let mut mat = SparseMatrix::new(cols.len());
        let ngens = rows.len();
        for r in rows {
            mat.push_row(r);
        }
        (ngens - mat.rank()) as u64
    }
}

fn checked_pair(small: u64, large: u64) -> Result<u64> {
    if small == large {
        Ok(small)
    } else {
        Err(Error::WindowUnstable { small, large })
    }
}

fn scaled_window(space: &TotalSpace, t: &Transition, m: u32, opts: &CechOptions) -> i64 {
    Complex::default_window(space, t, m) * i64::from(opts.window_scale.max(1))
}

/// `h¹` of a transition on `Z^{(m)}`, with the mandatory doubled-window check.
pub(crate) fn h1_transition(space: &TotalSpace, t: &Transition, m: u32, opts: &CechOptions) -> Result<u64> {
    let k = scaled_window(space, t, m, opts);
    let small = Complex::new(space.twists(), t, m, k).h1();
    let large = Complex::new(space.twists(), t, m, 2 * k).h1();
    checked_pair(small, large)
}

/// `dim H¹(Z^{(m)}, E)` by exact rank computation on the Čech complex.
pub fn h1_neighborhood(space: &TotalSpace, bundle: &Bundle, m: u32, opts: &CechOptions) -> Result<u64> {
    ensure_space(space, bundle)?;
    h1_transition(space, &bundle.transition(), m, opts)
}

/// `dim H⁰(Z^{(m)}, E)`: matched pairs of chart sections.
pub fn h0_neighborhood(space: &TotalSpace, bundle: &Bundle, m: u32, opts: &CechOptions) -> Result<u64> {
    ensure_space(space, bundle)?;
    let t = bundle.transition();
    let k = scaled_window(space, &t, m, opts);
    let small = Complex::new(space.twists(), &t, m, k).h0();
    let large = Complex::new(space.twists(), &t, m, 2 * k).h0();
    checked_pair(small, large)
}

fn ensure_space(space: &TotalSpace, bundle: &Bundle) -> Result<()> {
    if bundle.space() != space {
        return Err(Error::InvalidInput(format!(
            "bundle lives on {}, not on {}",
            bundle.space(),
            space
        )));
    }
    Ok(())
}

/// Cumulative `h¹(Z^{(m)})` for `m = 0..=top`, computed in parallel.
pub(crate) fn h1_cumulative(space: &TotalSpace, t: &Transition, top: u32, opts: &CechOptions) -> Result<Vec<u64>> {
    (0..=top)
        .into_par_iter()
        .map(|m| h1_transition(space, t, m, opts))
        .collect()
}

fn deltas(cumulative: &[u64]) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(cumulative.len());
    let mut prev = 0u64;
    for &h in cumulative {
        if h < prev {
            return Err(Error::InternalMismatch(format!(
                "h1 decreased from {prev} to {h} between consecutive levels"
            )));
        }
        out.push(h - prev);
        prev = h;
    }
    Ok(out)
}

/// `dim H¹` on the formal neighbourhood.
///
/// Every level contribution `δ_t` is bounded by `h¹(E|_Z ⊗ Sᵗ N*)`, which
/// degree arithmetic decides exactly. When that bound vanishes past some
/// level the computation stops there; otherwise the split case is infinite
/// outright and the non-split case needs divergence evidence.
pub fn h1_formal(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<DimResult> {
    ensure_space(space, bundle)?;
    let st = bundle.splitting_type()?;
    let t = bundle.transition();
    let split = bundle.is_split();
    let extra = opts.depth.unwrap_or(0);
    match split_profile(space, &st, false) {
        LevelProfile::Finite { last } => {
            let top = last.map_or(0, |l| l + 1).max(extra);
            let levels = deltas(&h1_cumulative(space, &t, top, opts)?)?;
            for (lvl, &d) in levels.iter().enumerate() {
                let bound = split_h1_level(space, &st, lvl as u32, false);
                if d > bound || (split && d != bound) {
                    return Err(Error::InternalMismatch(format!(
                        "level {lvl} contributes {d}, split bound is {bound}"
                    )));
                }
            }
            let certificate = if split {
                Certificate::SplitDegreeArithmetic
            } else if space.conormal_ample() {
                Certificate::AmpleStabilized
            } else {
                Certificate::SplitDegreeArithmetic
            };
            Ok(DimResult { value: Dim::Finite(levels.iter().sum()), levels, certificate })
        }
        LevelProfile::Infinite { onset } => {
            let base = (st[0] - st[st.len() - 1]).max(i64::from(onset)).max(1) as u32;
            let top = (2 * base).max(extra);
            if split {
                let levels = (0..=top).map(|lvl| split_h1_level(space, &st, lvl, false)).collect();
                return Ok(DimResult { value: Dim::Infinite, levels, certificate: Certificate::SplitDegreeArithmetic });
            }
            let levels = deltas(&h1_cumulative(space, &t, top, opts)?)?;
            if levels[base as usize..].iter().all(|&d| d > 0) {
                return Ok(DimResult { value: Dim::Infinite, levels, certificate: Certificate::DivergenceDetected });
            }
            if asserted_infinite(space, &st) {
                return Ok(DimResult { value: Dim::Infinite, levels, certificate: Certificate::PaperAsserted });
            }
            Err(Error::UndecidedFiniteness(format!(
                "levels {base}..={top} of a non-split bundle on {space} do not all contribute: {levels:?}"
            )))
        }
    }
}

/// `χ = ∞` is asserted for rank-2 bundles on `W_2` with `j ≥ 2` and on `W_3`.
fn asserted_infinite(space: &TotalSpace, st: &[i64]) -> bool {
    match space.w_index() {
        Some(2) => st.len() == 2 && st[0] == -st[1] && st[0] >= 2,
        Some(3) => st.len() == 2 && st[0] == -st[1],
        _ => false,
    }
}

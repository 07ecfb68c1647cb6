//! Formulas and sufficient conditions for chains of rational curves and for
//! smooth curves of positive genus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::binomial;

/// Outcome of a sufficient-condition check. `Inconclusive` says nothing
/// about whether the conclusion holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    Inconclusive,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Certified
        } else {
            Verdict::Inconclusive
        }
    }
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Certified
    }
}

/// Restriction data of a bundle on a chain `Z_a` of `a` projective lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainData {
    splitting: Vec<Vec<i64>>,
    conormal: Vec<Vec<i64>>,
}

impl ChainData {
    /// `splitting[i]` is the splitting type on the `i`-th component,
    /// `conormal[i]` the degrees of the conormal summands there.
    pub fn new(splitting: Vec<Vec<i64>>, conormal: Vec<Vec<i64>>) -> Result<Self> {
        if splitting.is_empty() || splitting.len() != conormal.len() {
            return Err(Error::InvalidInput(format!(
                "{} splitting rows but {} conormal rows",
                splitting.len(),
                conormal.len()
            )));
        }
        let r = splitting[0].len();
        if r == 0 || splitting.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput("splitting rows must share a positive rank".into()));
        }
        if splitting.iter().any(|row| row.windows(2).any(|w| w[0] < w[1])) {
            return Err(Error::InvalidInput("splitting rows must be non-increasing".into()));
        }
        if conormal.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput("every component needs conormal degrees".into()));
        }
        Ok(ChainData { splitting, conormal })
    }

    /// Data with the given gaps `ε_i` (splitting `(ε_i, 0)`) and `b_i`.
    pub fn from_gaps(eps: &[i64], b: &[i64]) -> Result<Self> {
        if eps.len() != b.len() || eps.iter().any(|&e| e < 0) {
            return Err(Error::InvalidInput("need one non-negative gap per conormal degree".into()));
        }
        ChainData::new(eps.iter().map(|&e| vec![e, 0]).collect(), b.iter().map(|&x| vec![x]).collect())
    }

    /// Number of components.
    pub fn a(&self) -> usize {
        self.splitting.len()
    }

    pub fn splitting(&self) -> &[Vec<i64>] {
        &self.splitting
    }

    /// `b_i = min_j b_{i,j}`.
    pub fn b(&self) -> Vec<i64> {
        self.conormal.iter().map(|row| *row.iter().min().expect("non-empty")).collect()
    }

    /// `ε_i = a_{i,1} - a_{i,r}`.
    pub fn eps(&self) -> Vec<i64> {
        self.splitting.iter().map(|row| row[0] - row[row.len() - 1]).collect()
    }

    pub fn ample(&self) -> bool {
        self.conormal.iter().flatten().all(|&x| x > 0)
    }
}

/// `h⁰` of a spanned line bundle with degrees `d_i` on a chain.
pub fn chain_line_h0(degrees: &[i64]) -> Result<u64> {
    if let Some(&d) = degrees.iter().find(|&&d| d < 0) {
        return Err(Error::NotSpanned(d));
    }
    Ok(1 + degrees.iter().map(|&d| d as u64).sum::<u64>())
}

/// `values[i] ≥ lo[i]` for all `i`, and `values[i] ≥ hi[i]` for all but at most one.
fn one_exception(values: &[i64], lo: &[i64], hi: &[i64]) -> bool {
    let all_lo = values.iter().zip(lo).all(|(v, l)| v >= l);
    let misses = values.iter().zip(hi).filter(|(v, h)| v < h).count();
    all_lo && misses <= 1
}

/// Certifies `h¹(Z_a; F) = 0`.
pub fn chain_h1_vanishes(data: &ChainData) -> Verdict {
    let mins: Vec<i64> = data.splitting.iter().map(|row| row[row.len() - 1]).collect();
    let a = mins.len();
    one_exception(&mins, &vec![-1; a], &vec![0; a]).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// The bundle itself.
    PlainA5,
    /// `End` twisted, on the formal neighbourhood.
    EndFormalA81,
    /// `End` twisted, on the `m`-th neighbourhood.
    EndLevelA82(u32),
}

/// Certifies that restriction from the neighbourhood to `Z_a` is bijective
/// on the relevant deformation classes.
pub fn chain_restriction_bijective(data: &ChainData, mode: Mode) -> Verdict {
    let b = data.b();
    let eps = data.eps();
    let (lhs, lo, hi): (Vec<i64>, Vec<i64>, Vec<i64>) = match mode {
        Mode::PlainA5 => (b, eps.iter().map(|e| e - 1).collect(), eps),
        Mode::EndFormalA81 => (b, eps.iter().map(|e| 2 * e - 1).collect(), eps.iter().map(|e| 2 * e).collect()),
        Mode::EndLevelA82(m) => (
            b.iter().map(|x| (i64::from(m) + 1) * x).collect(),
            eps.iter().map(|e| 2 * e - 1).collect(),
            eps.iter().map(|e| 2 * e).collect(),
        ),
    };
    one_exception(&lhs, &lo, &hi).into()
}

/// Certifies that every bundle with this restriction data splits into line
/// bundles on the formal neighbourhood.
pub fn chain_formally_split(data: &ChainData) -> Verdict {
    chain_restriction_bijective(data, Mode::EndFormalA81)
}

/// Data for a bundle on a smooth curve of genus `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusContext {
    pub g: u32,
    pub n: u32,
    /// Degree of the normal bundle.
    pub d: i64,
    /// Degrees of the filtration quotients; the rank is their count.
    pub degrees: Vec<i64>,
}

impl GenusContext {
    pub fn r(&self) -> usize {
        self.degrees.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaMode {
    /// Split bundle, general normal bundle.
    Exact,
    /// Filtered bundle.
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaValue {
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    pub integral: bool,
    pub mode: GammaMode,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn positive_part(x: BigRational) -> BigRational {
    if x > BigRational::zero() {
        x
    } else {
        BigRational::zero()
    }
}

fn check_genus(g: u32, t: u32, r: usize) -> Result<()> {
    if g < 2 || t < 1 || r < 1 {
        return Err(Error::InvalidInput(format!("need g ≥ 2, t ≥ 1, r ≥ 1 (got g={g}, t={t}, r={r})")));
    }
    Ok(())
}

/// `Σ_{i,j} max{0, t(d + 2g - 2 + a_i - a_j)/r + 1 - g} · C(t+r-1, t)`.
pub fn gamma_genus_split(ctx: &GenusContext, t: u32, mode: GammaMode) -> Result<GammaValue> {
    let r = ctx.r();
    check_genus(ctx.g, t, r)?;
    let g = i64::from(ctx.g);
    let mult = BigRational::from_integer(binomial(u64::from(t) + r as u64 - 1, u64::from(t)));
    let mut value = BigRational::zero();
    for ai in &ctx.degrees {
        for aj in &ctx.degrees {
            let x = rat(i64::from(t) * (ctx.d + 2 * g - 2 + ai - aj)) / rat(r as i64) + rat(1 - g);
            value += positive_part(x) * &mult;
        }
    }
    let integral = value.is_integer();
    Ok(GammaValue { value, integral, mode })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairVariant {
    SameDegree,
    /// Bundle degree `a`, reduced to `(0, …, 0, c)`.
    DegreeReduced(i64),
}

/// Degrees `(0, …, 0, c)` with `c = min(y, r - y)`, `a = r x + y`.
pub fn reduced_degrees(r: usize, a: i64) -> Vec<i64> {
    let y = a.rem_euclid(r as i64);
    let c = y.min(r as i64 - y);
    let mut out = vec![0; r];
    out[r - 1] = c;
    out
}

/// Bound on `γ` for a general pair `(N, F)`.
pub fn gamma_general_pair_bound(g: u32, n: u32, r: usize, d: i64, t: u32, variant: PairVariant) -> Result<BigRational> {
    check_genus(g, t, r)?;
    match variant {
        PairVariant::SameDegree => {
            let gi = i64::from(g);
            let x = rat(i64::from(t) * (d + 2 * gi - 2)) / rat(r as i64) + rat(1 - gi);
            let mult = binomial(u64::from(t) + r as u64 - 1, u64::from(t)) * BigInt::from(r * r);
            Ok(positive_part(x) * BigRational::from_integer(mult))
        }
        PairVariant::DegreeReduced(a) => {
            let ctx = GenusContext { g, n, d, degrees: reduced_degrees(r, a) };
            Ok(gamma_genus_split(&ctx, t, GammaMode::UpperBound)?.value)
        }
    }
}

/// `γ(F, N, 0) = h¹(Z; End F) = r²(g-1) + h⁰(Z; End F)`.
pub fn gamma_genus_zero_level(r: u64, g: u64, h0_end: u64) -> u64 {
    r * r * (g - 1) + h0_end
}

/// Dimension of the moduli of stable bundles of rank `r` on a genus-`g` curve.
pub fn moduli_dim(r: u64, g: u64) -> u64 {
    r * r * (g - 1) + 1
}

/// Higher-level contributions vanish on an elliptic curve with semistable data.
pub fn genus1_gamma(_t: u32) -> u64 {
    0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Semistable,
    Stable,
    General,
}

/// Certifies `α(N, t) = 0` from the degree of the normal bundle.
pub fn alpha_vanishes(g: u32, n: u32, d: i64, regime: Regime) -> Verdict {
    let g = i64::from(g);
    let c = i64::from(n) - 1;
    match regime {
        Regime::Semistable => d < c * (2 - 2 * g),
        Regime::Stable => d <= c * (2 - 2 * g),
        Regime::General => d <= c * (1 - g),
    }
    .into()
}

/// Whether a rational is a non-negative integer, as `u64`.
pub fn as_count(v: &BigRational) -> Option<u64> {
    if v.is_integer() && *v >= BigRational::zero() {
        u64::try_from(v.to_integer()).ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_bundle_sections() {
        assert_eq!(chain_line_h0(&[0, 0, 0]).unwrap(), 1);
        assert_eq!(chain_line_h0(&[1, 2]).unwrap(), 4);
        assert_eq!(chain_line_h0(&[-1, 0]), Err(Error::NotSpanned(-1)));
    }

    #[test]
    fn h1_vanishing() {
        let d = |rows: Vec<Vec<i64>>| {
            let a = rows.len();
            ChainData::new(rows, vec![vec![1]; a]).unwrap()
        };
        assert!(chain_h1_vanishes(&d(vec![vec![0, 0], vec![0, -1]])).holds());
        assert!(!chain_h1_vanishes(&d(vec![vec![0, -1], vec![0, -1]])).holds());
        assert!(chain_h1_vanishes(&d(vec![vec![5, 3]])).holds());
    }

    #[test]
    fn restriction_modes() {
        let d = ChainData::from_gaps(&[0, 1], &[1, 1]).unwrap();
        assert_eq!(chain_restriction_bijective(&d, Mode::EndFormalA81), Verdict::Certified);
        let d = ChainData::from_gaps(&[2, 2], &[1, 1]).unwrap();
        assert_eq!(chain_restriction_bijective(&d, Mode::EndFormalA81), Verdict::Inconclusive);
        assert_eq!(chain_restriction_bijective(&d, Mode::EndLevelA82(3)), Verdict::Certified);
        assert_eq!(chain_formally_split(&d), Verdict::Inconclusive);
        let d = ChainData::from_gaps(&[0, 0, 0], &[0, 3, 0]).unwrap();
        assert!(chain_restriction_bijective(&d, Mode::PlainA5).holds());
        assert!(!d.ample());
    }

    #[test]
    fn genus_gamma() {
        let ctx = GenusContext { g: 2, n: 2, d: -1, degrees: vec![0] };
        assert_eq!(gamma_genus_split(&ctx, 2, GammaMode::Exact).unwrap().value, rat(1));
        let ctx = GenusContext { g: 2, n: 2, d: -2, degrees: vec![0, 0] };
        assert_eq!(gamma_genus_split(&ctx, 1, GammaMode::Exact).unwrap().value, rat(0));
        let ctx = GenusContext { g: 2, n: 2, d: 3, degrees: vec![0, 1] };
        let v = gamma_genus_split(&ctx, 1, GammaMode::Exact).unwrap();
        assert_eq!(v.value, rat(12));
        assert!(v.integral);
        assert!(gamma_genus_split(&GenusContext { g: 1, n: 2, d: 0, degrees: vec![0] }, 1, GammaMode::Exact).is_err());
    }

    #[test]
    fn pair_bounds() {
        assert_eq!(reduced_degrees(3, 7), vec![0, 0, 1]);
        assert_eq!(reduced_degrees(4, 8), vec![0, 0, 0, 0]);
        assert_eq!(reduced_degrees(4, -1), vec![0, 0, 0, 1]);
        assert_eq!(gamma_general_pair_bound(2, 2, 2, -2, 1, PairVariant::SameDegree).unwrap(), rat(0));
        let same = gamma_general_pair_bound(3, 2, 3, 4, 2, PairVariant::SameDegree).unwrap();
        let reduced = gamma_general_pair_bound(3, 2, 3, 4, 2, PairVariant::DegreeReduced(6)).unwrap();
        assert_eq!(same, reduced);
    }

    #[test]
    fn zero_level_and_moduli() {
        assert_eq!(gamma_genus_zero_level(2, 2, 1), 5);
        assert_eq!(moduli_dim(2, 2), 5);
        assert_eq!(gamma_genus_zero_level(1, 1, 1), 1);
        assert_eq!(gamma_genus_zero_level(3, 3, 2), 20);
        assert_eq!(genus1_gamma(1), 0);
        assert_eq!(genus1_gamma(100), 0);
    }

    #[test]
    fn alpha() {
        assert!(alpha_vanishes(2, 3, -5, Regime::Semistable).holds());
        assert!(!alpha_vanishes(2, 3, -4, Regime::Semistable).holds());
        assert!(alpha_vanishes(2, 3, -4, Regime::Stable).holds());
        assert!(alpha_vanishes(1, 4, -1, Regime::General).holds());
    }
}

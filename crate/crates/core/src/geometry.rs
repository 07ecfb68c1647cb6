//! Local models `Tot(⊕ O(-b_k))` over P¹ and the bundles living on them.
//!
//! Two charts: `U = {z, u_1..u_n}` and `V = {ξ, v_1..v_n}` glued by
//! `ξ = z^{-1}`, `v_k = z^{b_k} u_k`. A bundle is given by a transition
//! matrix `T` in U-coordinates with `s_V = T · s_U` on the overlap, so the
//! line bundle `L_k` has transition `z^{-k}` and `k + 1` sections on P¹ when
//! `k ≥ 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TotalSpace {
    twists: Vec<i64>,
}

impl TotalSpace {
    /// `Tot(⊕_k O(-b_k))`: the conormal bundle of the zero section is `⊕ O(b_k)`.
    pub fn new(twists: Vec<i64>) -> Result<Self> {
        if twists.is_empty() {
            return Err(Error::InvalidInput("a total space needs at least one fiber direction".into()));
        }
        Ok(TotalSpace { twists })
    }

    /// `W_i = Tot(O(-i) ⊕ O(i-2))`.
    pub fn w(i: i64) -> Self {
        TotalSpace { twists: vec![i, 2 - i] }
    }

    /// `D_i = Tot(O(-i))`, the surface inside `W_i`.
    pub fn d(i: i64) -> Self {
        TotalSpace { twists: vec![i] }
    }

    /// `Tot(O(-1)^{⊕n})`.
    pub fn minus_one(n: usize) -> Self {
        TotalSpace { twists: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.twists.len()
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn conormal_ample(&self) -> bool {
        self.twists.iter().all(|&b| b >= 1)
    }

    pub fn max_abs_twist(&self) -> i64 {
        self.twists.iter().map(|b| b.abs()).max().unwrap_or(0)
    }

    /// `Some(i)` when the space is `W_i` for some `i ≥ 1`.
    pub fn w_index(&self) -> Option<i64> {
        match self.twists.as_slice() {
            &[i, k] if i >= 1 && k == 2 - i => Some(i),
            _ => None,
        }
    }

    /// The hypersurface `u_n = 0`. For `W_i` this is `D_i`.
    pub fn divisor(&self) -> Result<TotalSpace> {
        if self.n() < 2 {
            return Err(Error::InvalidInput("a surface has no divisor of this kind".into()));
        }
        TotalSpace::new(self.twists[..self.n() - 1].to_vec())
    }

    /// Parses `W1..W3`, `D1..D3`, or `W<i>`/`D<i>` for larger `i`.
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown space {name:?}"));
        let (kind, idx) = name.split_at(1.min(name.len()));
        let i: i64 = idx.parse().map_err(|_| bad())?;
        if i < 1 {
            return Err(bad());
        }
        match kind {
            "W" | "w" => Ok(TotalSpace::w(i)),
            "D" | "d" => Ok(TotalSpace::d(i)),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> String {
        if let Some(i) = self.w_index() {
            return format!("W{i}");
        }
        if let [i] = self.twists.as_slice() {
            if *i >= 1 {
                return format!("D{i}");
            }
        }
        let b: Vec<String> = self.twists.iter().map(i64::to_string).collect();
        format!("Tot(b={})", b.join(","))
    }
}

impl fmt::Display for TotalSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A line bundle on the formal neighbourhood, fixed by its degree on `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FormalLineBundle {
    pub degree: i64,
}

impl FormalLineBundle {
    pub fn transition(&self, n: usize) -> LaurentPoly {
        LaurentPoly::z_power(n, -self.degree)
    }
}

/// Transition data `s_V = T s_U`; upper triangular with `T[l][l] = z^{-degrees[l]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub degrees: Vec<i64>,
    pub entries: Vec<Vec<LaurentPoly>>,
}

impl Transition {
    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Largest `|k|` among the off-diagonal entries.
    pub fn off_diagonal_span(&self) -> i64 {
        let r = self.rank();
        (0..r)
            .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[i][j].z_span())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_gap(&self) -> i64 {
        let max = self.degrees.iter().max().copied().unwrap_or(0);
        let min = self.degrees.iter().min().copied().unwrap_or(0);
        max - min
    }
}

/// Rank-2 extension `0 → L_sub → E → L_quot → 0` with extension class `p`.
///
/// The usual case has `sub = -j`, `quot = j`, giving the transition
/// `[[z^j, p], [0, z^{-j}]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionBundle {
    space: TotalSpace,
    sub_degree: i64,
    quotient_degree: i64,
    p: LaurentPoly,
}

impl ExtensionBundle {
    pub fn new(space: TotalSpace, j: u32, p: LaurentPoly) -> Result<Self> {
        let j = i64::from(j);
        Self::with_degrees(space, -j, j, p)
    }

    pub fn with_degrees(space: TotalSpace, sub_degree: i64, quotient_degree: i64, p: LaurentPoly) -> Result<Self> {
        if p.nvars() != space.n() {
            return Err(Error::InvalidInput(format!(
                "extension class has {} fiber variables, space has {}",
                p.nvars(),
                space.n()
            )));
        }
        Ok(ExtensionBundle { space, sub_degree, quotient_degree, p })
    }

    pub fn space(&self) -> &TotalSpace {
        &self.space
    }

    pub fn p(&self) -> &LaurentPoly {
        &self.p
    }

    pub fn sub_degree(&self) -> i64 {
        self.sub_degree
    }

    pub fn quotient_degree(&self) -> i64 {
        self.quotient_degree
    }

    /// The splitting parameter `j` when the bundle has trivial determinant.
    pub fn j(&self) -> Option<i64> {
        (self.sub_degree == -self.quotient_degree).then_some(self.quotient_degree)
    }

    pub fn with_p(&self, p: LaurentPoly) -> Self {
        ExtensionBundle { p, ..self.clone() }
    }

    pub fn transition_matrix(&self) -> Vec<Vec<LaurentPoly>> {
        let n = self.space.n();
        vec![
            vec![LaurentPoly::z_power(n, -self.sub_degree), self.p.clone()],
            vec![LaurentPoly::zero(n), LaurentPoly::z_power(n, -self.quotient_degree)],
        ]
    }

    pub fn transition(&self) -> Transition {
        Transition {
            degrees: vec![self.sub_degree, self.quotient_degree],
            entries: self.transition_matrix(),
        }
    }

    /// Whether the monomial `z^k u^I` lies in the coboundary span
    /// `z^{-sub} α + z^{-quot} β` (α regular on U, β regular on V).
    fn is_coboundary_monomial(&self, z_exp: i64, twist_degree: i64) -> bool {
        z_exp >= -self.sub_degree || z_exp <= twist_degree - self.quotient_degree
    }

    /// Canonical representative of the class of `p` in `Ext¹(L_quot, L_sub)`
    /// over `Z^{(m)}`; zero exactly when the extension splits there.
    ///
    /// The coboundary span is spanned by monomials, so the representative is
    /// the part of `p` supported on the complementary monomials.
    pub fn reduce_extension_class(&self, m: u32) -> LaurentPoly {
        let b = self.space.twists();
        LaurentPoly::from_terms(
            self.space.n(),
            self.p
                .truncate_u(m)
                .terms()
                .filter(|(mono, _)| !self.is_coboundary_monomial(mono.z_exp, mono.twist_degree(b)))
                .map(|(mono, c)| (mono.clone(), c.clone())),
        )
    }

    /// The reduced class with no truncation (`p` is a polynomial, so this is
    /// the class on the formal neighbourhood).
    pub fn reduced_class(&self) -> LaurentPoly {
        self.reduce_extension_class(self.p.max_u_degree().unwrap_or(0))
    }

    /// Splitting type of `E|_Z`, non-increasing.
    ///
    /// Requires the restriction of `p` to the zero section to be a coboundary
    /// there (always true when `p` vanishes on `Z`).
    pub fn splitting_type(&self) -> Result<Vec<i64>> {
        if !self.reduce_extension_class(0).is_zero() {
            return Err(Error::UnsupportedRestriction(format!(
                "p = {} restricts to a non-trivial class on Z",
                self.p
            )));
        }
        let mut d = vec![self.sub_degree, self.quotient_degree];
        d.sort_unstable_by(|a, b| b.cmp(a));
        Ok(d)
    }

    /// Restriction to the divisor `u_n = 0`.
    pub fn restrict_to_divisor(&self) -> Result<ExtensionBundle> {
        let space = self.space.divisor()?;
        let p = self.p.drop_variable(self.space.n() - 1);
        ExtensionBundle::with_degrees(space, self.sub_degree, self.quotient_degree, p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBundle {
    space: TotalSpace,
    degrees: Vec<i64>,
}

impl SplitBundle {
    /// `⊕ L_{a_i}`; degrees are stored non-increasing.
    pub fn new(space: TotalSpace, mut degrees: Vec<i64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput("a split bundle needs at least one summand".into()));
        }
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SplitBundle { space, degrees })
    }

    pub fn line(space: TotalSpace, k: i64) -> Self {
        SplitBundle { space, degrees: vec![k] }
    }

    pub fn space(&self) -> &TotalSpace {
        &self.space
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn transition_matrix(&self) -> Vec<Vec<LaurentPoly>> {
        let n = self.space.n();
        let r = self.degrees.len();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        if i == j {
                            FormalLineBundle { degree: self.degrees[i] }.transition(n)
                        } else {
                            LaurentPoly::zero(n)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn transition(&self) -> Transition {
        Transition { degrees: self.degrees.clone(), entries: self.transition_matrix() }
    }

    pub fn restrict_to_divisor(&self) -> Result<SplitBundle> {
        SplitBundle::new(self.space.divisor()?, self.degrees.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bundle {
    Extension(ExtensionBundle),
    Split(SplitBundle),
}

impl Bundle {
    pub fn space(&self) -> &TotalSpace {
        match self {
            Bundle::Extension(e) => e.space(),
            Bundle::Split(s) => s.space(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Bundle::Extension(_) => 2,
            Bundle::Split(s) => s.degrees().len(),
        }
    }

    pub fn transition(&self) -> Transition {
        match self {
            Bundle::Extension(e) => e.transition(),
            Bundle::Split(s) => s.transition(),
        }
    }

    pub fn transition_matrix(&self) -> Vec<Vec<LaurentPoly>> {
        self.transition().entries
    }

    pub fn splitting_type(&self) -> Result<Vec<i64>> {
        match self {
            Bundle::Extension(e) => e.splitting_type(),
            Bundle::Split(s) => Ok(s.degrees().to_vec()),
        }
    }

    /// True when the bundle is a direct sum of line bundles as presented
    /// (split, or an extension whose class vanishes).
    pub fn is_split(&self) -> bool {
        match self {
            Bundle::Extension(e) => e.reduced_class().is_zero(),
            Bundle::Split(_) => true,
        }
    }

    pub fn restrict_to_divisor(&self) -> Result<Bundle> {
        Ok(match self {
            Bundle::Extension(e) => Bundle::Extension(e.restrict_to_divisor()?),
            Bundle::Split(s) => Bundle::Split(s.restrict_to_divisor()?),
        })
    }
}

impl From<ExtensionBundle> for Bundle {
    fn from(e: ExtensionBundle) -> Self {
        Bundle::Extension(e)
    }
}

impl From<SplitBundle> for Bundle {
    fn from(s: SplitBundle) -> Self {
        Bundle::Split(s)
    }
}

/// `(j, -j)` for the rank-2 extension bundles of the local threefolds.
pub fn splitting_type(e: &ExtensionBundle) -> Result<(i64, i64)> {
    let st = e.splitting_type()?;
    Ok((st[0], st[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str, n: usize) -> LaurentPoly {
        LaurentPoly::parse(s, n).unwrap()
    }

    #[test]
    fn space_names() {
        assert_eq!(TotalSpace::from_name("W2").unwrap().twists(), &[2, 0]);
        assert_eq!(TotalSpace::from_name("W3").unwrap().twists(), &[3, -1]);
        assert_eq!(TotalSpace::from_name("D3").unwrap().twists(), &[3]);
        assert!(TotalSpace::from_name("X1").is_err());
        assert!(TotalSpace::from_name("W0").is_err());
        assert_eq!(TotalSpace::w(1).name(), "W1");
        assert_eq!(TotalSpace::minus_one(3).name(), "Tot(b=1,1,1)");
        assert!(TotalSpace::w(1).conormal_ample());
        assert!(!TotalSpace::w(2).conormal_ample());
        assert_eq!(TotalSpace::w(3).divisor().unwrap(), TotalSpace::d(3));
    }

    #[test]
    fn transition_of_table_bundle() {
        let e = ExtensionBundle::new(TotalSpace::w(1), 4, poly("z^3*u1", 2)).unwrap();
        let t = e.transition_matrix();
        assert_eq!(t[0][0], poly("z^4", 2));
        assert_eq!(t[0][1], poly("z^3*u1", 2));
        assert!(t[1][0].is_zero());
        assert_eq!(t[1][1], poly("z^-4", 2));
    }

    #[test]
    fn trivial_transitions_are_identity() {
        let id = vec![
            vec![LaurentPoly::one(2), LaurentPoly::zero(2)],
            vec![LaurentPoly::zero(2), LaurentPoly::one(2)],
        ];
        let s = SplitBundle::new(TotalSpace::w(1), vec![0, 0]).unwrap();
        assert_eq!(s.transition_matrix(), id);
        let e = ExtensionBundle::new(TotalSpace::w(1), 0, LaurentPoly::zero(2)).unwrap();
        assert_eq!(e.transition_matrix(), id);
    }

    #[test]
    fn split_transition_is_diagonal() {
        let s = SplitBundle::new(TotalSpace::minus_one(3), vec![-1, 2, 0]).unwrap();
        assert_eq!(s.degrees(), &[2, 0, -1]);
        let t = s.transition_matrix();
        assert_eq!(t[0][0], poly("z^-2", 3));
        assert_eq!(t[1][1], poly("1", 3));
        assert_eq!(t[2][2], poly("z", 3));
        assert!(t[0][1].is_zero() && t[2][0].is_zero());
    }

    #[test]
    fn splitting_types() {
        let e = ExtensionBundle::new(TotalSpace::w(1), 5, poly("z^3*u1^2", 2)).unwrap();
        assert_eq!(splitting_type(&e).unwrap(), (5, -5));
        let e = ExtensionBundle::new(TotalSpace::w(1), 0, LaurentPoly::zero(2)).unwrap();
        assert_eq!(splitting_type(&e).unwrap(), (0, 0));
        let e = ExtensionBundle::new(TotalSpace::w(1), 2, poly("z^-1", 2)).unwrap();
        assert!(matches!(splitting_type(&e), Err(Error::UnsupportedRestriction(_))));
    }

    #[test]
    fn reduction_examples() {
        let w1 = TotalSpace::w(1);
        let e = ExtensionBundle::new(w1.clone(), 3, LaurentPoly::zero(2)).unwrap();
        assert!(e.reduce_extension_class(4).is_zero());
        let e = ExtensionBundle::new(w1.clone(), 2, poly("z^3*u1^3", 2)).unwrap();
        assert!(e.reduce_extension_class(3).is_zero());
        let e = ExtensionBundle::new(w1.clone(), 4, poly("z^3*u1", 2)).unwrap();
        assert_eq!(e.reduce_extension_class(1), poly("z^3*u1", 2));
        assert!(e.reduce_extension_class(0).is_zero());
        // z^j and z^{t-j} sit just outside the standard window
        let e = ExtensionBundle::new(w1, 4, poly("z^4*u1 + z^-3*u1 + z^-2*u1 + z*u2", 2)).unwrap();
        assert_eq!(e.reduced_class(), poly("z^-2*u1 + z*u2", 2));
    }

    #[test]
    fn restriction_to_divisor() {
        let e = ExtensionBundle::new(TotalSpace::w(2), 3, poly("u1 + u2 + z*u1*u2", 2)).unwrap();
        let r = e.restrict_to_divisor().unwrap();
        assert_eq!(r.space(), &TotalSpace::d(2));
        assert_eq!(r.p(), &poly("u1", 1));
    }
}

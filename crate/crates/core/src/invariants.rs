//! Named invariants of bundles: `γ`, `χ`, and the surface invariants `h′`, `w′`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use crate::cech::{
    h1_formal, split_h1_level, split_profile, CechOptions, Certificate, Complex, Dim, DimResult,
    LevelProfile,
};
use crate::error::{Error, Result};
use crate::geometry::{Bundle, TotalSpace, Transition};
use crate::linalg::SparseMatrix;

/// `C(n, k)` as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `γ` in closed form for a splitting type on a space with conormal `O(1)^n`.
pub fn gamma_closed(n: usize, degrees: &[i64]) -> BigInt {
    let mut total = BigInt::from(0);
    for ai in degrees {
        for aj in degrees {
            let gap = ai - aj;
            if gap <= 1 {
                continue;
            }
            for t in 0..=(gap - 2) {
                let mult = binomial((t + n as i64 - 1) as u64, t as u64);
                total += BigInt::from(gap - 1 - t) * mult;
            }
        }
    }
    total
}

/// `γ = Σ_t h¹(End E|_Z ⊗ Sᵗ N*)`, decided by degree arithmetic.
pub fn gamma_formal(space: &TotalSpace, bundle: &Bundle) -> Result<DimResult> {
    if bundle.space() != space {
        return Err(Error::InvalidInput(format!("bundle lives on {}, not on {space}", bundle.space())));
    }
    let st = bundle.splitting_type()?;
    let (value, top) = match split_profile(space, &st, true) {
        LevelProfile::Finite { last } => (None, last.map_or(0, |l| l + 1)),
        LevelProfile::Infinite { onset } => (Some(Dim::Infinite), onset.max(1) * 2),
    };
    let levels: Vec<u64> = (0..=top).map(|t| split_h1_level(space, &st, t, true)).collect();
    let value = value.unwrap_or_else(|| Dim::Finite(levels.iter().sum()));
    Ok(DimResult { value, levels, certificate: Certificate::SplitDegreeArithmetic })
}

/// `h = dim H¹` on the formal neighbourhood of `Z`.
pub fn h_formal(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<DimResult> {
    h1_formal(space, bundle, opts)
}

/// Local holomorphic Euler characteristic `χ = w + h`.
///
/// In codimension at least two `w` vanishes, so only `h` is computed.
pub fn chi(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<DimResult> {
    let mut h = h1_formal(space, bundle, opts)?;
    if space.n() == 1 {
        let w = surface_width(space, bundle, opts)?;
        if let Dim::Finite(v) = h.value {
            h.value = Dim::Finite(v + w);
        }
    }
    Ok(h)
}

fn divisor_restriction(space: &TotalSpace, bundle: &Bundle) -> Result<(TotalSpace, Bundle)> {
    if space.w_index().is_none() {
        return Err(Error::InvalidInput(format!("{space} is not one of the spaces W_i")));
    }
    let restricted = bundle.restrict_to_divisor()?;
    Ok((restricted.space().clone(), restricted))
}

/// `h′(E) = h(E|_{D_i})`.
pub fn h_prime(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<DimResult> {
    let (surface, restricted) = divisor_restriction(space, bundle)?;
    h1_formal(&surface, &restricted, opts)
}

/// `w′(E) = w(E|_{D_i})`.
pub fn w_prime(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<u64> {
    let (surface, restricted) = divisor_restriction(space, bundle)?;
    surface_width(&surface, &restricted, opts)
}

/// Length of `(π_*F)^{∨∨}/π_*F` for a bundle on a surface `Tot(O(-i))`:
/// the sections over the complement of `Z` modulo those over all of it.
///
/// A section off `Z` is determined modulo global ones by the part of its
/// U-component with negative `u`-exponents. Such a part `q` extends iff the
/// negative-`u` terms of `T q` are V-regular and the rest of `T q` is a
/// coboundary. `q` is searched in a box of monomials `z^a u^{-c} e_l`.
pub fn surface_width(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<u64> {
    if space.n() != 1 || space.twists()[0] < 1 {
        return Err(Error::InvalidInput(format!("width needs a surface with ample conormal, got {space}")));
    }
    if bundle.space() != space {
        return Err(Error::InvalidInput(format!("bundle lives on {}, not on {space}", bundle.space())));
    }
    let st = bundle.splitting_type()?;
    let level = match split_profile(space, &st, false) {
        LevelProfile::Finite { last } => last.map_or(0, |l| l + 1).max(opts.depth.unwrap_or(0)),
        LevelProfile::Infinite { .. } => unreachable!("ample conormal"),
    };
    let t = bundle.transition();
    let amax = st.iter().map(|a| a.abs()).max().unwrap_or(0);
    let (zmax, umax) = off_diagonal_extent(&t);
    let scale = i64::from(opts.window_scale.max(1));
    let az = (amax + zmax.max(0) + 1) * scale;
    let bu = (2 * amax + umax + 1) * scale;
    let small = width_in_box(space, &t, level, az, bu, scale);
    let large = width_in_box(space, &t, level, 2 * az, 2 * bu, 2 * scale);
    if small == large {
        Ok(small)
    } else {
        Err(Error::BoxUnstable { small, large })
    }
}

fn off_diagonal_extent(t: &Transition) -> (i64, i64) {
    let mut zmax = 0;
    let mut umax = 0;
    for (r, row) in t.entries.iter().enumerate() {
        for (l, e) in row.iter().enumerate() {
            if r != l {
                zmax = zmax.max(e.max_z_exp().unwrap_or(0));
                umax = umax.max(i64::from(e.max_u_degree().unwrap_or(0)));
            }
        }
    }
    (zmax, umax)
}

fn width_in_box(space: &TotalSpace, t: &Transition, level: u32, az: i64, bu: i64, scale: i64) -> u64 {
    let b = space.twists()[0];
    let reach = t
        .entries
        .iter()
        .flatten()
        .filter_map(|e| e.max_z_exp())
        .max()
        .unwrap_or(0);
    let window = (Complex::default_window(space, t, level) * scale).max(az + reach + 1);
    let cx = Complex::new(space.twists(), t, level, window);
    let base = cx.ncols();

    let mut negative: HashMap<(usize, i64, i64), usize> = HashMap::new();
    let mut phi: Vec<Vec<(usize, BigRational)>> = Vec::new();
    let rank = t.rank();
    for l in 0..rank {
        for a in 0..=az {
            for c in 1..=bu {
                let mut row = Vec::new();
                for r in 0..rank {
                    for (mono, coeff) in t.entries[r][l].terms() {
                        let e = i64::from(mono.u_exps[0]) - c;
                        let z = a + mono.z_exp;
                        if e < 0 {
                            if z <= b * e {
                                continue;
                            }
                            let next = negative.len();
                            let idx = *negative.entry((r, z, e)).or_insert(next);
                            row.push((base + idx, coeff.clone()));
                        } else if e <= i64::from(level) {
                            if let Some(col) = cx.col(r, z, &[e as u32]) {
                                row.push((col, coeff.clone()));
                            }
                        }
                    }
                }
                phi.push(row);
            }
        }
    }

    let ncols = base + negative.len();
    let mut killed = cx.v_killed();
    killed.resize(ncols, false);
    let mut mat = SparseMatrix::new(ncols);
    cx.push_u_rows(&mut mat);
    let rank_g = mat.rank_modulo(&killed);
    let nbox = phi.len();
    for row in phi {
        mat.push_row(row);
    }
    let rank_all = mat.rank_modulo(&killed);
    (nbox - (rank_all - rank_g)) as u64
}

/// Closed forms for split bundles `O(j) ⊕ O(-j)` on `W_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitFormulas {
    pub chi: Dim,
    pub h_prime: u64,
    pub w_prime: u64,
}

fn exact_div(num: i64, den: i64) -> u64 {
    let (q, r) = num.div_rem(&den);
    assert_eq!(r, 0, "{num} is not divisible by {den}");
    u64::try_from(q).expect("non-negative")
}

pub fn f0(j: u64) -> u64 {
    let j = j as i64;
    exact_div(j * j * j - j, 6)
}

pub fn f(i: u32, j: u64) -> u64 {
    let j = j as i64;
    match i {
        1 => exact_div(j * j - j, 2),
        2 => {
            let h = j / 2;
            (h * (j - h)) as u64
        }
        3 => {
            let k = (j + 1) / 3;
            exact_div(k * (2 * j + 1 - 3 * k), 2)
        }
        _ => panic!("f_{i} is not defined"),
    }
}

pub fn g(i: u32, j: u64) -> u64 {
    let j = j as i64;
    match i {
        1 => exact_div(j * j + j, 2),
        2 => {
            let h = j / 2;
            (h * j - h * h) as u64
        }
        3 => {
            let k = j / 3;
            exact_div(k * (2 * j - 1 - 3 * k), 2)
        }
        _ => panic!("g_{i} is not defined"),
    }
}

pub fn split_formulas(i: u32, j: u64) -> Result<SplitFormulas> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidInput(format!("W_{i} has no closed forms")));
    }
    let chi = match i {
        1 => Dim::Finite(f0(j)),
        2 if j <= 1 => Dim::Finite(0),
        _ => Dim::Infinite,
    };
    Ok(SplitFormulas { chi, h_prime: f(i, j), w_prime: g(i, j) })
}

/// Everything known about one bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub space: String,
    pub j: Option<i64>,
    pub p: String,
    pub splitting_type: Vec<i64>,
    pub gamma: Dim,
    pub chi: Dim,
    pub h_prime: Option<u64>,
    pub w_prime: Option<u64>,
    pub certificates: BTreeMap<String, Certificate>,
}

impl InvariantReport {
    pub fn csv_header() -> [&'static str; 9] {
        ["space", "j", "p", "splitting_type", "gamma", "chi", "h_prime", "w_prime", "certificates"]
    }

    pub fn csv_record(&self) -> [String; 9] {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let st: Vec<String> = self.splitting_type.iter().map(i64::to_string).collect();
        let certs: Vec<String> = self.certificates.iter().map(|(k, v)| format!("{k}={v}")).collect();
        [
            self.space.clone(),
            self.j.map(|j| j.to_string()).unwrap_or_default(),
            self.p.clone(),
            st.join(" "),
            self.gamma.to_string(),
            self.chi.to_string(),
            opt(self.h_prime),
            opt(self.w_prime),
            certs.join(";"),
        ]
    }
}

fn extension_class(bundle: &Bundle) -> String {
    match bundle {
        Bundle::Extension(e) => e.p().to_string(),
        Bundle::Split(_) => "0".to_string(),
    }
}

fn is_split_class(bundle: &Bundle) -> bool {
    match bundle {
        Bundle::Extension(e) => e.reduced_class().is_zero(),
        Bundle::Split(_) => true,
    }
}

/// Computes every invariant, cross-checking split bundles on `W_i` against
/// the closed forms.
pub fn invariant_report(space: &TotalSpace, bundle: &Bundle, opts: &CechOptions) -> Result<InvariantReport> {
    let splitting_type = bundle.splitting_type()?;
    let gamma = gamma_formal(space, bundle)?;
    let chi = chi(space, bundle, opts)?;
    let mut certificates = BTreeMap::new();
    certificates.insert("gamma".to_string(), gamma.certificate);
    certificates.insert("chi".to_string(), chi.certificate);
    let (h_prime, w_prime) = if space.w_index().is_some() {
        let h = h_prime(space, bundle, opts)?;
        certificates.insert("h_prime".to_string(), h.certificate);
        let w = w_prime(space, bundle, opts)?;
        let hv = h.value.finite().ok_or_else(|| {
            Error::InternalMismatch("h' is infinite on a surface with ample conormal".to_string())
        })?;
        (Some(hv), Some(w))
    } else {
        (None, None)
    };
    let j = match (bundle, splitting_type.as_slice()) {
        (Bundle::Extension(e), _) => e.j(),
        (Bundle::Split(_), [a, b]) if *a == -*b => Some(*a),
        _ => None,
    };
    let report = InvariantReport {
        space: space.name(),
        j,
        p: extension_class(bundle),
        splitting_type,
        gamma: gamma.value,
        chi: chi.value,
        h_prime,
        w_prime,
        certificates,
    };
    if let (Some(i), Some(j)) = (space.w_index(), report.j) {
        if is_split_class(bundle) && j >= 0 {
            let closed = split_formulas(i as u32, j as u64)?;
            let computed = (report.chi, report.h_prime, report.w_prime);
            if computed != (closed.chi, Some(closed.h_prime), Some(closed.w_prime)) {
                return Err(Error::InternalMismatch(format!(
                    "{} j={j}: computed {:?}, closed forms {:?}",
                    report.space, computed, closed
                )));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ExtensionBundle, SplitBundle};
    use crate::laurent::LaurentPoly;

    fn ext(space: &TotalSpace, j: u32, p: &str) -> Bundle {
        ExtensionBundle::new(space.clone(), j, LaurentPoly::parse(p, space.n()).unwrap())
            .unwrap()
            .into()
    }

    const O: CechOptions = CechOptions { window_scale: 1, depth: None };

    #[test]
    fn closed_gamma() {
        assert_eq!(gamma_closed(2, &[1, -1]), BigInt::from(1));
        assert_eq!(gamma_closed(2, &[2, -2]), BigInt::from(10));
        assert_eq!(gamma_closed(3, &[4, 4, 4]), BigInt::from(0));
    }

    #[test]
    fn formal_gamma() {
        let w1 = TotalSpace::w(1);
        assert_eq!(gamma_formal(&w1, &ext(&w1, 1, "z*u2")).unwrap().value, Dim::Finite(1));
        let t3 = TotalSpace::minus_one(3);
        let b: Bundle = SplitBundle::new(t3.clone(), vec![2, 0, -2]).unwrap().into();
        let expected = gamma_closed(3, &[2, 0, -2]);
        assert_eq!(gamma_formal(&t3, &b).unwrap().value, Dim::Finite(expected.try_into().unwrap()));
        let w2 = TotalSpace::w(2);
        let b: Bundle = SplitBundle::new(w2.clone(), vec![0, 0]).unwrap().into();
        assert_eq!(gamma_formal(&w2, &b).unwrap().value, Dim::Finite(0));
        // End(O ⊕ O) ⊗ Sᵗ N* contains O(-t) when a twist is negative
        let w3 = TotalSpace::w(3);
        let b: Bundle = SplitBundle::new(w3.clone(), vec![0, 0]).unwrap().into();
        assert_eq!(gamma_formal(&w3, &b).unwrap().value, Dim::Infinite);
    }

    #[test]
    fn formulas() {
        assert_eq!(split_formulas(1, 4).unwrap(), SplitFormulas { chi: Dim::Finite(10), h_prime: 6, w_prime: 10 });
        assert_eq!(split_formulas(2, 5).unwrap(), SplitFormulas { chi: Dim::Infinite, h_prime: 6, w_prime: 6 });
        let s = split_formulas(3, 1).unwrap();
        assert_eq!((s.h_prime, s.w_prime), (0, 0));
        for j in 0..20 {
            assert_eq!(g(1, j), f(1, j) + j);
            let sum: u64 = (0..j).map(|t| (t + 1) * j.saturating_sub(1 + t)).sum();
            assert_eq!(f0(j), sum);
        }
    }

    #[test]
    fn chi_examples() {
        let w1 = TotalSpace::w(1);
        assert_eq!(chi(&w1, &ext(&w1, 5, "z^3*u1^2"), &O).unwrap().value, Dim::Finite(16));
        assert_eq!(chi(&w1, &ext(&w1, 0, "u1 + z*u2"), &O).unwrap().value, Dim::Finite(0));
        let w3 = TotalSpace::w(3);
        assert_eq!(chi(&w3, &ext(&w3, 0, "0"), &O).unwrap().value, Dim::Infinite);
    }

    #[test]
    fn partial_invariants() {
        let w1 = TotalSpace::w(1);
        let w2 = TotalSpace::w(2);
        let w3 = TotalSpace::w(3);
        assert_eq!(h_prime(&w1, &ext(&w1, 4, "z^3*u1"), &O).unwrap().value, Dim::Finite(4));
        assert_eq!(h_prime(&w2, &ext(&w2, 5, "z^3*u1^2"), &O).unwrap().value, Dim::Finite(6));
        assert_eq!(w_prime(&w1, &ext(&w1, 3, "u1"), &O).unwrap(), 1);
        assert_eq!(w_prime(&w3, &ext(&w3, 4, "z^3*u1^2"), &O).unwrap(), 2);
        for s in [&w1, &w2, &w3] {
            assert_eq!(w_prime(s, &ext(s, 0, "u1"), &O).unwrap(), 0);
            assert_eq!(h_prime(s, &ext(s, 1, "z*u1"), &O).unwrap().value, Dim::Finite(0));
        }
    }

    #[test]
    fn reports() {
        let w1 = TotalSpace::w(1);
        let r = invariant_report(&w1, &ext(&w1, 5, "z*u1"), &O).unwrap();
        assert_eq!((r.chi, r.h_prime, r.w_prime), (Dim::Finite(10), Some(4), Some(1)));
        let w2 = TotalSpace::w(2);
        let r = invariant_report(&w2, &ext(&w2, 4, "z*u1"), &O).unwrap();
        assert_eq!((r.chi, r.h_prime, r.w_prime), (Dim::Infinite, Some(3), Some(0)));
        let r = invariant_report(&w1, &ext(&w1, 0, "0"), &O).unwrap();
        assert_eq!((r.gamma, r.chi, r.h_prime, r.w_prime), (Dim::Finite(0), Dim::Finite(0), Some(0), Some(0)));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"chi\":0"));
    }
}

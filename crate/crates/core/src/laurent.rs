//! Exact Laurent polynomials in one base variable `z` and `n` fiber variables.
//!
//! `z` carries integer exponents, `u_1..u_n` non-negative ones. Coefficients
//! are arbitrary-precision rationals and zero coefficients are never stored,
//! so every polynomial has exactly one representation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub z_exp: i64,
    pub u_exps: Vec<u32>,
}

impl Monomial {
    pub fn new(z_exp: i64, u_exps: Vec<u32>) -> Self {
        Monomial { z_exp, u_exps }
    }

    pub fn constant(n: usize) -> Self {
        Monomial { z_exp: 0, u_exps: vec![0; n] }
    }

    /// Infinitesimal-neighbourhood level of the term.
    pub fn u_degree(&self) -> u32 {
        self.u_exps.iter().sum()
    }

    /// Weighted degree `Σ I_k b_k`.
    pub fn twist_degree(&self, twists: &[i64]) -> i64 {
        self.u_exps
            .iter()
            .zip(twists)
            .map(|(&e, &b)| i64::from(e) * b)
            .sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.u_exps.len(), other.u_exps.len());
        Monomial {
            z_exp: self.z_exp + other.z_exp,
            u_exps: self
                .u_exps
                .iter()
                .zip(&other.u_exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

// (u-degree, u_exps, z_exp)
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.u_degree()
            .cmp(&other.u_degree())
            .then_with(|| self.u_exps.cmp(&other.u_exps))
            .then_with(|| self.z_exp.cmp(&other.z_exp))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, 0, &vec![0; n], BigRational::one())
    }

    pub fn monomial(n: usize, z_exp: i64, u_exps: &[u32], coeff: BigRational) -> Self {
        assert_eq!(u_exps.len(), n, "monomial arity must match the fiber count");
        let mut p = Self::zero(n);
        p.add_term(Monomial::new(z_exp, u_exps.to_vec()), coeff);
        p
    }

    /// `z^k` with unit coefficient.
    pub fn z_power(n: usize, k: i64) -> Self {
        Self::monomial(n, k, &vec![0; n], BigRational::one())
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        assert_eq!(m.u_exps.len(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn max_u_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::u_degree).max()
    }

    pub fn min_z_exp(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.z_exp).min()
    }

    pub fn max_z_exp(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.z_exp).max()
    }

    /// Largest `|k|` over the `z^k` occurring in the polynomial (0 if empty).
    pub fn z_span(&self) -> i64 {
        self.terms.keys().map(|m| m.z_exp.abs()).max().unwrap_or(0)
    }

    /// The polynomial obtained by setting every fiber variable to zero.
    pub fn restrict_to_zero_section(&self) -> LaurentPoly {
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .filter(|(m, _)| m.u_degree() == 0)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Drops every term of u-degree above `m` (reduction mod `I^{m+1}`).
    pub fn truncate_u(&self, m: u32) -> LaurentPoly {
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .filter(|(mono, _)| mono.u_degree() <= m)
                .map(|(mono, c)| (mono.clone(), c.clone())),
        )
    }

    /// Rewrites the polynomial in the other chart: `z ↦ z^{-1}`, `u_k ↦ z^{b_k} u_k`.
    ///
    /// Applying the map twice with the same twists is the identity.
    pub fn chart_substitute(&self, twists: &[i64]) -> LaurentPoly {
        assert_eq!(twists.len(), self.n, "twist vector length must equal fiber count");
        Self::from_terms(
            self.n,
            self.terms.iter().map(|(m, c)| {
                let z = -m.z_exp + m.twist_degree(twists);
                (Monomial::new(z, m.u_exps.clone()), c.clone())
            }),
        )
    }

    /// Sets `u_k = 0` and removes that variable (0-based `k`).
    pub fn drop_variable(&self, k: usize) -> LaurentPoly {
        assert!(k < self.n);
        Self::from_terms(
            self.n - 1,
            self.terms
                .iter()
                .filter(|(m, _)| m.u_exps[k] == 0)
                .map(|(m, c)| {
                    let mut u = m.u_exps.clone();
                    u.remove(k);
                    (Monomial::new(m.z_exp, u), c.clone())
                }),
        )
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by `z^k u^I`.
    pub fn shift(&self, k: i64, u: &[u32]) -> LaurentPoly {
        let s = Monomial::new(k, u.to_vec());
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.mul(&s), c.clone())).collect(),
        }
    }

    pub fn parse(text: &str, n: usize) -> Result<LaurentPoly> {
        Parser::new(text, n).parse()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.n, rhs.n);
        let mut out = LaurentPoly::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            match m.z_exp {
                0 => {}
                1 => factors.push("z".to_string()),
                k => factors.push(format!("z^{k}")),
            }
            for (k, &e) in m.u_exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("u{}", k + 1)),
                    e => factors.push(format!("u{}^{e}", k + 1)),
                }
            }
            let coeff = if abs.is_integer() {
                abs.numer().to_string()
            } else {
                format!("{}/{}", abs.numer(), abs.denom())
            };
            if factors.is_empty() {
                write!(f, "{coeff}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentVector {
    components: Vec<LaurentPoly>,
}

impl LaurentVector {
    pub fn new(components: Vec<LaurentPoly>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("a vector needs at least one component".into()));
        }
        let n = components[0].nvars();
        if components.iter().any(|c| c.nvars() != n) {
            return Err(Error::InvalidInput("components disagree on fiber count".into()));
        }
        Ok(LaurentVector { components })
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LaurentPoly] {
        &self.components
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, n: usize) -> Self {
        Parser { src: text.as_bytes(), pos: 0, n }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit run parses"))
    }

    fn small_nat(&mut self) -> Result<u64> {
        let v = self.nat()?;
        u64::try_from(v).or_else(|_| self.err("exponent too large"))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let v = i64::try_from(self.small_nat()?).or_else(|_| self.err("exponent too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn parse(mut self) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(self.n);
        let mut sign = if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        };
        loop {
            let (m, c) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            out.add_term(m, c);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(_) => return self.err("expected '+' or '-'"),
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, BigRational)> {
        let mut mono = Monomial::constant(self.n);
        let mut coeff = BigRational::one();
        let mut need_factor: bool;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.nat()?;
                let den = if self.eat(b'/') { self.nat()? } else { BigInt::one() };
                if den.is_zero() {
                    return self.err("zero denominator");
                }
                coeff = BigRational::new(num, den);
                if !self.eat(b'*') {
                    return Ok((mono, coeff));
                }
                need_factor = true;
            }
            Some(b'z') | Some(b'u') => need_factor = true,
            _ => return self.err("expected a coefficient or a factor"),
        }
        while need_factor {
            self.factor(&mut mono)?;
            need_factor = self.eat(b'*');
        }
        Ok((mono, coeff))
    }

    fn factor(&mut self, mono: &mut Monomial) -> Result<()> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                let e = if self.eat(b'^') { self.int()? } else { 1 };
                mono.z_exp += e;
            }
            Some(b'u') => {
                self.pos += 1;
                self.eat(b'_');
                let idx = self.small_nat()? as usize;
                if idx == 0 || idx > self.n {
                    return Err(Error::VariableOutOfRange { index: idx, n: self.n });
                }
                let e = if self.eat(b'^') { self.small_nat()? } else { 1 };
                let e = u32::try_from(e).or_else(|_| self.err("exponent too large"))?;
                mono.u_exps[idx - 1] += e;
            }
            _ => return self.err("expected 'z' or 'u'"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_table_entry() {
        let p = LaurentPoly::parse("z^3*u1", 2).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Monomial::new(3, vec![1, 0])), q(1, 1));
    }

    #[test]
    fn parses_zero_and_fractions() {
        assert!(LaurentPoly::parse("0", 2).unwrap().is_zero());
        let p = LaurentPoly::parse("z^-2*u1^2 + 1/2*u2", 2).unwrap();
        assert_eq!(p.coeff(&Monomial::new(-2, vec![2, 0])), q(1, 1));
        assert_eq!(p.coeff(&Monomial::new(0, vec![0, 1])), q(1, 2));
        assert_eq!(p.to_string(), "1/2*u2 + z^-2*u1^2");
        assert_eq!(LaurentPoly::parse(&p.to_string(), 2).unwrap(), p);
    }

    #[test]
    fn underscore_and_whitespace_are_insignificant() {
        let a = LaurentPoly::parse("z ^ 3 * u_1 ^ 2 - 3/4 * z", 2).unwrap();
        let b = LaurentPoly::parse("z^3*u1^2-3/4*z", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "-3/4*z + z^3*u1^2");
    }

    #[test]
    fn like_terms_cancel() {
        assert!(LaurentPoly::parse("z*u1 - z*u1", 1).unwrap().is_zero());
        assert_eq!(LaurentPoly::parse("u1 + u1", 1).unwrap().to_string(), "2*u1");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(LaurentPoly::parse("u3", 2), Err(Error::VariableOutOfRange { index: 3, n: 2 })));
        assert!(matches!(LaurentPoly::parse("u0", 2), Err(Error::VariableOutOfRange { .. })));
        for bad in ["", "z^", "u1^-1", "3*", "z u1", "1/0", "x"] {
            assert!(matches!(LaurentPoly::parse(bad, 2), Err(Error::Syntax { .. })), "{bad:?}");
        }
    }

    #[test]
    fn chart_substitution_examples() {
        let b = [1, 1];
        let u1 = LaurentPoly::parse("u1", 2).unwrap();
        assert_eq!(u1.chart_substitute(&b), LaurentPoly::parse("z*u1", 2).unwrap());
        assert_eq!(LaurentPoly::one(2).chart_substitute(&[4, -7]), LaurentPoly::one(2));
        let p = LaurentPoly::parse("z^3*u1", 2).unwrap();
        assert_eq!(p.chart_substitute(&b), LaurentPoly::parse("z^-2*u1", 2).unwrap());
    }

    #[test]
    fn truncation_examples() {
        let p = LaurentPoly::parse("z^3*u1^2 + u2", 2).unwrap();
        assert_eq!(p.truncate_u(1), LaurentPoly::parse("u2", 2).unwrap());
        assert_eq!(p.truncate_u(2), p);
        let z5 = LaurentPoly::parse("z^5", 2).unwrap();
        assert_eq!(z5.truncate_u(0), z5);
    }

    #[test]
    fn drop_variable_restricts() {
        let p = LaurentPoly::parse("z*u1 + u2 + z^2*u1*u2", 2).unwrap();
        assert_eq!(p.drop_variable(1), LaurentPoly::parse("z*u1", 1).unwrap());
    }
}

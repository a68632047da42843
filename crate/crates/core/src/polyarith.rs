//! Exact multivariate polynomials and truncated rational power series over
//! arbitrary-precision integers.
//!
//! Everything here is exact: coefficients are [`BigInt`] and no operation
//! rounds or overflows. Problem sizes in this crate are tiny (degrees of a few
//! dozen, a handful of variables), so a sparse `BTreeMap` keyed by exponent
//! vectors is plenty.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse multivariate polynomial with integer coefficients.
///
/// No stored term has a zero coefficient, and every exponent vector has one
/// entry per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl ExactPoly {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        Self {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], c);
        }
        p
    }

    pub fn one<S: AsRef<str>>(vars: &[S]) -> Self {
        Self::constant(vars, 1)
    }

    /// The polynomial consisting of the single variable `name`.
    ///
    /// Panics if `name` is not one of `vars`.
    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Self {
        let mut p = Self::zero(vars);
        let idx = p
            .var_index(name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        let mut e = vec![0; p.vars.len()];
        e[idx] = 1;
        p.terms.insert(e, BigInt::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; zero
    /// coefficients are dropped and repeated exponents are summed.
    pub fn from_terms<S: AsRef<str>, I>(vars: &[S], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(Error::ExponentLength {
                    expected: p.vars.len(),
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Exact coefficient of the monomial with exponent vector `exps`.
    pub fn coeff(&self, exps: &[u32]) -> Result<BigInt> {
        if exps.len() != self.vars.len() {
            return Err(Error::ExponentLength {
                expected: self.vars.len(),
                got: exps.len(),
            });
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_default())
    }

    /// Constant term.
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_default()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Drops every term whose exponent exceeds `orders` in some variable.
    pub fn truncate(&self, orders: &[u32]) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().zip(orders).all(|(a, b)| a <= b))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product truncated to exponents bounded by `orders` componentwise.
    pub fn mul_truncated(&self, other: &Self, orders: &[u32]) -> Self {
        let (a, b) = align(self, other);
        let mut out = Self::zero(&a.vars);
        for (ea, ca) in &a.terms {
            if ea.iter().zip(orders).any(|(x, o)| x > o) {
                continue;
            }
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if e.iter().zip(orders).any(|(x, o)| x > o) {
                    continue;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Re-expresses `self` over a larger variable list (a superset).
    pub fn embed<S: AsRef<str>>(&self, vars: &[S]) -> Self {
        let target: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target
                    .iter()
                    .position(|t| t == v)
                    .unwrap_or_else(|| panic!("variable {v} missing from target"))
            })
            .collect();
        let mut out = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

/// Merges the variable lists of two polynomials: `a`'s variables first, then
/// any of `b`'s that are new.
fn merged_vars(a: &ExactPoly, b: &ExactPoly) -> Vec<String> {
    let mut vars = a.vars.clone();
    for v in &b.vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars
}

fn align(a: &ExactPoly, b: &ExactPoly) -> (ExactPoly, ExactPoly) {
    if a.vars == b.vars {
        return (a.clone(), b.clone());
    }
    let vars = merged_vars(a, b);
    (a.embed(&vars), b.embed(&vars))
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let (mut a, b) = align(self, rhs);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        self + &(-rhs)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        let (a, b) = align(self, rhs);
        let mut out = ExactPoly::zero(&a.vars);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let is_const = e.iter().all(|&x| x == 0);
            if !abs.is_one() || is_const {
                write!(f, "{abs}")?;
            }
            let mut sep = !abs.is_one() && !is_const;
            for (v, &x) in self.vars.iter().zip(e) {
                if x == 0 {
                    continue;
                }
                if sep {
                    write!(f, "*")?;
                }
                sep = true;
                if x == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{x}")?;
                }
            }
        }
        Ok(())
    }
}

/// A rational function `numerator / Π factor^power` read as a power series
/// around the origin.
#[derive(Clone, Debug)]
pub struct RationalSeries {
    numerator: ExactPoly,
    denominators: Vec<(ExactPoly, u32)>,
}

impl RationalSeries {
    pub fn new(numerator: ExactPoly, denominators: Vec<(ExactPoly, u32)>) -> Result<Self> {
        for (d, _) in &denominators {
            if d.constant_term().is_zero() {
                return Err(Error::DenominatorVanishesAtOrigin);
            }
        }
        // bring every piece onto one variable list
        let mut vars = numerator.vars.clone();
        for (d, _) in &denominators {
            for v in &d.vars {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let numerator = numerator.embed(&vars);
        let denominators = denominators
            .into_iter()
            .map(|(d, k)| (d.embed(&vars), k))
            .collect();
        Ok(Self {
            numerator,
            denominators,
        })
    }

    /// A polynomial viewed as a series with trivial denominator.
    pub fn polynomial(p: ExactPoly) -> Self {
        Self {
            numerator: p,
            denominators: Vec::new(),
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.numerator.vars
    }

    /// Exact coefficient of the monomial `exps` in the series expansion.
    ///
    /// The expansion is truncated at `exps` in each variable, which is all
    /// that is needed for this one coefficient.
    pub fn coeff(&self, exps: &[u32]) -> Result<BigInt> {
        let nv = self.numerator.vars.len();
        if exps.len() != nv {
            return Err(Error::ExponentLength {
                expected: nv,
                got: exps.len(),
            });
        }
        let mut acc = self.numerator.truncate(exps);
        for (d, k) in &self.denominators {
            let inv = series_inverse(d, exps)?;
            for _ in 0..*k {
                acc = acc.mul_truncated(&inv, exps);
            }
        }
        acc.coeff(exps)
    }

    /// Coefficient of `variable^k` with every other variable at exponent 0.
    pub fn coeff_of(&self, variable: &str, k: u32) -> Result<BigInt> {
        let idx = self
            .numerator
            .var_index(variable)
            .ok_or_else(|| Error::OutOfRange(format!("unknown variable {variable}")))?;
        let mut e = vec![0; self.numerator.vars.len()];
        e[idx] = k;
        self.coeff(&e)
    }
}

/// Truncated power-series inverse of `d` on the box of exponents `<= orders`.
///
/// Coefficients are produced in lexicographic order of the box, which lists
/// every `α − β` before `α`, so the recurrence
/// `h_α = (δ_{α,0} − Σ_{β≠0} d_β h_{α−β}) / d_0` is well founded.
fn series_inverse(d: &ExactPoly, orders: &[u32]) -> Result<ExactPoly> {
    let d0 = d.constant_term();
    if d0.is_zero() {
        return Err(Error::DenominatorVanishesAtOrigin);
    }
    let dterms: Vec<(Vec<u32>, BigInt)> = d
        .truncate(orders)
        .terms
        .into_iter()
        .filter(|(e, _)| e.iter().any(|&x| x != 0))
        .collect();
    let mut h: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for alpha in box_iter(orders) {
        let mut num = if alpha.iter().all(|&x| x == 0) {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        for (beta, c) in &dterms {
            if beta.iter().zip(&alpha).all(|(b, a)| b <= a) {
                let rest: Vec<u32> = alpha.iter().zip(beta).map(|(a, b)| a - b).collect();
                if let Some(v) = h.get(&rest) {
                    num -= c * v;
                }
            }
        }
        let (q, r) = num.div_rem(&d0);
        if !r.is_zero() {
            return Err(Error::NonIntegralSeries);
        }
        if !q.is_zero() {
            h.insert(alpha, q);
        }
    }
    Ok(ExactPoly {
        vars: d.vars.clone(),
        terms: h,
    })
}

/// Lexicographic enumeration of all exponent vectors bounded by `orders`.
fn box_iter(orders: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    let total: usize = orders.iter().map(|&o| o as usize + 1).product();
    (0..total).map(move |mut idx| {
        let mut e = vec![0u32; orders.len()];
        for i in (0..orders.len()).rev() {
            let base = orders[i] as usize + 1;
            e[i] = (idx % base) as u32;
            idx /= base;
        }
        e
    })
}

/// Binomial coefficient `C(n, k)` as a big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient for possibly negative upper index (returns zero for
/// negative `n` or `k`, matching the combinatorial convention used by the
/// ED-degree formulas).
pub fn binomial_i(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st() -> [&'static str; 2] {
        ["s", "t"]
    }

    #[test]
    fn distributivity_example() {
        let v = st();
        let one = ExactPoly::one(&v);
        let s = ExactPoly::var(&v, "s");
        let t = ExactPoly::var(&v, "t");
        let p = &(&one + &s) * &(&one + &t);
        assert_eq!(p.num_terms(), 4);
        for e in [[0, 0], [1, 0], [0, 1], [1, 1]] {
            assert_eq!(p.coeff(&e).unwrap(), BigInt::one());
        }
        let sq = (&s + &t).pow(2);
        assert_eq!(sq.coeff(&[1, 1]).unwrap(), BigInt::from(2));
        assert_eq!(sq.coeff(&[2, 0]).unwrap(), BigInt::one());
        assert_eq!(sq.to_string(), "s^2 + 2*s*t + t^2");
    }

    fn segre_poly(m: u32, n: u32, k: u32) -> ExactPoly {
        let v = st();
        let one = ExactPoly::one(&v);
        let s = ExactPoly::var(&v, "s");
        let t = ExactPoly::var(&v, "t");
        &(&(&one + &s).pow(m) * &(&one + &t).pow(n)) * &(&s + &t).pow(k)
    }

    #[test]
    fn face_volume_coefficients() {
        assert_eq!(segre_poly(2, 2, 0).coeff(&[1, 1]).unwrap(), 4.into());
        assert_eq!(segre_poly(3, 3, 0).coeff(&[2, 2]).unwrap(), 9.into());
        assert_eq!(segre_poly(3, 3, 4).coeff(&[2, 2]).unwrap(), 6.into());
        assert_eq!(ExactPoly::zero(&st()).coeff(&[5, 1]).unwrap(), 0.into());
        assert!(matches!(
            segre_poly(1, 1, 1).coeff(&[1]),
            Err(Error::ExponentLength { .. })
        ));
    }

    #[test]
    fn univariate_series_coefficients() {
        let v = ["z"];
        let one = ExactPoly::one(&v);
        let z = ExactPoly::var(&v, "z");
        let num = (&one + &z).pow(4);
        let den = &one - &z.scale(&BigInt::from(2));
        let f = RationalSeries::new(num, vec![(den, 3)]).unwrap();
        assert_eq!(f.coeff_of("z", 1).unwrap(), 10.into());
        assert_eq!(f.coeff_of("z", 0).unwrap(), 1.into());
        for d in 2..=12u32 {
            let f = RationalSeries::new(
                (&one + &z).pow(d),
                vec![(&one - &z.scale(&BigInt::from(2)), d - 1)],
            )
            .unwrap();
            assert_eq!(f.coeff_of("z", 1).unwrap(), BigInt::from(3 * d - 2));
        }
    }

    #[test]
    fn bivariate_series_constant_term() {
        let v = ["t", "s"];
        let one = ExactPoly::one(&v);
        let t = ExactPoly::var(&v, "t");
        let s = ExactPoly::var(&v, "s");
        let two = BigInt::from(2);
        let num = (&(&one + &t).pow(2) * &(&one + &s).pow(2)).scale(&BigInt::from(4));
        let f = RationalSeries::new(
            num,
            vec![(&one + &t.scale(&two), 1), (&one + &s.scale(&two), 1)],
        )
        .unwrap();
        assert_eq!(f.coeff(&[0, 0]).unwrap(), 4.into());
    }

    #[test]
    fn vanishing_denominator_is_rejected() {
        let v = ["z"];
        let z = ExactPoly::var(&v, "z");
        let err = RationalSeries::new(ExactPoly::one(&v), vec![(z, 1)]).unwrap_err();
        assert_eq!(err.to_string(), "denominator vanishes at origin");
    }

    #[test]
    fn non_unit_constant_term_detects_fractions() {
        let v = ["z"];
        let one = ExactPoly::one(&v);
        let z = ExactPoly::var(&v, "z");
        let den = &ExactPoly::constant(&v, 2) + &z;
        let f = RationalSeries::new(one, vec![(den, 1)]).unwrap();
        assert!(matches!(f.coeff_of("z", 0), Err(Error::NonIntegralSeries)));
    }

    #[test]
    fn disjoint_variables_merge() {
        let a = ExactPoly::var(&["s"], "s");
        let b = ExactPoly::var(&["t"], "t");
        let p = &a * &b;
        assert_eq!(p.variables(), &["s".to_string(), "t".to_string()]);
        assert_eq!(p.coeff(&[1, 1]).unwrap(), BigInt::one());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120.into());
        assert_eq!(binomial(3, 5), 0.into());
        assert_eq!(binomial_i(-1, 0), 0.into());
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }
}

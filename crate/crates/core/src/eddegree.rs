//! Closed-form ED degrees: polar classes of the Segre variety, sectional ED
//! degrees of rank-one and corank-one matrices, Hankel secant varieties,
//! Sylvester matrices and the unit-weight correction term.
//!
//! All results are exact [`BigInt`]s. Inputs with `m > n` are transposed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chow;
use crate::error::{Error, Result};
use crate::polyarith::{binomial, binomial_i, ExactPoly, RationalSeries};

fn ordered(m: usize, n: usize) -> (usize, usize) {
    if m <= n {
        (m, n)
    } else {
        (n, m)
    }
}

/// Polar classes δ_0, …, δ_{m+n−2} of the Segre variety of `m × n` rank-one
/// matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarClassSequence {
    pub m: usize,
    pub n: usize,
    pub deltas: Vec<BigInt>,
}

impl PolarClassSequence {
    pub fn total(&self) -> BigInt {
        self.deltas.iter().sum()
    }

    /// δ_ℓ, zero outside the stored range.
    pub fn get(&self, l: usize) -> BigInt {
        self.deltas.get(l).cloned().unwrap_or_default()
    }
}

/// Volumes V_k: the coefficient of `s^{m−1} t^{n−1}` in
/// `(1+s)^m (1+t)^n (s+t)^k` for `k = 0..=m+n−2`.
pub fn segre_face_volumes(m: usize, n: usize) -> Vec<BigInt> {
    let (m, n) = ordered(m, n);
    assert!(m >= 1, "matrix format must be at least 1x1");
    let vars = ["s", "t"];
    let one = ExactPoly::one(&vars);
    let s = ExactPoly::var(&vars, "s");
    let t = ExactPoly::var(&vars, "t");
    let base = &(&one + &s).pow(m as u32) * &(&one + &t).pow(n as u32);
    let st = &s + &t;
    let target = [m as u32 - 1, n as u32 - 1];
    let mut out = Vec::with_capacity(m + n - 1);
    let mut cur = base;
    for _ in 0..(m + n - 1) {
        out.push(cur.coeff(&target).expect("two variables"));
        cur = cur.mul_truncated(&st, &target);
    }
    out
}

/// Polar classes from face volumes:
/// δ_ℓ = Σ_k (−1)^{m+n−k} C(k+1, ℓ+1) V_k.
pub fn segre_polar_classes(m: usize, n: usize) -> PolarClassSequence {
    let (m, n) = ordered(m, n);
    let v = segre_face_volumes(m, n);
    let top = m + n - 2;
    let deltas = (0..=top)
        .map(|l| {
            let mut acc = BigInt::zero();
            for (k, vk) in v.iter().enumerate().skip(l) {
                let term = binomial((k + 1) as u64, (l + 1) as u64) * vk;
                if (m + n - k) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
        .collect();
    PolarClassSequence { m, n, deltas }
}

fn check_codim(m: usize, n: usize, s: usize) -> Result<()> {
    if s > m * n - 1 {
        return Err(Error::OutOfRange(format!(
            "section codimension {s} exceeds {} for {m}x{n}",
            m * n - 1
        )));
    }
    Ok(())
}

/// Generic-weight ED degree of rank ≤ 1 matrices cut by `s` generic linear
/// equations: Σ_{ℓ≥s} δ_ℓ.
pub fn sectional_ed_rank1(m: usize, n: usize, s: usize) -> Result<BigInt> {
    check_codim(m, n, s)?;
    let p = segre_polar_classes(m, n);
    Ok(p.deltas.iter().skip(s).sum())
}

/// Generic-weight ED degree of corank ≥ 1 matrices cut by `s` generic linear
/// equations: δ_0 + … + δ_{mn−2−s}.
pub fn sectional_ed_corank1(m: usize, n: usize, s: usize) -> Result<BigInt> {
    check_codim(m, n, s)?;
    let p = segre_polar_classes(m, n);
    if s == m * n - 1 {
        return Ok(BigInt::zero());
    }
    let upto = m * n - 2 - s;
    Ok((0..=upto).map(|l| p.get(l)).sum())
}

/// Generic ED degree of Hankel matrices of rank ≤ r built from `d + 1`
/// coordinates, by the closed binomial sum.
pub fn hankel_ed_generic(d: usize, r: usize) -> Result<BigInt> {
    if 2 * r > d {
        return Err(Error::RankExceedsHankelFormat { d, r });
    }
    let (d, r) = (d as i64, r as i64);
    let mut acc = BigInt::zero();
    for i in 0..=r {
        acc += binomial_i(d + 1 - r, i) * binomial_i(d - r - i, r - i) * (BigInt::one() << (r - i));
    }
    Ok(acc)
}

/// Same value as [`hankel_ed_generic`], read off as the `z^r` coefficient of
/// `(1+z)^{d+1−r} / (1−2z)^{d−2r+1}`.
pub fn hankel_ed_series(d: usize, r: usize) -> Result<BigInt> {
    if 2 * r > d {
        return Err(Error::RankExceedsHankelFormat { d, r });
    }
    let vars = ["z"];
    let one = ExactPoly::one(&vars);
    let z = ExactPoly::var(&vars, "z");
    let num = (&one + &z).pow((d + 1 - r) as u32);
    let den = &one - &z.scale(&BigInt::from(2));
    let f = RationalSeries::new(num, vec![(den, (d - 2 * r + 1) as u32)])?;
    f.coeff_of("z", r as u32)
}

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    pub coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Smallest positive integer `D` with `D · p` integral, together with the
    /// integer coefficients of `D · p`.
    pub fn common_denominator(&self) -> (BigInt, Vec<BigInt>) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        (den, ints)
    }
}

impl std::fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (den, ints) = self.common_denominator();
        let mut parts = Vec::new();
        for (k, c) in ints.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            let body = match k {
                0 => a.to_string(),
                1 if a.is_one() => "d".to_string(),
                1 => format!("{a}d"),
                _ if a.is_one() => format!("d^{k}"),
                _ => format!("{a}d^{k}"),
            };
            parts.push((sign, body));
        }
        let mut s = String::new();
        for (i, (sign, body)) in parts.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            s.push_str(body);
        }
        if s.is_empty() {
            s.push('0');
        }
        if den.is_one() {
            write!(f, "{s}")
        } else {
            write!(f, "({s})/{den}")
        }
    }
}

/// The polynomial in `d` agreeing with `hankel_ed_generic(d, r)` for all
/// `d ≥ 2r`, by Lagrange interpolation at `d = 2r, …, 3r`.
pub fn hankel_ed_polynomial(r: usize) -> Result<RationalPoly> {
    if r == 0 {
        return Err(Error::OutOfRange("rank must be at least 1".into()));
    }
    let xs: Vec<i64> = (2 * r as i64..=3 * r as i64).collect();
    let ys: Vec<BigInt> = xs
        .iter()
        .map(|&d| hankel_ed_generic(d as usize, r))
        .collect::<Result<_>>()?;
    let mut coeffs = vec![BigRational::zero(); r + 1];
    for (i, &xi) in xs.iter().enumerate() {
        // basis polynomial Π_{j≠i} (d − x_j) / (x_i − x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * BigRational::from_integer(BigInt::from(xj));
            }
            basis = next;
            denom *= xi - xj;
        }
        let scale = BigRational::new(ys[i].clone(), denom);
        for (k, b) in basis.iter().enumerate() {
            coeffs[k] += b * &scale;
        }
    }
    Ok(RationalPoly { coeffs })
}

/// W_j: coefficient of `t^{m−2} s^{n−2}` in
/// `4 (1+t)^m (1+s)^n (t+s)^j / ((1+2t)(1+2s))`.
pub fn unit_weight_series_terms(m: usize, n: usize) -> Result<Vec<BigInt>> {
    let (m, n) = ordered(m, n);
    if m < 2 {
        return Err(Error::OutOfRange("unit-weight gap needs m, n >= 2".into()));
    }
    let vars = ["t", "s"];
    let one = ExactPoly::one(&vars);
    let t = ExactPoly::var(&vars, "t");
    let s = ExactPoly::var(&vars, "s");
    let two = BigInt::from(2);
    let base = (&(&one + &t).pow(m as u32) * &(&one + &s).pow(n as u32)).scale(&BigInt::from(4));
    let dens = vec![(&one + &t.scale(&two), 1), (&one + &s.scale(&two), 1)];
    let target = [m as u32 - 2, n as u32 - 2];
    let ts = &t + &s;
    let top = m + n - 4;
    (0..=top)
        .map(|j| {
            let num = &base * &ts.pow(j as u32);
            RationalSeries::new(num, dens.clone())?.coeff(&target)
        })
        .collect()
}

/// Correction term between the generic-weight and unit-weight ED degrees of
/// corank-one matrices under `s` generic linear equations.
///
/// The unit-weight value `generic − gap` rests on a conjectural formula; use
/// [`conjectured_unit_ed_corank1`] to get it with that label attached.
pub fn corank1_unit_gap(m: usize, n: usize, s: usize) -> Result<BigInt> {
    let (m, n) = ordered(m, n);
    let w = unit_weight_series_terms(m, n)?;
    let top = m + n - 4;
    let mut acc = BigInt::zero();
    for i in s..=top {
        for (j, wj) in w.iter().enumerate().skip(i) {
            let term = binomial((j + 1) as u64, (i + 1) as u64) * wj;
            if (top - j) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    Ok(acc)
}

/// A value that depends on an unproven formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjectured<T> {
    pub value: T,
    pub conjectural: bool,
}

/// Unit-weight ED degree of corank-one `m × n` matrices under `s` generic
/// linear equations, as predicted by the conjectured gap formula.
pub fn conjectured_unit_ed_corank1(m: usize, n: usize, s: usize) -> Result<Conjectured<BigInt>> {
    let generic = sectional_ed_corank1(m, n, s)?;
    let gap = corank1_unit_gap(m, n, s)?;
    Ok(Conjectured {
        value: generic - gap,
        conjectural: true,
    })
}

/// Generic ED degree of the Sylvester matrices `Syl_k` of two binary forms of
/// degrees `m ≤ n`.
pub fn sylvester_ed_generic(m: usize, n: usize, k: usize) -> Result<BigInt> {
    let (m, n) = ordered(m, n);
    if k < 1 || k > m {
        return Err(Error::OutOfRange(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    chow::ed_generic_determinantal(m - k + 2, n - m + 2 * k, 1, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionKind {
    Linear,
    Affine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Generic,
    Unit,
}

/// A sectional ED-degree question about `m × n` matrices of rank ≤ r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdDegreeQuery {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub section: SectionKind,
    pub weights: WeightKind,
}

impl EdDegreeQuery {
    fn validate(&self) -> Result<()> {
        let (m, n) = ordered(self.m, self.n);
        if self.r < 1 || self.r > m {
            return Err(Error::OutOfRange(format!("rank {} outside 1..={m}", self.r)));
        }
        check_codim(m, n, self.s)
    }
}

/// Generic-weight ED degree of a linear section, choosing the cheapest exact
/// method available.
fn linear_generic(m: usize, n: usize, r: usize, s: usize) -> Result<BigInt> {
    let (m, n) = ordered(m, n);
    if r == 1 {
        sectional_ed_rank1(m, n, s)
    } else if r + 1 == m {
        sectional_ed_corank1(m, n, s)
    } else {
        chow::ed_generic_determinantal(m, n, r, s)
    }
}

/// ED degree of an affine section: a generic affine section of codimension
/// `s ≥ 1` behaves like a generic linear section of codimension `s − 1`.
pub fn affine_section_ed(q: &EdDegreeQuery) -> Result<BigInt> {
    q.validate()?;
    if q.weights != WeightKind::Generic {
        return Err(Error::Unsupported(
            "affine sections are only supported for generic weights".into(),
        ));
    }
    let s = match q.section {
        SectionKind::Affine => q.s.saturating_sub(1),
        SectionKind::Linear => q.s,
    };
    linear_generic(q.m, q.n, q.r, s)
}

/// Answers any supported query; unit-weight answers are flagged conjectural.
pub fn ed_degree(q: &EdDegreeQuery) -> Result<Conjectured<BigInt>> {
    q.validate()?;
    match q.weights {
        WeightKind::Generic => Ok(Conjectured {
            value: affine_section_ed(q)?,
            conjectural: false,
        }),
        WeightKind::Unit => {
            let (m, _) = ordered(q.m, q.n);
            if q.section != SectionKind::Linear || q.r + 1 != m {
                return Err(Error::Unsupported(
                    "unit weights are only supported for linear sections of corank-one matrices"
                        .into(),
                ));
            }
            conjectured_unit_ed_corank1(q.m, q.n, q.s)
        }
    }
}

/// Codimension below which sectional ED degrees of rank ≤ r matrices do not
/// depend on `s`: r(r + n − m) with `m ≤ n`.
pub fn stabilization_bound(m: usize, n: usize, r: usize) -> usize {
    let (m, n) = ordered(m, n);
    r * (r + n - m)
}

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C = Complex64;

/// Sparse polynomial with complex floating coefficients in a fixed number of
/// variables.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<C>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, C::new(1.0, 0.0));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &C)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, e: Vec<u16>, c: C) {
        if c == C::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == C::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: impl Into<C>) -> Self {
        let c = c.into();
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Total degree, 0 for constants and the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Degree in the variables listed in `vars`.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|e| vars.iter().map(|&v| e[v] as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn diff(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c * e[i] as f64);
        }
        out
    }

    pub fn eval(&self, x: &[C]) -> C {
        let mut acc = C::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[v].powu(k as u32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Σ |c_t| |x^{α_t}|, the natural scale for judging `|eval(x)|`.
    pub fn abs_term_sum(&self, x: &[C]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.norm();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[v].norm().powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes polynomials (in a possibly different variable count) for
    /// every variable.
    pub fn compose(&self, subs: &[CPoly]) -> CPoly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map_or(0, |p| p.nvars);
        let mut out = CPoly::zero(nv);
        let mut cache: Vec<Vec<CPoly>> = vec![Vec::new(); self.nvars];
        for (e, c) in &self.terms {
            let mut t = CPoly::constant(nv, *c);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[v].len() <= k as usize {
                    let next = match cache[v].last() {
                        None => CPoly::constant(nv, 1.0),
                        Some(p) => p * &subs[v],
                    };
                    cache[v].push(next);
                }
                t = &t * &cache[v][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Determinant of a square matrix of polynomials by cofactor expansion.
    pub fn det(m: &[Vec<CPoly>]) -> CPoly {
        let n = m.len();
        assert!(n > 0 && m.iter().all(|r| r.len() == n));
        let nv = m[0][0].nvars;
        if n == 1 {
            return m[0][0].clone();
        }
        let mut out = CPoly::zero(nv);
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<CPoly>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect();
            let t = &m[0][j] * &CPoly::det(&minor);
            out = if j % 2 == 0 { &out + &t } else { &out - &t };
        }
        out
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        self + &(-rhs)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        self.scale(-1.0)
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Vec<u16>, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert(C::new(0.0, 0.0)) += ca * cb;
            }
        }
        acc.retain(|_, c| *c != C::new(0.0, 0.0));
        CPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

/// A polynomial flattened for fast repeated evaluation.
#[derive(Clone, Debug)]
struct Compiled {
    terms: Vec<(C, Vec<(u16, u16)>)>,
}

impl Compiled {
    fn new(p: &CPoly) -> Self {
        Compiled {
            terms: p
                .terms()
                .map(|(e, c)| {
                    let f = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(v, &k)| (v as u16, k))
                        .collect();
                    (*c, f)
                })
                .collect(),
        }
    }

    #[inline]
    fn eval(&self, pw: &Powers) -> C {
        let mut acc = C::new(0.0, 0.0);
        for (c, f) in &self.terms {
            let mut t = *c;
            for &(v, k) in f {
                t *= pw.get(v as usize, k as usize);
            }
            acc += t;
        }
        acc
    }
}

/// Table of x_v^k for k up to the maximal exponent.
struct Powers {
    stride: usize,
    data: Vec<C>,
}

impl Powers {
    fn new(x: &[C], maxdeg: usize) -> Self {
        let stride = maxdeg + 1;
        let mut data = vec![C::new(1.0, 0.0); x.len() * stride];
        for (v, xv) in x.iter().enumerate() {
            for k in 1..stride {
                data[v * stride + k] = data[v * stride + k - 1] * xv;
            }
        }
        Powers { stride, data }
    }

    #[inline]
    fn get(&self, v: usize, k: usize) -> C {
        self.data[v * self.stride + k]
    }
}

/// A list of polynomials with their Jacobian, compiled for evaluation.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    nvars: usize,
    maxdeg: usize,
    eqs: Vec<Compiled>,
    jac: Vec<Vec<Compiled>>,
}

impl CompiledSystem {
    pub fn new(polys: &[CPoly], nvars: usize) -> Self {
        let maxdeg = polys
            .iter()
            .flat_map(|p| p.terms().flat_map(|(e, _)| e.iter().copied()))
            .max()
            .unwrap_or(0) as usize;
        CompiledSystem {
            nvars,
            maxdeg,
            eqs: polys.iter().map(Compiled::new).collect(),
            jac: polys
                .iter()
                .map(|p| (0..nvars).map(|i| Compiled::new(&p.diff(i))).collect())
                .collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn neqs(&self) -> usize {
        self.eqs.len()
    }

    pub fn eval(&self, x: &[C], out: &mut [C]) {
        let pw = Powers::new(x, self.maxdeg);
        for (o, e) in out.iter_mut().zip(&self.eqs) {
            *o = e.eval(&pw);
        }
    }

    /// Values and row-major Jacobian in one pass.
    pub fn eval_jac(&self, x: &[C], f: &mut [C], jac: &mut [C]) {
        let pw = Powers::new(x, self.maxdeg);
        for (i, e) in self.eqs.iter().enumerate() {
            f[i] = e.eval(&pw);
            for (j, d) in self.jac[i].iter().enumerate() {
                jac[i * self.nvars + j] = d.eval(&pw);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn arithmetic_and_evaluation() {
        let x = CPoly::var(2, 0);
        let y = CPoly::var(2, 1);
        let p = &(&x * &y) + &x.pow(2);
        assert_eq!(p.eval(&[c(2.0), c(3.0)]), c(10.0));
        assert_eq!(p.degree(), 2);
        assert_eq!(p.degree_in(&[1]), 1);
        assert_eq!(p.diff(0).eval(&[c(2.0), c(3.0)]), c(7.0));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn determinant() {
        let v: Vec<CPoly> = (0..4).map(|i| CPoly::var(4, i)).collect();
        let d = CPoly::det(&[vec![v[0].clone(), v[1].clone()], vec![v[2].clone(), v[3].clone()]]);
        assert_eq!(d.eval(&[c(1.0), c(2.0), c(3.0), c(4.0)]), c(-2.0));
    }

    #[test]
    fn composition() {
        let x = CPoly::var(1, 0);
        let p = &x.pow(2) + &CPoly::constant(1, 1.0);
        let t = CPoly::var(2, 1);
        let q = p.compose(&[&t + &CPoly::constant(2, 1.0)]);
        assert_eq!(q.eval(&[c(0.0), c(2.0)]), c(10.0));
    }

    #[test]
    fn compiled_matches_direct() {
        let x = CPoly::var(3, 0);
        let y = CPoly::var(3, 1);
        let z = CPoly::var(3, 2);
        let polys = vec![&(&x * &y.pow(3)) - &z, &z.pow(2) + &x.scale(C::new(0.0, 2.0))];
        let sys = CompiledSystem::new(&polys, 3);
        let pt = [C::new(0.3, -1.0), C::new(1.2, 0.5), C::new(-0.7, 0.1)];
        let mut f = vec![C::new(0.0, 0.0); 2];
        let mut j = vec![C::new(0.0, 0.0); 6];
        sys.eval_jac(&pt, &mut f, &mut j);
        for i in 0..2 {
            assert!((f[i] - polys[i].eval(&pt)).norm() < 1e-12);
            for v in 0..3 {
                assert!((j[i * 3 + v] - polys[i].diff(v).eval(&pt)).norm() < 1e-12);
            }
        }
    }
}

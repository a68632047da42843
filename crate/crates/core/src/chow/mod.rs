//! Intersection theory on Grassmannians and projective bundles over them,
//! enough to evaluate generic ED degrees of determinantal varieties through
//! their Chern classes.
//!
//! A class on the projective bundle `P(E) → Gr` is stored as a polynomial in
//! the hyperplane class ζ of degree `< rank E`, with coefficients in the
//! Schubert basis of the Grassmannian. The plain Grassmannian is the case
//! without ζ.

mod grassmannian;
mod partition;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use grassmannian::SchubertBasis;
pub use partition::Partition;

use crate::error::{Error, Result};
use crate::polyarith::binomial;

static NEXT_RING_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug)]
struct BundleData {
    /// rank of E
    e: usize,
    /// c_0(E), …, c_e(E) as Grassmannian classes
    chern: Vec<Vec<BigInt>>,
}

/// Chow ring of a Grassmannian, optionally extended by the hyperplane class of
/// a projective bundle.
#[derive(Clone, Debug)]
pub struct ChowRing {
    id: u64,
    base: Arc<SchubertBasis>,
    bundle: Option<BundleData>,
}

/// Element of a [`ChowRing`]: `terms[k][λ]` is the coefficient of ζ^k σ_λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowClass {
    ring: u64,
    terms: Vec<Vec<BigInt>>,
}

/// A vector bundle recorded by its rank and total Chern class.
#[derive(Clone, Debug)]
pub struct BundleExpr {
    pub rank: usize,
    pub chern: ChowClass,
}

impl ChowRing {
    /// Grassmannian of `r`-dimensional subspaces of an `m`-dimensional space.
    pub fn grassmannian(r: usize, m: usize) -> Result<Self> {
        if r > m {
            return Err(Error::OutOfRange(format!("Gr({r},{m}) is empty")));
        }
        Ok(ChowRing {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            base: Arc::new(SchubertBasis::new(r, m)),
            bundle: None,
        })
    }

    pub fn schubert(&self) -> &SchubertBasis {
        &self.base
    }

    /// Number of ζ powers carried per class.
    fn fiber_len(&self) -> usize {
        self.bundle.as_ref().map_or(1, |b| b.e)
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.fiber_len() - 1
    }

    pub fn zero(&self) -> ChowClass {
        ChowClass {
            ring: self.id,
            terms: vec![vec![BigInt::zero(); self.base.len()]; self.fiber_len()],
        }
    }

    pub fn one(&self) -> ChowClass {
        let mut c = self.zero();
        c.terms[0][self.base.index_of(&Partition::empty()).unwrap()] = BigInt::one();
        c
    }

    pub fn constant(&self, k: impl Into<BigInt>) -> ChowClass {
        self.scale(&self.one(), &k.into())
    }

    /// Schubert class σ_λ; zero when λ leaves the box.
    pub fn sigma(&self, lambda: &Partition) -> ChowClass {
        let mut c = self.zero();
        if let Some(i) = self.base.index_of(lambda) {
            c.terms[0][i] = BigInt::one();
        }
        c
    }

    /// The hyperplane class ζ of the projective bundle.
    pub fn zeta(&self) -> Result<ChowClass> {
        let b = self
            .bundle
            .as_ref()
            .ok_or_else(|| Error::Unsupported("ring has no hyperplane class".into()))?;
        if b.e == 1 {
            // ζ = −c_1(E) when E is a line bundle
            let mut c = self.zero();
            c.terms[0] = b.chern[1].iter().map(|x| -x).collect();
            return Ok(c);
        }
        let mut c = self.zero();
        c.terms[1][self.base.index_of(&Partition::empty()).unwrap()] = BigInt::one();
        Ok(c)
    }

    fn check(&self, a: &ChowClass) -> Result<()> {
        if a.ring != self.id {
            return Err(Error::RingMismatch(format!(
                "class belongs to ring {}, not {}",
                a.ring, self.id
            )));
        }
        Ok(())
    }

    pub fn add(&self, a: &ChowClass, b: &ChowClass) -> Result<ChowClass> {
        self.check(a)?;
        self.check(b)?;
        let mut out = a.clone();
        for (ro, rb) in out.terms.iter_mut().zip(&b.terms) {
            for (x, y) in ro.iter_mut().zip(rb) {
                *x += y;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, a: &ChowClass, b: &ChowClass) -> Result<ChowClass> {
        self.add(a, &self.scale(b, &BigInt::from(-1)))
    }

    pub fn scale(&self, a: &ChowClass, k: &BigInt) -> ChowClass {
        ChowClass {
            ring: a.ring,
            terms: a
                .terms
                .iter()
                .map(|row| row.iter().map(|x| x * k).collect())
                .collect(),
        }
    }

    fn gr_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.base.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in self.base.product(i, j) {
                    out[*k] += c * &xy;
                }
            }
        }
        out
    }

    /// Product in the ring. Powers of ζ at or above the bundle rank are
    /// reduced with Σ_i c_i(E) ζ^{e−i} = 0.
    pub fn multiply(&self, a: &ChowClass, b: &ChowClass) -> Result<ChowClass> {
        self.check(a)?;
        self.check(b)?;
        let f = self.fiber_len();
        let nb = self.base.len();
        let mut raw = vec![vec![BigInt::zero(); nb]; 2 * f - 1];
        for (i, ra) in a.terms.iter().enumerate() {
            if ra.iter().all(|x| x.is_zero()) {
                continue;
            }
            for (j, rb) in b.terms.iter().enumerate() {
                if rb.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let p = self.gr_mul(ra, rb);
                for (t, v) in raw[i + j].iter_mut().zip(p) {
                    *t += v;
                }
            }
        }
        if let Some(bd) = &self.bundle {
            for k in (f..raw.len()).rev() {
                let top = std::mem::replace(&mut raw[k], vec![BigInt::zero(); nb]);
                if top.iter().all(|x| x.is_zero()) {
                    continue;
                }
                // ζ^k = −Σ_{i≥1} c_i(E) ζ^{k−i}
                for i in 1..=bd.e {
                    let p = self.gr_mul(&top, &bd.chern[i]);
                    for (t, v) in raw[k - i].iter_mut().zip(p) {
                        *t -= v;
                    }
                }
            }
            raw.truncate(f);
        }
        Ok(ChowClass {
            ring: self.id,
            terms: raw,
        })
    }

    pub fn pow(&self, a: &ChowClass, k: usize) -> Result<ChowClass> {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.multiply(&acc, a)?;
        }
        Ok(acc)
    }

    /// Degree of a class: the coefficient of the point class.
    pub fn integral(&self, a: &ChowClass) -> Result<BigInt> {
        self.check(a)?;
        let top = self.base.top_index();
        Ok(a.terms[self.fiber_len() - 1][top].clone())
    }

    /// The homogeneous part of codimension `k`.
    pub fn degree_part(&self, a: &ChowClass, k: usize) -> ChowClass {
        let mut out = self.zero();
        for (z, row) in a.terms.iter().enumerate() {
            for (i, x) in row.iter().enumerate() {
                if z + self.base.degree(i) == k {
                    out.terms[z][i] = x.clone();
                }
            }
        }
        out
    }

    /// Universal subbundle S of rank r: c(S) = 1 / c(Q).
    pub fn tautological_sub(&self) -> BundleExpr {
        let q = self.tautological_quotient();
        BundleExpr {
            rank: self.base.r,
            chern: self.invert_total(&q.chern).expect("total Chern class is invertible"),
        }
    }

    /// Universal quotient bundle Q of rank m − r: c(Q) = 1 + σ_1 + … + σ_{m−r}.
    pub fn tautological_quotient(&self) -> BundleExpr {
        let q = self.base.m - self.base.r;
        let mut c = self.one();
        for k in 1..=q {
            c = self.add(&c, &self.sigma(&Partition::new(vec![k]))).unwrap();
        }
        BundleExpr { rank: q, chern: c }
    }

    /// Trivial bundle of the given rank.
    pub fn trivial(&self, rank: usize) -> BundleExpr {
        BundleExpr {
            rank,
            chern: self.one(),
        }
    }

    /// Line bundle with first Chern class `c1`.
    pub fn line_bundle(&self, c1: &ChowClass) -> Result<BundleExpr> {
        Ok(BundleExpr {
            rank: 1,
            chern: self.add(&self.one(), c1)?,
        })
    }

    /// Inverse of a class with constant term 1.
    pub fn invert_total(&self, c: &ChowClass) -> Result<ChowClass> {
        self.check(c)?;
        let x = self.sub(&self.one(), c)?;
        // 1/(1 − x) = Σ x^k, and x is nilpotent beyond the dimension
        let mut acc = self.one();
        let mut pw = self.one();
        for _ in 0..self.dim() {
            pw = self.multiply(&pw, &x)?;
            acc = self.add(&acc, &pw)?;
        }
        Ok(acc)
    }

    pub fn direct_sum(&self, a: &BundleExpr, b: &BundleExpr) -> Result<BundleExpr> {
        Ok(BundleExpr {
            rank: a.rank + b.rank,
            chern: self.multiply(&a.chern, &b.chern)?,
        })
    }

    /// Chern class of a virtual difference `a − b`.
    pub fn difference(&self, a: &BundleExpr, b: &BundleExpr) -> Result<BundleExpr> {
        if b.rank > a.rank {
            return Err(Error::OutOfRange("negative rank".into()));
        }
        Ok(BundleExpr {
            rank: a.rank - b.rank,
            chern: self.multiply(&a.chern, &self.invert_total(&b.chern)?)?,
        })
    }

    pub fn dual(&self, a: &BundleExpr) -> BundleExpr {
        let mut chern = self.zero();
        for k in 0..=self.dim() {
            let part = self.degree_part(&a.chern, k);
            let sign = if k % 2 == 0 { 1 } else { -1 };
            chern = self.add(&chern, &self.scale(&part, &BigInt::from(sign))).unwrap();
        }
        BundleExpr {
            rank: a.rank,
            chern,
        }
    }

    /// Newton power sums p_1..p_top of the Chern roots (p_0 is the rank).
    fn power_sums(&self, a: &BundleExpr) -> Result<Vec<ChowClass>> {
        let top = self.dim();
        let e: Vec<ChowClass> = (0..=top).map(|k| self.degree_part(&a.chern, k)).collect();
        let mut p = vec![self.constant(a.rank as i64)];
        for k in 1..=top {
            // p_k = Σ_{i=1}^{k−1} (−1)^{i−1} e_i p_{k−i} + (−1)^{k−1} k e_k
            let mut acc = self.scale(&e[k], &BigInt::from(if k % 2 == 1 { k as i64 } else { -(k as i64) }));
            for i in 1..k {
                let t = self.multiply(&e[i], &p[k - i])?;
                acc = if i % 2 == 1 { self.add(&acc, &t)? } else { self.sub(&acc, &t)? };
            }
            p.push(acc);
        }
        Ok(p)
    }

    /// Chern classes from power sums, dividing exactly by k at each step.
    fn from_power_sums(&self, rank: usize, p: &[ChowClass]) -> Result<BundleExpr> {
        let top = self.dim();
        let mut e = vec![self.one()];
        for k in 1..=top {
            // k e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} p_i
            let mut acc = self.zero();
            for i in 1..=k {
                let t = self.multiply(&e[k - i], &p[i])?;
                acc = if i % 2 == 1 { self.add(&acc, &t)? } else { self.sub(&acc, &t)? };
            }
            let kk = BigInt::from(k);
            for row in acc.terms.iter_mut() {
                for x in row.iter_mut() {
                    let (q, r) = x.div_rem(&kk);
                    if !r.is_zero() {
                        return Err(Error::NonIntegralSeries);
                    }
                    *x = q;
                }
            }
            e.push(acc);
        }
        let mut chern = self.zero();
        for c in &e {
            chern = self.add(&chern, c)?;
        }
        Ok(BundleExpr { rank, chern })
    }

    /// Tensor product, via p_k(A⊗B) = Σ_l C(k,l) p_l(A) p_{k−l}(B).
    pub fn tensor(&self, a: &BundleExpr, b: &BundleExpr) -> Result<BundleExpr> {
        self.check(&a.chern)?;
        self.check(&b.chern)?;
        let pa = self.power_sums(a)?;
        let pb = self.power_sums(b)?;
        let top = self.dim();
        let mut p = vec![self.constant((a.rank * b.rank) as i64)];
        for k in 1..=top {
            let mut acc = self.zero();
            for l in 0..=k {
                let t = self.multiply(&pa[l], &pb[k - l])?;
                acc = self.add(&acc, &self.scale(&t, &binomial(k as u64, l as u64)))?;
            }
            p.push(acc);
        }
        self.from_power_sums(a.rank * b.rank, &p)
    }

    /// Lifts a class from the Grassmannian to a projective bundle over it.
    pub fn pullback(&self, base: &ChowRing, a: &ChowClass) -> Result<ChowClass> {
        base.check(a)?;
        if base.bundle.is_some() || !Arc::ptr_eq(&base.base, &self.base) {
            return Err(Error::RingMismatch("pullback needs the underlying Grassmannian".into()));
        }
        let mut out = self.zero();
        out.terms[0] = a.terms[0].clone();
        Ok(out)
    }

    pub fn pullback_bundle(&self, base: &ChowRing, a: &BundleExpr) -> Result<BundleExpr> {
        Ok(BundleExpr {
            rank: a.rank,
            chern: self.pullback(base, &a.chern)?,
        })
    }

    /// Tangent bundle of a Grassmannian: Hom(S, Q) = S^∨ ⊗ Q.
    pub fn grassmannian_tangent(&self) -> Result<BundleExpr> {
        let s = self.tautological_sub();
        let q = self.tautological_quotient();
        self.tensor(&self.dual(&s), &q)
    }
}

/// Projectivization P(E) of lines in a bundle `E` over a Grassmannian, with ζ
/// the first Chern class of O(1), the dual of the tautological line.
pub fn projective_bundle(base: &ChowRing, e: &BundleExpr) -> Result<ChowRing> {
    base.check(&e.chern)?;
    if base.bundle.is_some() {
        return Err(Error::Unsupported("iterated projective bundles".into()));
    }
    if e.rank == 0 {
        return Err(Error::OutOfRange("bundle rank must be positive".into()));
    }
    let chern: Vec<Vec<BigInt>> = (0..=e.rank)
        .map(|k| base.degree_part(&e.chern, k).terms[0].clone())
        .collect();
    Ok(ChowRing {
        id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
        base: base.base.clone(),
        bundle: Some(BundleData { e: e.rank, chern }),
    })
}

/// Tangent bundle of `x = P(E)` over `base`:
/// c(T) = c(T_Gr) · c(E ⊗ O(1)), using the relative Euler sequence.
pub fn tangent_chern(base: &ChowRing, x: &ChowRing) -> Result<BundleExpr> {
    let bd = x
        .bundle
        .as_ref()
        .ok_or_else(|| Error::Unsupported("not a projective bundle".into()))?;
    let tgr = x.pullback_bundle(base, &base.grassmannian_tangent()?)?;
    let zeta = x.zeta()?;
    let one_plus_zeta = x.add(&x.one(), &zeta)?;
    // c(E ⊗ O(1)) = Σ_i c_i(E) (1 + ζ)^{e−i}
    let mut rel = x.zero();
    for (i, ci) in bd.chern.iter().enumerate() {
        let mut lift = x.zero();
        lift.terms[0] = ci.clone();
        let t = x.multiply(&lift, &x.pow(&one_plus_zeta, bd.e - i)?)?;
        rel = x.add(&rel, &t)?;
    }
    Ok(BundleExpr {
        rank: tgr.rank + bd.e - 1,
        chern: x.multiply(&tgr.chern, &rel)?,
    })
}

/// The desingularization of `m × n` matrices of rank ≤ r as P(S^{⊕n}) over
/// Gr(r, m), with its tangent bundle.
///
/// Formats with `m > n` are transposed first: the Chern-class formula only
/// yields ED degrees when the Grassmannian lives on the shorter side.
pub struct DeterminantalModel {
    pub base: ChowRing,
    pub space: ChowRing,
    pub tangent: BundleExpr,
}

impl DeterminantalModel {
    pub fn new(m: usize, n: usize, r: usize) -> Result<Self> {
        let (m, n) = (m.min(n), m.max(n));
        if r < 1 || r > m.min(n) {
            return Err(Error::OutOfRange(format!(
                "rank {r} outside 1..={} for {m}x{n}",
                m.min(n)
            )));
        }
        let base = ChowRing::grassmannian(r, m)?;
        let s = base.tautological_sub();
        let mut e = base.trivial(0);
        for _ in 0..n {
            e = base.direct_sum(&e, &s)?;
        }
        let space = projective_bundle(&base, &e)?;
        let tangent = tangent_chern(&base, &space)?;
        Ok(DeterminantalModel {
            base,
            space,
            tangent,
        })
    }

    /// ∫ c_{d−j}(T) ζ^j for j = 0..=d.
    pub fn chern_zeta_degrees(&self) -> Result<Vec<BigInt>> {
        let x = &self.space;
        let d = x.dim();
        let zeta = x.zeta()?;
        let mut out = Vec::with_capacity(d + 1);
        let mut zp = x.one();
        for j in 0..=d {
            let c = x.degree_part(&self.tangent.chern, d - j);
            out.push(x.integral(&x.multiply(&c, &zp)?)?);
            zp = x.multiply(&zp, &zeta)?;
        }
        Ok(out)
    }

    /// Sectional ED degree for a generic linear section of codimension `s`.
    pub fn sectional_ed(&self, m: usize, n: usize, s: usize) -> Result<BigInt> {
        if s + 1 >= m * n {
            return Ok(BigInt::zero());
        }
        let deg = self.chern_zeta_degrees()?;
        let d = deg.len() - 1;
        let mut acc = BigInt::zero();
        for i in s..=(m * n - 2) {
            for (j, v) in deg.iter().enumerate().skip(i) {
                let t = binomial((j + 1) as u64, (i + 1) as u64) * v;
                if (d - j) % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
        }
        Ok(acc)
    }
}

/// Generic ED degree of `m × n` matrices of rank ≤ r under a generic linear
/// section of codimension `s`.
pub fn ed_generic_determinantal(m: usize, n: usize, r: usize, s: usize) -> Result<BigInt> {
    if s > m * n - 1 {
        return Err(Error::OutOfRange(format!("codimension {s} exceeds {}", m * n - 1)));
    }
    DeterminantalModel::new(m, n, r)?.sectional_ed(m, n, s)
}

/// All sectional ED degrees s = 0..=mn−1 from one Chern class computation.
pub fn ed_generic_determinantal_all(m: usize, n: usize, r: usize) -> Result<Vec<BigInt>> {
    let model = DeterminantalModel::new(m, n, r)?;
    (0..m * n).map(|s| model.sectional_ed(m, n, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn degree_of_gr24() {
        let g = ChowRing::grassmannian(2, 4).unwrap();
        let s1 = g.sigma(&Partition::new(vec![1]));
        assert_eq!(g.integral(&g.pow(&s1, 4).unwrap()).unwrap(), 2.into());
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = ChowRing::grassmannian(1, 2).unwrap();
        let b = ChowRing::grassmannian(1, 2).unwrap();
        assert!(matches!(
            a.multiply(&a.one(), &b.one()),
            Err(Error::RingMismatch(_))
        ));
    }

    #[test]
    fn projective_space_over_a_point() {
        let pt = ChowRing::grassmannian(0, 0).unwrap();
        for n in 1..6 {
            let x = projective_bundle(&pt, &pt.trivial(n + 1)).unwrap();
            assert_eq!(x.dim(), n);
            let z = x.zeta().unwrap();
            assert_eq!(x.integral(&x.pow(&z, n).unwrap()).unwrap(), BigInt::one());
            assert!(x.pow(&z, n + 1).unwrap() == x.zero());
            // c(T) = (1+ζ)^{n+1}
            let t = tangent_chern(&pt, &x).unwrap();
            let top = x.degree_part(&t.chern, n);
            assert_eq!(x.integral(&top).unwrap(), BigInt::from(n + 1));
        }
    }

    #[test]
    fn tangent_of_grassmannian_has_euler_characteristic() {
        // χ(Gr(r,m)) = C(m,r)
        for m in 2..6 {
            for r in 1..m {
                let g = ChowRing::grassmannian(r, m).unwrap();
                let t = g.grassmannian_tangent().unwrap();
                let top = g.degree_part(&t.chern, g.dim());
                assert_eq!(g.integral(&top).unwrap(), binomial(m as u64, r as u64));
            }
        }
    }

    #[test]
    fn tensor_with_line_bundle_matches_closed_form() {
        let base = ChowRing::grassmannian(2, 4).unwrap();
        let s = base.tautological_sub();
        let e = base.direct_sum(&s, &s).unwrap();
        let x = projective_bundle(&base, &e).unwrap();
        let el = x.pullback_bundle(&base, &e).unwrap();
        let l = x.line_bundle(&x.zeta().unwrap()).unwrap();
        let via_tensor = x.tensor(&el, &l).unwrap();
        // relation: the top Chern class of E ⊗ O(1) vanishes
        let top = x.degree_part(&via_tensor.chern, 4);
        assert!(top == x.zero());
    }

    #[test]
    fn dimensions() {
        let m = DeterminantalModel::new(3, 3, 1).unwrap();
        assert_eq!(m.space.dim(), 4);
        let m = DeterminantalModel::new(4, 4, 2).unwrap();
        assert_eq!(m.space.dim(), 11);
    }

    #[test]
    fn chern_degrees_of_segre() {
        let model = DeterminantalModel::new(3, 3, 1).unwrap();
        let deg = model.chern_zeta_degrees().unwrap();
        assert_eq!(deg, ints(&[9, 18, 24, 18, 6]));
    }

    #[test]
    fn generic_ed_values() {
        assert_eq!(ed_generic_determinantal(3, 3, 1, 0).unwrap(), 39.into());
        assert_eq!(
            ed_generic_determinantal_all(4, 4, 2).unwrap()[..12],
            ints(&[1350, 1350, 1350, 1350, 1330, 1250, 1074, 818, 532, 276, 100, 20])[..]
        );
        assert_eq!(ed_generic_determinantal(3, 4, 2, 6).unwrap(), 73.into());
        assert_eq!(ed_generic_determinantal(3, 5, 2, 11).unwrap(), 10.into());
    }
}

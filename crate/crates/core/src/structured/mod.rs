//! Problem instances: data matrix, weights, linear sections and the
//! structured families (dense, Hankel, catalecticant, Sylvester).

mod rational;

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
#[cfg(test)]
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use rational::Rat;

use crate::error::{Error, Result};
use crate::polyarith::binomial;

pub type RatMatrix = Vec<Vec<Rat>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dense,
    Hankel,
    Catalecticant,
    Sylvester,
}

/// Which of the named weight matrices to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Euclidean metric on the structural coordinates.
    Omega,
    Ones,
    /// Metric invariant under rotations (symmetric-tensor norm).
    Theta,
}

impl std::str::FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(WeightKind::Omega),
            "ones" | "one" | "unit" => Ok(WeightKind::Ones),
            "theta" => Ok(WeightKind::Theta),
            _ => Err(Error::Parse(format!("unknown weight kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionKind {
    Linear,
    Affine,
}

/// Positive weights, one per matrix position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightMatrix(pub RatMatrix);

impl WeightMatrix {
    pub fn new(rows: RatMatrix) -> Result<Self> {
        if rows.iter().flatten().any(|w| !w.is_positive()) {
            return Err(Error::InvalidInstance("weights must be positive".into()));
        }
        Ok(WeightMatrix(rows))
    }

    pub fn ones(m: usize, n: usize) -> Self {
        WeightMatrix(vec![vec![Rat::one(); n]; m])
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn cols(&self) -> usize {
        self.0.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.0[i][j]
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.0.iter().map(|r| r.iter().map(Rat::to_f64).collect()).collect()
    }
}

/// One equation `Σ coeffs[i][j] x_ij + constant = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: RatMatrix,
    pub constant: Rat,
}

impl LinearConstraint {
    pub fn new(coeffs: RatMatrix, constant: Rat) -> Result<Self> {
        if coeffs.iter().flatten().all(Rat::is_zero) {
            return Err(Error::InvalidInstance("constraint has no nonzero coefficient".into()));
        }
        Ok(LinearConstraint { coeffs, constant })
    }

    pub fn is_affine(&self) -> bool {
        !self.constant.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SylvesterParams {
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hankel_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sylvester: Option<SylvesterParams>,
}

/// A weighted structured low-rank approximation problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub family: Family,
    #[serde(rename = "U")]
    pub u: RatMatrix,
    pub weights: WeightMatrix,
    #[serde(default)]
    pub constraints: Vec<LinearConstraint>,
    #[serde(default)]
    pub params: Params,
}

/// Linear pattern of a structured family: which coordinate sits at each
/// matrix position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub rows: usize,
    pub cols: usize,
    pub ncoords: usize,
    pub map: Vec<Vec<Option<usize>>>,
    pub labels: Vec<String>,
}

impl Structure {
    pub fn dense(m: usize, n: usize) -> Self {
        Structure {
            rows: m,
            cols: n,
            ncoords: m * n,
            map: (0..m).map(|i| (0..n).map(|j| Some(i * n + j)).collect()).collect(),
            labels: (0..m)
                .flat_map(|i| (0..n).map(move |j| format!("x{}{}", i + 1, j + 1)))
                .collect(),
        }
    }

    /// Hankel matrix of order `n`: coordinate `i + j` (0-based) at (i, j),
    /// square for odd `n`, one column wider for even `n`.
    pub fn hankel(order: usize) -> Result<Self> {
        if order < 3 {
            return Err(Error::OutOfRange(format!("Hankel order {order} < 3")));
        }
        let (p, q) = hankel_format(order);
        Ok(Structure {
            rows: p,
            cols: q,
            ncoords: order,
            map: (0..p).map(|i| (0..q).map(|j| Some(i + j)).collect()).collect(),
            labels: (0..order).map(|k| format!("x{k}")).collect(),
        })
    }

    /// 6×6 catalecticant of ternary quartics; rows and columns are indexed by
    /// the quadratic monomials and entry (α, β) holds coordinate α + β.
    pub fn catalecticant() -> Self {
        let quad = quadratic_monomials();
        let quart = quartic_monomials();
        let idx: BTreeMap<[usize; 3], usize> =
            quart.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let map = quad
            .iter()
            .map(|a| {
                quad.iter()
                    .map(|b| Some(idx[&[a[0] + b[0], a[1] + b[1], a[2] + b[2]]]))
                    .collect()
            })
            .collect();
        Structure {
            rows: 6,
            cols: 6,
            ncoords: 15,
            map,
            labels: quart.iter().map(|e| format!("x{}{}{}", e[0], e[1], e[2])).collect(),
        }
    }

    /// Sylvester matrix `Syl_k` of forms of degrees `m ≤ n`: `n + k` rows,
    /// then `n − m + k` shifted columns of a_0..a_m followed by `k` shifted
    /// columns of b_0..b_n. Coordinates are a_0..a_m, b_0..b_n.
    pub fn sylvester(m: usize, n: usize, k: usize) -> Result<Self> {
        if !(1 <= k && k <= m && m <= n) {
            return Err(Error::OutOfRange(format!("need 1 <= k <= m <= n, got ({m},{n},{k})")));
        }
        let rows = n + k;
        let acols = n - m + k;
        let cols = acols + k;
        let mut map = vec![vec![None; cols]; rows];
        for (j, col) in (0..acols).enumerate() {
            for i in 0..=m {
                map[i + j][col] = Some(i);
            }
        }
        for j in 0..k {
            for i in 0..=n {
                map[i + j][acols + j] = Some(m + 1 + i);
            }
        }
        let labels = (0..=m)
            .map(|i| format!("a{i}"))
            .chain((0..=n).map(|i| format!("b{i}")))
            .collect();
        Ok(Structure {
            rows,
            cols,
            ncoords: m + n + 2,
            map,
            labels,
        })
    }

    pub fn positions(&self, k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.map.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if *c == Some(k) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn multiplicity(&self, k: usize) -> usize {
        self.positions(k).len()
    }

    /// Places coordinate values into the matrix pattern, `zero` elsewhere.
    pub fn to_matrix<T: Clone>(&self, coords: &[T], zero: T) -> Vec<Vec<T>> {
        self.map
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.map_or_else(|| zero.clone(), |k| coords[k].clone()))
                    .collect()
            })
            .collect()
    }
}

/// Matrix format of the Hankel matrix of order `n`.
pub fn hankel_format(order: usize) -> (usize, usize) {
    if order % 2 == 1 {
        ((order + 1) / 2, (order + 1) / 2)
    } else {
        (order / 2, order / 2 + 1)
    }
}

/// Exponent vectors of the quadratic monomials in s, t, u.
pub fn quadratic_monomials() -> Vec<[usize; 3]> {
    vec![[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]
}

/// Exponent vectors of the 15 quartic monomials, lexicographically descending.
pub fn quartic_monomials() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in (0..=4).rev() {
        for j in (0..=4 - i).rev() {
            out.push([i, j, 4 - i - j]);
        }
    }
    out
}

fn multinomial4(e: &[usize; 3]) -> u64 {
    let f = |k: usize| (1..=k as u64).product::<u64>();
    24 / (f(e[0]) * f(e[1]) * f(e[2]))
}

/// Index map of the Hankel matrix of order `n`.
pub fn hankel_structure(order: usize) -> Result<Structure> {
    Structure::hankel(order)
}

/// Named weight matrices for Hankel matrices of order `n`.
pub fn hankel_weights(order: usize, kind: WeightKind) -> Result<WeightMatrix> {
    let st = Structure::hankel(order)?;
    let rows = (0..st.rows)
        .map(|i| {
            (0..st.cols)
                .map(|j| {
                    // 1-based i + j − 1 and n − i − j + 2 in 0-based form
                    let s = i + j;
                    let mult = (s + 1).min(order - s) as i64;
                    match kind {
                        WeightKind::Ones => Rat::one(),
                        WeightKind::Omega => Rat::new(1, mult),
                        WeightKind::Theta => Rat(BigRational::new(
                            binomial((order - 1) as u64, s as u64),
                            BigInt::from(mult),
                        )),
                    }
                })
                .collect()
        })
        .collect();
    WeightMatrix::new(rows)
}

/// Weight matrices on the Sylvester pattern; off-pattern positions get 1.
pub fn sylvester_weights(m: usize, n: usize, k: usize, kind: WeightKind) -> Result<WeightMatrix> {
    let st = Structure::sylvester(m, n, k)?;
    let acols = (n - m + k) as i64;
    let bcols = k as i64;
    let coord_weight = |c: usize| -> Rat {
        match kind {
            WeightKind::Ones => Rat::one(),
            WeightKind::Omega => {
                if c <= m {
                    Rat::new(1, acols)
                } else {
                    Rat::new(1, bcols)
                }
            }
            WeightKind::Theta => {
                if c <= m {
                    Rat(BigRational::new(
                        BigInt::one(),
                        BigInt::from(acols) * binomial(m as u64, c as u64),
                    ))
                } else {
                    Rat(BigRational::new(
                        BigInt::one(),
                        BigInt::from(bcols) * binomial(n as u64, (c - m - 1) as u64),
                    ))
                }
            }
        }
    };
    let rows = st
        .map
        .iter()
        .map(|row| row.iter().map(|c| c.map_or_else(Rat::one, coord_weight)).collect())
        .collect();
    WeightMatrix::new(rows)
}

/// The rotation-invariant weights on the 6×6 catalecticant: the multinomial
/// coefficient of α + β divided by how often it occurs in the matrix.
pub fn catalecticant_weights() -> WeightMatrix {
    let st = Structure::catalecticant();
    let quart = quartic_monomials();
    let rows = st
        .map
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let k = c.unwrap();
                    Rat::new(multinomial4(&quart[k]) as i64, st.multiplicity(k) as i64)
                })
                .collect()
        })
        .collect();
    WeightMatrix::new(rows).expect("positive weights")
}

/// Rank-2 catalecticant problem from the 15 quartic coefficients keyed by
/// exponent labels such as `"400"` or `"u211"`.
pub fn catalecticant_instance(data: &BTreeMap<String, Rat>) -> Result<Instance> {
    let quart = quartic_monomials();
    let mut coords = Vec::with_capacity(15);
    for e in &quart {
        let key = format!("{}{}{}", e[0], e[1], e[2]);
        let v = data
            .get(&key)
            .or_else(|| data.get(&format!("u{key}")))
            .ok_or_else(|| Error::InvalidInstance(format!("missing catalecticant value {key}")))?;
        coords.push(v.clone());
    }
    if data.len() != 15 {
        return Err(Error::InvalidInstance(format!(
            "expected 15 catalecticant values, got {}",
            data.len()
        )));
    }
    let st = Structure::catalecticant();
    Ok(Instance {
        m: 6,
        n: 6,
        r: 2,
        family: Family::Catalecticant,
        u: st.to_matrix(&coords, Rat::zero()),
        weights: catalecticant_weights(),
        constraints: Vec::new(),
        params: Params::default(),
    })
}

/// `s` constraints with integer coefficients drawn uniformly from [−10, 10].
/// Affine constraints get a nonzero constant; results depend only on `seed`.
pub fn random_section(
    m: usize,
    n: usize,
    s: usize,
    kind: SectionKind,
    seed: u64,
) -> Result<Vec<LinearConstraint>> {
    if s > m * n {
        return Err(Error::OutOfRange(format!("codimension {s} exceeds {}", m * n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(s);
    while out.len() < s {
        let coeffs: RatMatrix = (0..m)
            .map(|_| (0..n).map(|_| Rat::int(rng.gen_range(-10..=10))).collect())
            .collect();
        let constant = match kind {
            SectionKind::Linear => Rat::zero(),
            SectionKind::Affine => loop {
                let c = rng.gen_range(-10..=10);
                if c != 0 {
                    break Rat::int(c);
                }
            },
        };
        if let Ok(c) = LinearConstraint::new(coeffs, constant) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Random dense instance: data in [−100, 100], weights in [1, 20] or all ones.
pub fn random_dense(m: usize, n: usize, r: usize, unit_weights: bool, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = (0..m)
        .map(|_| (0..n).map(|_| Rat::int(rng.gen_range(-100..=100))).collect())
        .collect();
    let weights = if unit_weights {
        WeightMatrix::ones(m, n)
    } else {
        WeightMatrix(
            (0..m)
                .map(|_| (0..n).map(|_| Rat::int(rng.gen_range(1..=20))).collect())
                .collect(),
        )
    };
    Instance {
        m,
        n,
        r,
        family: Family::Dense,
        u,
        weights,
        constraints: Vec::new(),
        params: Params::default(),
    }
}

/// Hankel instance of order `n` with data coordinates `data` (length `n`).
pub fn hankel_instance(data: &[Rat], r: usize, kind: WeightKind) -> Result<Instance> {
    let order = data.len();
    let st = Structure::hankel(order)?;
    Ok(Instance {
        m: st.rows,
        n: st.cols,
        r,
        family: Family::Hankel,
        u: st.to_matrix(data, Rat::zero()),
        weights: hankel_weights(order, kind)?,
        constraints: Vec::new(),
        params: Params {
            hankel_order: Some(order),
            sylvester: None,
        },
    })
}

/// Sylvester instance from the coefficient vectors `a` (length m+1) and `b`
/// (length n+1).
pub fn sylvester_instance(a: &[Rat], b: &[Rat], k: usize, kind: WeightKind) -> Result<Instance> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let st = Structure::sylvester(m, n, k)?;
    let coords: Vec<Rat> = a.iter().chain(b).cloned().collect();
    Ok(Instance {
        m: st.rows,
        n: st.cols,
        r: st.cols - 1,
        family: Family::Sylvester,
        u: st.to_matrix(&coords, Rat::zero()),
        weights: sylvester_weights(m, n, k, kind)?,
        constraints: Vec::new(),
        params: Params {
            hankel_order: None,
            sylvester: Some(SylvesterParams { m, n, k }),
        },
    })
}

/// The objective restricted to structural coordinates,
/// Σ_k c_k (x_k − ū_k)² + const, with c_k the total weight on coordinate k
/// and ū_k the weighted mean of the data over its positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateObjective {
    pub c: Vec<Rat>,
    pub center: Vec<Rat>,
}

/// A constraint written over structural coordinates: `a · x + b = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateConstraint {
    pub a: Vec<Rat>,
    pub b: Rat,
}

impl Instance {
    pub fn structure(&self) -> Result<Structure> {
        let st = match self.family {
            Family::Dense => Structure::dense(self.m, self.n),
            Family::Hankel => {
                let order = self.params.hankel_order.ok_or_else(|| {
                    Error::InvalidInstance("Hankel instance needs params.hankel_order".into())
                })?;
                Structure::hankel(order)?
            }
            Family::Catalecticant => Structure::catalecticant(),
            Family::Sylvester => {
                let p = self.params.sylvester.ok_or_else(|| {
                    Error::InvalidInstance("Sylvester instance needs params.sylvester".into())
                })?;
                Structure::sylvester(p.m, p.n, p.k)?
            }
        };
        if (st.rows, st.cols) != (self.m, self.n) {
            return Err(Error::InvalidInstance(format!(
                "{:?} structure is {}x{}, instance says {}x{}",
                self.family, st.rows, st.cols, self.m, self.n
            )));
        }
        Ok(st)
    }

    pub fn validate(&self) -> Result<()> {
        let shape_ok = |g: &RatMatrix| g.len() == self.m && g.iter().all(|r| r.len() == self.n);
        if !shape_ok(&self.u) {
            return Err(Error::InvalidInstance(format!("U must be {}x{}", self.m, self.n)));
        }
        if !shape_ok(&self.weights.0) {
            return Err(Error::InvalidInstance(format!("weights must be {}x{}", self.m, self.n)));
        }
        WeightMatrix::new(self.weights.0.clone())?;
        for (i, c) in self.constraints.iter().enumerate() {
            if !shape_ok(&c.coeffs) {
                return Err(Error::InvalidInstance(format!(
                    "constraint {i} must be {}x{}",
                    self.m, self.n
                )));
            }
            LinearConstraint::new(c.coeffs.clone(), c.constant.clone())?;
        }
        if self.r < 1 || self.r >= self.m.min(self.n) {
            return Err(Error::InvalidInstance(format!(
                "rank bound {} must satisfy 1 <= r < {}",
                self.r,
                self.m.min(self.n)
            )));
        }
        self.structure()?;
        Ok(())
    }

    pub fn coordinate_objective(&self) -> Result<CoordinateObjective> {
        let st = self.structure()?;
        let mut c = vec![BigRational::zero(); st.ncoords];
        let mut s = vec![BigRational::zero(); st.ncoords];
        for i in 0..self.m {
            for j in 0..self.n {
                if let Some(k) = st.map[i][j] {
                    let w = &self.weights.0[i][j].0;
                    c[k] += w;
                    s[k] += w * &self.u[i][j].0;
                }
            }
        }
        let center = s.iter().zip(&c).map(|(s, c)| Rat(s / c)).collect();
        Ok(CoordinateObjective {
            c: c.into_iter().map(Rat).collect(),
            center,
        })
    }

    pub fn coordinate_constraints(&self) -> Result<Vec<CoordinateConstraint>> {
        let st = self.structure()?;
        self.constraints
            .iter()
            .map(|lc| {
                let mut a = vec![BigRational::zero(); st.ncoords];
                for i in 0..self.m {
                    for j in 0..self.n {
                        if let Some(k) = st.map[i][j] {
                            a[k] += &lc.coeffs[i][j].0;
                        } else if !lc.coeffs[i][j].is_zero() {
                            return Err(Error::InvalidInstance(
                                "constraint touches a position outside the structure".into(),
                            ));
                        }
                    }
                }
                Ok(CoordinateConstraint {
                    a: a.into_iter().map(Rat).collect(),
                    b: lc.constant.clone(),
                })
            })
            .collect()
    }

    /// Replaces the data by its weighted orthogonal projection onto the
    /// constraint space (in structural coordinates). The critical points of
    /// the problem are unchanged.
    pub fn project_data_onto_constraints(&mut self) -> Result<()> {
        if self.constraints.is_empty() {
            return Ok(());
        }
        let st = self.structure()?;
        let obj = self.coordinate_objective()?;
        let cons = self.coordinate_constraints()?;
        let s = cons.len();
        // x = ū − C⁻¹ Aᵀ ν with (A C⁻¹ Aᵀ) ν = A ū + b
        let mut gram = vec![vec![BigRational::zero(); s]; s];
        let mut rhs = vec![BigRational::zero(); s];
        for p in 0..s {
            rhs[p] = cons[p].b.0.clone();
            for k in 0..st.ncoords {
                rhs[p] += &cons[p].a[k].0 * &obj.center[k].0;
                for q in 0..s {
                    gram[p][q] += &cons[p].a[k].0 * &cons[q].a[k].0 / &obj.c[k].0;
                }
            }
        }
        let nu = solve_rational(gram, rhs)?;
        let x: Vec<Rat> = (0..st.ncoords)
            .map(|k| {
                let mut v = obj.center[k].0.clone();
                for p in 0..s {
                    v -= &cons[p].a[k].0 * &nu[p] / &obj.c[k].0;
                }
                Rat(v)
            })
            .collect();
        self.u = st.to_matrix(&x, Rat::zero());
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance JSON: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn u_f64(&self) -> Vec<Vec<f64>> {
        self.u.iter().map(|r| r.iter().map(Rat::to_f64).collect()).collect()
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, inst.to_json()? + "\n")?;
    Ok(())
}

/// Exact Gaussian elimination for a nonsingular square system.
fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::InvalidInstance("constraints are linearly dependent".into()))?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    Ok((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    #[test]
    fn hankel_patterns() {
        let h5 = Structure::hankel(5).unwrap();
        let one_based: Vec<Vec<usize>> = h5
            .map
            .iter()
            .map(|row| row.iter().map(|c| c.unwrap() + 1).collect())
            .collect();
        assert_eq!(one_based, vec![vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 5]]);
        let h6 = Structure::hankel(6).unwrap();
        assert_eq!((h6.rows, h6.cols), (3, 4));
        assert_eq!(h6.map[2][3], Some(5));
        let h3 = Structure::hankel(3).unwrap();
        assert_eq!((h3.rows, h3.cols), (2, 2));
        assert!(Structure::hankel(2).is_err());
    }

    #[test]
    fn hankel_weight_tables() {
        let o6 = hankel_weights(6, WeightKind::Omega).unwrap();
        assert_eq!(
            o6.0,
            vec![
                vec![r(1, 1), r(1, 2), r(1, 3), r(1, 3)],
                vec![r(1, 2), r(1, 3), r(1, 3), r(1, 2)],
                vec![r(1, 3), r(1, 3), r(1, 2), r(1, 1)],
            ]
        );
        let t6 = hankel_weights(6, WeightKind::Theta).unwrap();
        assert_eq!(
            t6.0,
            vec![
                vec![r(1, 1), r(5, 2), r(10, 3), r(10, 3)],
                vec![r(5, 2), r(10, 3), r(10, 3), r(5, 2)],
                vec![r(10, 3), r(10, 3), r(5, 2), r(1, 1)],
            ]
        );
        let t5 = hankel_weights(5, WeightKind::Theta).unwrap();
        assert_eq!(
            t5.0,
            vec![
                vec![r(1, 1), r(2, 1), r(2, 1)],
                vec![r(2, 1), r(2, 1), r(2, 1)],
                vec![r(2, 1), r(2, 1), r(1, 1)],
            ]
        );
    }

    #[test]
    fn hankel_weights_are_reversal_symmetric() {
        for order in 3..=9 {
            for kind in [WeightKind::Omega, WeightKind::Theta] {
                let w = hankel_weights(order, kind).unwrap();
                let (p, q) = (w.rows(), w.cols());
                for i in 0..p {
                    for j in 0..q {
                        assert_eq!(w.get(i, j), w.get(p - 1 - i, q - 1 - j));
                    }
                }
            }
        }
    }

    #[test]
    fn omega_is_euclidean_on_coordinates() {
        for order in 3..=9 {
            let data: Vec<Rat> = (0..order as i64).map(|k| Rat::int(k * k - 3)).collect();
            let inst = hankel_instance(&data, 1, WeightKind::Omega).unwrap();
            let obj = inst.coordinate_objective().unwrap();
            assert!(obj.c.iter().all(|c| *c == Rat::one()));
            assert_eq!(obj.center, data);
        }
    }

    #[test]
    fn theta5_and_ones_coordinate_weights() {
        let data: Vec<Rat> = (0..5).map(Rat::int).collect();
        let t = hankel_instance(&data, 1, WeightKind::Theta).unwrap();
        let c = t.coordinate_objective().unwrap().c;
        assert_eq!(c, [1, 4, 6, 4, 1].map(Rat::int).to_vec());
        let o = hankel_instance(&data, 1, WeightKind::Ones).unwrap();
        assert_eq!(o.coordinate_objective().unwrap().c, [1, 2, 3, 2, 1].map(Rat::int).to_vec());
    }

    #[test]
    fn sylvester_patterns() {
        let s = Structure::sylvester(2, 2, 2).unwrap();
        assert_eq!((s.rows, s.cols), (4, 4));
        // classical resultant layout: a in the first two columns, b in the last two
        assert_eq!(s.map[0][0], Some(0));
        assert_eq!(s.map[2][0], Some(2));
        assert_eq!(s.map[3][1], Some(2));
        assert_eq!(s.map[0][2], Some(3));
        assert_eq!(s.map[3][3], Some(5));
        assert_eq!(s.map[3][0], None);
        let s = Structure::sylvester(3, 5, 1).unwrap();
        assert_eq!((s.rows, s.cols), (6, 4));
        for (m, n, k) in [(2, 3, 1), (3, 5, 2), (4, 5, 4)] {
            let s = Structure::sylvester(m, n, k).unwrap();
            assert_eq!(s.rows - s.cols, m - k);
            for c in 0..s.ncoords {
                let expect = if c <= m { n - m + k } else { k };
                assert_eq!(s.multiplicity(c), expect);
            }
        }
    }

    #[test]
    fn sylvester_weight_rules() {
        let o = sylvester_weights(2, 2, 2, WeightKind::Omega).unwrap();
        let st = Structure::sylvester(2, 2, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if st.map[i][j].is_some() {
                    assert_eq!(o.get(i, j), &r(1, 2));
                }
            }
        }
        let t = sylvester_weights(2, 2, 2, WeightKind::Theta).unwrap();
        assert_eq!(t.get(1, 0), &r(1, 4));
        let ones = sylvester_weights(2, 3, 1, WeightKind::Ones).unwrap();
        assert!(ones.0.iter().flatten().all(|w| *w == Rat::one()));
    }

    #[test]
    fn catalecticant_weights_first_row() {
        let w = catalecticant_weights();
        assert_eq!(w.0[0], [1, 2, 2, 2, 3, 2].map(Rat::int).to_vec());
        assert!(w.0.iter().flatten().all(|v| [1, 2, 3].map(Rat::int).contains(v)));
        let st = Structure::catalecticant();
        let zero: BTreeMap<String, Rat> = quartic_monomials()
            .iter()
            .map(|e| (format!("{}{}{}", e[0], e[1], e[2]), Rat::zero()))
            .collect();
        let inst = catalecticant_instance(&zero).unwrap();
        assert!(inst.u.iter().flatten().all(Rat::is_zero));
        assert_eq!(st.ncoords, 15);
        // coordinate weights are the multinomial coefficients 1, 4, 6, 12
        let c = inst.coordinate_objective().unwrap().c;
        assert_eq!(c[0], Rat::int(1));
        assert_eq!(c[1], Rat::int(4));
        assert_eq!(c[3], Rat::int(6));
        assert_eq!(c[4], Rat::int(12));
    }

    #[test]
    fn catalecticant_rejects_missing_keys() {
        let mut data = BTreeMap::new();
        data.insert("400".to_string(), Rat::one());
        assert!(catalecticant_instance(&data).is_err());
    }

    #[test]
    fn sections() {
        assert!(random_section(3, 3, 0, SectionKind::Linear, 1).unwrap().is_empty());
        let a = random_section(3, 4, 2, SectionKind::Affine, 9).unwrap();
        let b = random_section(3, 4, 2, SectionKind::Affine, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|c| c.is_affine()));
        assert!(a
            .iter()
            .flat_map(|c| c.coeffs.iter().flatten())
            .all(|v| v.0.abs() <= BigRational::from_integer(10.into())));
        let l = random_section(2, 2, 3, SectionKind::Linear, 3).unwrap();
        assert!(l.iter().all(|c| !c.is_affine()));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut inst = random_dense(2, 3, 1, false, 5);
        inst.weights.0[0][1] = r(7, 3);
        inst.u[1][2] = r(-1, 8);
        inst.constraints = random_section(2, 3, 1, SectionKind::Affine, 5).unwrap();
        let text = inst.to_json().unwrap();
        assert_eq!(Instance::from_json(&text).unwrap(), inst);
        assert!(text.contains("\"7/3\""));
    }

    #[test]
    fn malformed_instances_are_rejected() {
        let bad = r#"{"m":2,"n":2,"r":1,"family":"dense","U":[[1,2]],"weights":[[1,1],[1,1]]}"#;
        assert!(matches!(Instance::from_json(bad), Err(Error::InvalidInstance(_))));
        let neg = r#"{"m":2,"n":2,"r":1,"family":"dense","U":[[1,2],[3,4]],"weights":[[1,-1],[1,1]]}"#;
        assert!(Instance::from_json(neg).is_err());
        assert!(matches!(Instance::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn projection_lands_in_the_section() {
        let mut inst = random_dense(3, 3, 2, false, 11);
        inst.constraints = random_section(3, 3, 2, SectionKind::Affine, 4).unwrap();
        inst.project_data_onto_constraints().unwrap();
        for c in inst.coordinate_constraints().unwrap() {
            let mut v = c.b.0.clone();
            for (k, a) in c.a.iter().enumerate() {
                v += &a.0 * &inst.u[k / 3][k % 3].0;
            }
            assert!(v.is_zero());
        }
    }
}

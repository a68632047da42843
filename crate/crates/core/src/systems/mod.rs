//! Polynomial systems whose solutions are the critical points of weighted
//! structured low-rank approximation problems.
//!
//! Every system carries, besides its equations, the structural coordinates of
//! the primal problem written as polynomials in the system variables, so that
//! any solution can be mapped back to a matrix `X` regardless of the chart.

mod cpoly;

pub use cpoly::{CPoly, CompiledSystem, C};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structured::{Family, Instance, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// Determinant plus Lagrange multipliers, square corank-1 problems.
    Primal,
    /// Kernel charts and normal-space multipliers, any rank.
    Normal,
    /// Rank-one chart `x_ij = t_i z_j`.
    Rank1,
    /// Corank-one problem solved through its rank-one dual.
    DualRank1,
    /// `x_k = s t^k` on Hankel coordinates.
    HankelRank1,
    /// Sum of two fourth powers of linear forms.
    Catalecticant,
}

/// Excludes spurious solutions living on a degenerate locus.
#[derive(Clone, Debug)]
pub enum Degenerate {
    /// The reconstructed matrix has rank below the given bound.
    RankBelow(usize),
    /// Every listed polynomial vanishes (relative to the point's size).
    Vanishing(Vec<CPoly>),
}

/// How real solutions are sorted into minima and the rest.
#[derive(Clone, Debug)]
pub enum Classifier {
    /// The equations are the gradient of `potential`, in a chart of the
    /// feasible set; look at the Hessian in the system variables.
    Gradient,
    /// Work with the primal problem: weighted distance on structural
    /// coordinates subject to the rank bound and the linear constraints.
    Constrained,
}

/// The primal objective `Σ c_k (x_k − ū_k)²` on structural coordinates plus
/// the affine constraints `a · x + b = 0`.
#[derive(Clone, Debug)]
pub struct PrimalProblem {
    pub structure: Structure,
    pub rank: usize,
    pub c: Vec<f64>,
    pub center: Vec<f64>,
    pub constraints: Vec<(Vec<f64>, f64)>,
    /// Data and weights in matrix form, for reporting the objective.
    pub u: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct PolySystem {
    pub formulation: Formulation,
    pub var_names: Vec<String>,
    /// Group label of each variable, used by multihomogeneous starts.
    pub groups: Vec<usize>,
    /// The full system; may have more equations than variables.
    pub equations: Vec<CPoly>,
    /// Square subsystem to track when `equations` is overdetermined. Its
    /// solutions must contain those of the full system.
    pub tracked: Option<Vec<CPoly>>,
    /// Structural coordinates of the primal problem in the system variables.
    pub coords: Vec<CPoly>,
    pub primal: PrimalProblem,
    pub degenerate: Vec<Degenerate>,
    /// Variable permutation of an involution under which solutions come in
    /// pairs with the same matrix.
    pub symmetry: Option<Vec<usize>>,
    pub classifier: Classifier,
    /// When present, `equations[i]` is the derivative of this in variable `i`.
    pub potential: Option<CPoly>,
}

impl PolySystem {
    pub fn nvars(&self) -> usize {
        self.var_names.len()
    }

    pub fn is_overdetermined(&self) -> bool {
        self.equations.len() > self.nvars()
    }

    /// The square system handed to the tracker.
    pub fn square(&self) -> &[CPoly] {
        self.tracked.as_deref().unwrap_or(&self.equations)
    }

    pub fn symmetry_order(&self) -> usize {
        if self.symmetry.is_some() {
            2
        } else {
            1
        }
    }

    /// Structural coordinates at a solution.
    pub fn coordinates_at(&self, x: &[C]) -> Vec<C> {
        self.coords.iter().map(|p| p.eval(x)).collect()
    }

    /// Reconstructed matrix at a solution.
    pub fn matrix_at(&self, x: &[C]) -> Vec<Vec<C>> {
        self.primal
            .structure
            .to_matrix(&self.coordinates_at(x), C::new(0.0, 0.0))
    }

    pub fn is_degenerate(&self, x: &[C]) -> bool {
        let scale = 1.0 + x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        self.degenerate.iter().any(|d| match d {
            Degenerate::RankBelow(r) => numerical_rank_below(&self.matrix_at(x), *r),
            Degenerate::Vanishing(ps) => ps
                .iter()
                .all(|p| p.eval(x).norm() <= 1e-8 * scale.powi(p.degree().max(1) as i32)),
        })
    }
}

/// True when σ_r is negligible: `σ_r ≤ 1e−8 (1 + σ_1)`.
pub fn numerical_rank_below(x: &[Vec<C>], r: usize) -> bool {
    if r == 0 {
        return false;
    }
    let sv = singular_values(x);
    sv.len() < r || sv[r - 1] <= 1e-8 * (1.0 + sv[0])
}

/// Singular values in decreasing order.
pub fn singular_values(x: &[Vec<C>]) -> Vec<f64> {
    let m = x.len();
    let n = x.first().map_or(0, Vec::len);
    let mat = DMatrix::from_fn(m, n, |i, j| x[i][j]);
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn to_f64(v: &[crate::structured::Rat]) -> Vec<f64> {
    v.iter().map(|r| r.to_f64()).collect()
}

fn primal_problem(inst: &Instance) -> Result<PrimalProblem> {
    inst.validate()?;
    let obj = inst.coordinate_objective()?;
    let cons = inst.coordinate_constraints()?;
    Ok(PrimalProblem {
        structure: inst.structure()?,
        rank: inst.r,
        c: to_f64(&obj.c),
        center: to_f64(&obj.center),
        constraints: cons.iter().map(|k| (to_f64(&k.a), k.b.to_f64())).collect(),
        u: inst.u_f64(),
        weights: inst.weights.to_f64(),
    })
}

/// `Σ c_k (x_k − ū_k)²` with `x_k` given as polynomials.
fn weighted_distance(coords: &[CPoly], c: &[f64], center: &[f64], nv: usize) -> CPoly {
    let mut acc = CPoly::zero(nv);
    for ((x, ck), uk) in coords.iter().zip(c).zip(center) {
        let d = x - &CPoly::constant(nv, *uk);
        acc = &acc + &(&d * &d).scale(*ck);
    }
    acc
}

fn gradient(p: &CPoly) -> Vec<CPoly> {
    (0..p.nvars()).map(|i| p.diff(i)).collect()
}

fn linear_form(a: &[f64], b: f64, vars: &[CPoly], nv: usize) -> CPoly {
    let mut acc = CPoly::constant(nv, b);
    for (ak, x) in a.iter().zip(vars) {
        if *ak != 0.0 {
            acc = &acc + &x.scale(*ak);
        }
    }
    acc
}

/// Rank-one chart for an `m × n` matrix: variables `t_1..t_m, z_2..z_n` with
/// `z_1 = 1`; returns the variable names, groups and the entries `t_i z_j`
/// in row-major order.
fn rank1_chart(m: usize, n: usize) -> (Vec<String>, Vec<usize>, Vec<CPoly>) {
    let nv = m + n - 1;
    let names = (1..=m)
        .map(|i| format!("t{i}"))
        .chain((2..=n).map(|j| format!("z{j}")))
        .collect();
    let groups = (0..nv).map(|v| usize::from(v >= m)).collect();
    let t: Vec<CPoly> = (0..m).map(|i| CPoly::var(nv, i)).collect();
    let z: Vec<CPoly> = std::iter::once(CPoly::constant(nv, 1.0))
        .chain((1..n).map(|j| CPoly::var(nv, m + j - 1)))
        .collect();
    let entries = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| &t[i] * &z[j])
        .collect();
    (names, groups, entries)
}

fn require_dense_unconstrained(inst: &Instance, what: &str) -> Result<()> {
    if inst.family != Family::Dense {
        return Err(Error::Unsupported(format!("{what} needs a dense instance")));
    }
    if !inst.constraints.is_empty() {
        return Err(Error::Unsupported(format!("{what} does not take linear constraints")));
    }
    Ok(())
}

/// Weighted rank-one approximation through the chart `x_ij = t_i z_j`,
/// `z_1 = 1`: the gradient of `Σ λ_ij (t_i z_j − u_ij)²`.
pub fn rank1_parametric(inst: &Instance) -> Result<PolySystem> {
    require_dense_unconstrained(inst, "the rank-one chart")?;
    if inst.r != 1 {
        return Err(Error::Unsupported("the rank-one chart needs r = 1".into()));
    }
    let primal = primal_problem(inst)?;
    let (names, groups, coords) = rank1_chart(inst.m, inst.n);
    let nv = names.len();
    let potential = weighted_distance(&coords, &primal.c, &primal.center, nv);
    Ok(PolySystem {
        formulation: Formulation::Rank1,
        var_names: names,
        groups,
        equations: gradient(&potential),
        tracked: None,
        degenerate: vec![Degenerate::RankBelow(1)],
        coords,
        primal,
        symmetry: None,
        classifier: Classifier::Gradient,
        potential: Some(potential),
    })
}

/// Corank-one approximation of an `m × n` matrix solved on the dual side:
/// rank-one critical points `Y` of `Σ (y_ij − λ_ij u_ij)² / λ_ij`, mapped
/// back by `X = U − Y / Λ`.
pub fn dual_rank1(inst: &Instance) -> Result<PolySystem> {
    require_dense_unconstrained(inst, "the dual rank-one formulation")?;
    if inst.r + 1 != inst.m.min(inst.n) {
        return Err(Error::Unsupported(
            "the dual rank-one formulation needs r = min(m, n) − 1".into(),
        ));
    }
    let primal = primal_problem(inst)?;
    let (m, n) = (inst.m, inst.n);
    let (names, groups, y) = rank1_chart(m, n);
    let nv = names.len();
    let lam: Vec<f64> = primal.weights.iter().flatten().copied().collect();
    let u: Vec<f64> = primal.u.iter().flatten().copied().collect();
    let dual_center: Vec<f64> = lam.iter().zip(&u).map(|(l, u)| l * u).collect();
    let dual_c: Vec<f64> = lam.iter().map(|l| 1.0 / l).collect();
    let potential = weighted_distance(&y, &dual_c, &dual_center, nv);
    let coords = y
        .iter()
        .zip(&lam)
        .zip(&u)
        .map(|((yk, l), uk)| &CPoly::constant(nv, *uk) - &yk.scale(1.0 / l))
        .collect();
    let t_vars = (0..m).map(|i| CPoly::var(nv, i)).collect();
    Ok(PolySystem {
        formulation: Formulation::DualRank1,
        var_names: names,
        groups,
        equations: gradient(&potential),
        tracked: None,
        coords,
        primal,
        degenerate: vec![Degenerate::RankBelow(inst.r), Degenerate::Vanishing(t_vars)],
        symmetry: None,
        classifier: Classifier::Constrained,
        potential: Some(potential),
    })
}

/// Rank-one Hankel matrices through `x_k = s t^k`; solutions with `s = 0` or
/// `t = 0` are excluded.
pub fn hankel_rank1(inst: &Instance) -> Result<PolySystem> {
    if inst.family != Family::Hankel || inst.r != 1 || !inst.constraints.is_empty() {
        return Err(Error::Unsupported(
            "the Hankel chart needs an unconstrained rank-one Hankel instance".into(),
        ));
    }
    let primal = primal_problem(inst)?;
    let nv = 2;
    let s = CPoly::var(nv, 0);
    let t = CPoly::var(nv, 1);
    let coords: Vec<CPoly> = (0..primal.structure.ncoords)
        .map(|k| &s * &t.pow(k as u32))
        .collect();
    let potential = weighted_distance(&coords, &primal.c, &primal.center, nv);
    Ok(PolySystem {
        formulation: Formulation::HankelRank1,
        var_names: vec!["s".into(), "t".into()],
        groups: vec![0, 1],
        equations: gradient(&potential),
        tracked: None,
        coords,
        primal,
        degenerate: vec![Degenerate::Vanishing(vec![s]), Degenerate::Vanishing(vec![t])],
        symmetry: None,
        classifier: Classifier::Gradient,
        potential: Some(potential),
    })
}

/// Square corank-one problems: structural coordinates `x`, multipliers
/// `z_0..z_s`, and the equations `c∘(x − ū) + z_0 ∇D + Σ z_l a_l = 0`,
/// `D = 0`, `L_l = 0` with `D` the determinant.
pub fn primal_corank1(inst: &Instance) -> Result<PolySystem> {
    let primal = primal_problem(inst)?;
    let st = &primal.structure;
    if st.rows != st.cols {
        return Err(Error::Unsupported("the determinantal formulation needs a square matrix".into()));
    }
    if inst.r + 1 != st.rows {
        return Err(Error::Unsupported("the determinantal formulation needs r = n − 1".into()));
    }
    let nx = st.ncoords;
    let s = primal.constraints.len();
    let nv = nx + s + 1;
    let x: Vec<CPoly> = (0..nx).map(|k| CPoly::var(nv, k)).collect();
    let z: Vec<CPoly> = (0..=s).map(|l| CPoly::var(nv, nx + l)).collect();
    let det = CPoly::det(&st.to_matrix(&x, CPoly::zero(nv)));
    let lforms: Vec<CPoly> = primal
        .constraints
        .iter()
        .map(|(a, b)| linear_form(a, *b, &x, nv))
        .collect();
    // Lagrangian ½ Σ c (x − ū)² + z_0 D + Σ z_l L_l
    let mut lagr = weighted_distance(&x, &primal.c, &primal.center, nv).scale(0.5);
    lagr = &lagr + &(&z[0] * &det);
    for (l, form) in lforms.iter().enumerate() {
        lagr = &lagr + &(&z[l + 1] * form);
    }
    let names = st
        .labels
        .iter()
        .cloned()
        .chain((0..=s).map(|l| format!("z{l}")))
        .collect();
    Ok(PolySystem {
        formulation: Formulation::Primal,
        var_names: names,
        groups: (0..nv).map(|v| usize::from(v >= nx)).collect(),
        equations: gradient(&lagr),
        tracked: None,
        coords: x,
        degenerate: vec![Degenerate::RankBelow(inst.r)],
        primal,
        symmetry: None,
        classifier: Classifier::Constrained,
        potential: Some(lagr),
    })
}

/// Kernel-chart formulation for any rank. With `a = m − r`, `b = n − r`:
/// left kernel `Q [I_a; Y']`, right kernel `R [I_b; Z']`, multipliers
/// `w` (`a × b`) and `μ` (one per constraint). The coordinates are eliminated
/// through the Lagrange condition
/// `c_k (x_k − ū_k) = Σ w_ij N^{ij}_k + Σ μ_l a_{lk}`, where `N^{ij}` is the
/// pullback of `ỹ_i z̃_jᵀ` to structural coordinates.
///
/// `chart_seed = None` uses `Q = I`, `R = I`; otherwise both are drawn at
/// random, which recovers points whose kernels do not fit the identity chart.
pub fn normal_space(inst: &Instance, chart_seed: Option<u64>) -> Result<PolySystem> {
    let primal = primal_problem(inst)?;
    let st = primal.structure.clone();
    let (m, n, r) = (st.rows, st.cols, inst.r);
    let (a, b) = (m - r, n - r);
    let s = primal.constraints.len();
    let (ny, nz, nw) = (r * a, r * b, a * b);
    let nv = ny + nz + nw + s;
    let var = |i| CPoly::var(nv, i);
    let mut names = Vec::with_capacity(nv);
    for i in 0..r {
        for j in 0..a {
            names.push(format!("y{}_{}", i + 1, j + 1));
        }
    }
    for i in 0..r {
        for j in 0..b {
            names.push(format!("z{}_{}", i + 1, j + 1));
        }
    }
    for i in 0..a {
        for j in 0..b {
            names.push(format!("w{}_{}", i + 1, j + 1));
        }
    }
    for l in 0..s {
        names.push(format!("mu{}", l + 1));
    }
    let groups = (0..nv)
        .map(|v| {
            if v < ny {
                0
            } else if v < ny + nz {
                1
            } else {
                2
            }
        })
        .collect();

    let (q, rr) = match chart_seed {
        None => (identity(m), identity(n)),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (random_matrix(m, &mut rng), random_matrix(n, &mut rng))
        }
    };
    // Ỹ = Q [I_a; Y'], m × a
    let ychart = kernel_chart(&q, a, r, 0, nv);
    let zchart = kernel_chart(&rr, b, r, ny, nv);

    let mut coords = Vec::with_capacity(st.ncoords);
    for k in 0..st.ncoords {
        let mut acc = CPoly::zero(nv);
        for (p, qq) in st.positions(k) {
            for i in 0..a {
                for j in 0..b {
                    let w = var(ny + nz + i * b + j);
                    acc = &acc + &(&w * &(&ychart[p][i] * &zchart[qq][j]));
                }
            }
        }
        for (l, (al, _)) in primal.constraints.iter().enumerate() {
            if al[k] != 0.0 {
                acc = &acc + &var(ny + nz + nw + l).scale(al[k]);
            }
        }
        coords.push(&CPoly::constant(nv, primal.center[k]) + &acc.scale(1.0 / primal.c[k]));
    }
    let xm = st.to_matrix(&coords, CPoly::zero(nv));

    let mut left = Vec::with_capacity(a * n);
    for i in 0..a {
        for col in 0..n {
            let mut acc = CPoly::zero(nv);
            for row in 0..m {
                acc = &acc + &(&ychart[row][i] * &xm[row][col]);
            }
            left.push(acc);
        }
    }
    let mut right = Vec::with_capacity(m * b);
    for row in 0..m {
        for j in 0..b {
            let mut acc = CPoly::zero(nv);
            for col in 0..n {
                acc = &acc + &(&xm[row][col] * &zchart[col][j]);
            }
            right.push(acc);
        }
    }
    let lforms: Vec<CPoly> = primal
        .constraints
        .iter()
        .map(|(al, bl)| linear_form(al, *bl, &coords, nv))
        .collect();

    // Given ỸᵀX = 0, the top a rows of QᵀX are determined by the bottom r
    // rows, so X Z̃ = 0 reduces to (bottom rows of QᵀX) Z̃ = 0.
    let mut bottom = Vec::with_capacity(r * b);
    for i in a..m {
        let qtx_row: Vec<CPoly> = (0..n)
            .map(|col| {
                let mut acc = CPoly::zero(nv);
                for row in 0..m {
                    if q[row][i] != 0.0 {
                        acc = &acc + &xm[row][col].scale(q[row][i]);
                    }
                }
                acc
            })
            .collect();
        for j in 0..b {
            let mut acc = CPoly::zero(nv);
            for col in 0..n {
                acc = &acc + &(&qtx_row[col] * &zchart[col][j]);
            }
            bottom.push(acc);
        }
    }

    let tracked: Vec<CPoly> = left.iter().chain(&bottom).chain(&lforms).cloned().collect();
    let equations: Vec<CPoly> = left.into_iter().chain(right).chain(lforms).collect();
    debug_assert_eq!(tracked.len(), nv);
    Ok(PolySystem {
        formulation: Formulation::Normal,
        var_names: names,
        groups,
        equations,
        tracked: Some(tracked),
        coords,
        degenerate: vec![Degenerate::RankBelow(r)],
        primal,
        symmetry: None,
        classifier: Classifier::Constrained,
        potential: None,
    })
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// `Q [I_k; V]` where `V` (r × k) holds variables starting at `offset`.
fn kernel_chart(q: &[Vec<f64>], k: usize, r: usize, offset: usize, nv: usize) -> Vec<Vec<CPoly>> {
    let dim = k + r;
    let block: Vec<Vec<CPoly>> = (0..dim)
        .map(|row| {
            (0..k)
                .map(|col| {
                    if row < k {
                        CPoly::constant(nv, if row == col { 1.0 } else { 0.0 })
                    } else {
                        CPoly::var(nv, offset + (row - k) * k + col)
                    }
                })
                .collect()
        })
        .collect();
    (0..dim)
        .map(|row| {
            (0..k)
                .map(|col| {
                    let mut acc = CPoly::zero(nv);
                    for (mid, qv) in q[row].iter().enumerate() {
                        if *qv != 0.0 {
                            acc = &acc + &block[mid][col].scale(*qv);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Rank-two ternary quartics `a (s + bt + cu)^4 + d (s + et + fu)^4`; the
/// gradient of `Σ c_κ (x_κ − ū_κ)²` in `a..f`. `weights` replaces the
/// per-coordinate coefficients `c_κ` when given.
pub fn catalecticant_rank2(inst: &Instance, weights: Option<&[f64]>) -> Result<PolySystem> {
    if inst.family != Family::Catalecticant || inst.r != 2 || !inst.constraints.is_empty() {
        return Err(Error::Unsupported(
            "the quartic parametrization needs an unconstrained rank-two catalecticant".into(),
        ));
    }
    let mut primal = primal_problem(inst)?;
    if let Some(w) = weights {
        if w.len() != primal.c.len() || w.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidInstance("need 15 positive coefficients".into()));
        }
        primal.c = w.to_vec();
    }
    let nv = 6;
    let v: Vec<CPoly> = (0..nv).map(|i| CPoly::var(nv, i)).collect();
    let coords: Vec<CPoly> = crate::structured::quartic_monomials()
        .iter()
        .map(|e| {
            let (j, k) = (e[1] as u32, e[2] as u32);
            let p = &(&v[0] * &v[1].pow(j)) * &v[2].pow(k);
            let q = &(&v[3] * &v[4].pow(j)) * &v[5].pow(k);
            &p + &q
        })
        .collect();
    let potential = weighted_distance(&coords, &primal.c, &primal.center, nv);
    Ok(PolySystem {
        formulation: Formulation::Catalecticant,
        var_names: ["a", "b", "c", "d", "e", "f"].iter().map(|s| s.to_string()).collect(),
        groups: vec![0, 1, 2, 0, 1, 2],
        equations: gradient(&potential),
        tracked: None,
        coords,
        primal,
        degenerate: vec![
            Degenerate::Vanishing(vec![v[0].clone()]),
            Degenerate::Vanishing(vec![v[3].clone()]),
            Degenerate::Vanishing(vec![&v[1] - &v[4], &v[2] - &v[5]]),
        ],
        symmetry: Some(vec![3, 4, 5, 0, 1, 2]),
        classifier: Classifier::Gradient,
        potential: Some(potential),
    })
}

/// `Y = Λ ∗ (U − X)`.
pub fn dual_transfer(x: &[Vec<C>], lam: &[Vec<f64>], u: &[Vec<f64>]) -> Vec<Vec<C>> {
    x.iter()
        .zip(lam)
        .zip(u)
        .map(|((xr, lr), ur)| {
            xr.iter()
                .zip(lr)
                .zip(ur)
                .map(|((x, l), u)| (C::new(*u, 0.0) - x) * *l)
                .collect()
        })
        .collect()
}

/// `X = U − Y / Λ`, the inverse of [`dual_transfer`].
pub fn inverse_transfer(y: &[Vec<C>], lam: &[Vec<f64>], u: &[Vec<f64>]) -> Vec<Vec<C>> {
    y.iter()
        .zip(lam)
        .zip(u)
        .map(|((yr, lr), ur)| {
            yr.iter()
                .zip(lr)
                .zip(ur)
                .map(|((y, l), u)| C::new(*u, 0.0) - y / *l)
                .collect()
        })
        .collect()
}

/// `Σ λ_ij |x_ij − u_ij|²`.
pub fn objective(x: &[Vec<C>], u: &[Vec<f64>], lam: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for ((xr, ur), lr) in x.iter().zip(u).zip(lam) {
        for ((x, u), l) in xr.iter().zip(ur).zip(lr) {
            acc += l * (x - u).norm_sqr();
        }
    }
    acc
}

/// Largest absolute equation value of the full system.
pub fn residual(sys: &PolySystem, x: &[C]) -> f64 {
    sys.equations
        .iter()
        .map(|p| p.eval(x).norm())
        .fold(0.0, f64::max)
}

/// Largest equation value relative to the size of its terms at `x`.
pub fn relative_residual(sys: &PolySystem, x: &[C]) -> f64 {
    sys.equations
        .iter()
        .map(|p| p.eval(x).norm() / (1.0 + p.abs_term_sum(x)))
        .fold(0.0, f64::max)
}

/// Closest matrix of rank at most `r` in the Frobenius norm.
pub fn eckart_young(u: &[Vec<f64>], r: usize) -> Vec<Vec<f64>> {
    let m = u.len();
    let n = u.first().map_or(0, Vec::len);
    let mat = DMatrix::from_fn(m, n, |i, j| u[i][j]);
    let mut svd = mat.svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    for &i in order.iter().skip(r) {
        svd.singular_values[i] = 0.0;
    }
    let out = svd.recompose().expect("both factors were computed");
    (0..m).map(|i| (0..n).map(|j| out[(i, j)]).collect()).collect()
}

/// The `r`-rank truncations keeping each size-`r` subset of singular
/// values: all real critical points for unit weights without constraints.
pub fn singular_value_truncations(u: &[Vec<f64>], r: usize) -> Vec<Vec<Vec<f64>>> {
    let m = u.len();
    let n = u.first().map_or(0, Vec::len);
    let mat = DMatrix::from_fn(m, n, |i, j| u[i][j]);
    let svd = mat.svd(true, true);
    let k = svd.singular_values.len();
    let uu = svd.u.as_ref().expect("left factor");
    let vt = svd.v_t.as_ref().expect("right factor");
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let mut x = vec![vec![0.0; n]; m];
        for l in (0..k).filter(|l| mask >> l & 1 == 1) {
            for (i, row) in x.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += svd.singular_values[l] * uu[(i, l)] * vt[(l, j)];
                }
            }
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::{
        catalecticant_instance, hankel_instance, random_dense, random_section, Rat, SectionKind,
        WeightKind,
    };

    fn c(v: f64) -> C {
        C::new(v, 0.0)
    }

    fn random_point(nv: usize, seed: u64) -> Vec<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..nv)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn with_section(mut inst: Instance, s: usize, seed: u64) -> Instance {
        inst.constraints = random_section(inst.m, inst.n, s, SectionKind::Affine, seed).unwrap();
        inst
    }

    /// Central differences of `f` against the analytic gradient.
    fn check_gradient(potential: &CPoly, eqs: &[CPoly], seed: u64) {
        let nv = potential.nvars();
        for trial in 0..20 {
            let x = random_point(nv, seed * 100 + trial);
            for (i, eq) in eqs.iter().enumerate() {
                let h = 1e-5;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (potential.eval(&xp) - potential.eval(&xm)) / (2.0 * h);
                let an = eq.eval(&x);
                let err = (fd - an).norm() / (1.0 + eq.abs_term_sum(&x));
                assert!(err < 1e-6, "variable {i}: fd {fd} vs analytic {an}");
            }
        }
    }

    #[test]
    fn gradient_formulations_match_finite_differences() {
        let dense = random_dense(3, 3, 1, false, 3);
        let mut corank = dense.clone();
        corank.r = 2;
        let hank = hankel_instance(
            &[3, -1, 4, 1, -5].map(Rat::int),
            1,
            WeightKind::Omega,
        )
        .unwrap();
        let sec = with_section(random_dense(2, 2, 1, false, 5), 2, 5);
        let quartic: std::collections::BTreeMap<String, Rat> = crate::structured::quartic_monomials()
            .iter()
            .enumerate()
            .map(|(i, e)| (format!("{}{}{}", e[0], e[1], e[2]), Rat::int(i as i64 % 5 - 2)))
            .collect();
        let cat = catalecticant_instance(&quartic).unwrap();
        let systems = vec![
            rank1_parametric(&dense).unwrap(),
            dual_rank1(&corank).unwrap(),
            hankel_rank1(&hank).unwrap(),
            primal_corank1(&corank).unwrap(),
            primal_corank1(&sec).unwrap(),
            catalecticant_rank2(&cat, None).unwrap(),
        ];
        for (k, sys) in systems.iter().enumerate() {
            check_gradient(sys.potential.as_ref().unwrap(), &sys.equations, k as u64);
        }
    }

    #[test]
    fn normal_space_eliminates_the_lagrange_condition() {
        // ℒ(x) = ½ Σ c (x − ū)² − Σ w_ij ỹ_iᵀ X(x) z̃_j − Σ μ_l L_l(x) must be
        // stationary in x at the eliminated coordinates, for any chart values.
        let inst = with_section(random_dense(3, 4, 2, false, 9), 2, 9);
        let seed = 4;
        let sys = normal_space(&inst, Some(seed)).unwrap();
        let p = &sys.primal;
        let (m, n, r) = (3, 4, 2);
        let (a, b) = (m - r, n - r);
        let nv = sys.nvars();
        let (ny, nz) = (r * a, r * b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_matrix(m, &mut rng);
        let rr = random_matrix(n, &mut rng);
        let ychart = kernel_chart(&q, a, r, 0, nv);
        let zchart = kernel_chart(&rr, b, r, ny, nv);
        for trial in 0..20 {
            let v = random_point(nv, 500 + trial);
            let yv: Vec<Vec<C>> = ychart.iter().map(|row| row.iter().map(|e| e.eval(&v)).collect()).collect();
            let zv: Vec<Vec<C>> = zchart.iter().map(|row| row.iter().map(|e| e.eval(&v)).collect()).collect();
            let lagr = |x: &[C]| -> C {
                let mut acc = C::new(0.0, 0.0);
                for k in 0..x.len() {
                    acc += 0.5 * p.c[k] * (x[k] - p.center[k]).powi(2);
                }
                let xm = p.structure.to_matrix(x, C::new(0.0, 0.0));
                for i in 0..a {
                    for j in 0..b {
                        let w = v[ny + nz + i * b + j];
                        for row in 0..m {
                            for col in 0..n {
                                acc -= w * yv[row][i] * xm[row][col] * zv[col][j];
                            }
                        }
                    }
                }
                for (l, (al, bl)) in p.constraints.iter().enumerate() {
                    let mut form = C::new(*bl, 0.0);
                    for k in 0..x.len() {
                        form += al[k] * x[k];
                    }
                    acc -= v[ny + nz + a * b + l] * form;
                }
                acc
            };
            let x = sys.coordinates_at(&v);
            let scale = 1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for k in 0..x.len() {
                let h = 1e-5;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let fd = (lagr(&xp) - lagr(&xm)) / (2.0 * h);
                assert!(fd.norm() / scale < 1e-6, "trial {trial}, coordinate {k}: {fd}");
            }
        }
        assert_eq!(sys.tracked.as_ref().unwrap().len(), nv);
        assert_eq!(sys.equations.len(), a * n + m * b + 2);
    }

    #[test]
    fn sizes_of_the_formulations() {
        let inst = random_dense(3, 3, 2, false, 1);
        let sys = primal_corank1(&inst).unwrap();
        assert_eq!(sys.nvars(), 10);
        assert_eq!(sys.equations.len(), 10);
        let sys = dual_rank1(&inst).unwrap();
        assert_eq!(sys.nvars(), 5);
        assert!(sys.equations.iter().all(|p| p.degree() == 3));
        let sys = normal_space(&inst, None).unwrap();
        assert_eq!(sys.nvars(), 2 + 2 + 1);
        assert!(sys.is_overdetermined());
        assert_eq!(sys.square().len(), 5);
        let mut nonsq = random_dense(3, 4, 2, false, 1);
        nonsq.r = 2;
        assert!(primal_corank1(&nonsq).is_err());
    }

    #[test]
    fn primal_recovers_eckart_young_for_two_by_two() {
        // X = diag(3, 0), z_0 chosen so that the Lagrange equations hold.
        let inst = Instance::from_json(
            r#"{"m":2,"n":2,"r":1,"family":"dense","U":[[3,0],[0,1]],"weights":[[1,1],[1,1]]}"#,
        )
        .unwrap();
        let sys = primal_corank1(&inst).unwrap();
        // ∂/∂x22: (x22 − 1) + z0 x11 = 0 → z0 = 1/3
        for (pt, _) in [
            (vec![c(3.0), c(0.0), c(0.0), c(0.0), c(1.0 / 3.0)], 0),
            (vec![c(0.0), c(0.0), c(0.0), c(1.0), c(3.0)], 1),
        ] {
            assert!(residual(&sys, &pt) < 1e-12, "{pt:?}");
        }
    }

    #[test]
    fn rank1_exact_fit_is_a_solution_with_zero_objective() {
        let inst = Instance::from_json(
            r#"{"m":2,"n":3,"r":1,"family":"dense","U":[[1,2,3],[2,4,6]],"weights":[[1,2,3],[4,5,6]]}"#,
        )
        .unwrap();
        let sys = rank1_parametric(&inst).unwrap();
        let pt = [c(1.0), c(2.0), c(2.0), c(3.0)];
        assert!(residual(&sys, &pt) < 1e-12);
        let x = sys.matrix_at(&pt);
        assert!(objective(&x, &sys.primal.u, &sys.primal.weights) < 1e-20);
    }

    #[test]
    fn catalecticant_exact_rank_two_form_fits() {
        let (a, b, cc, d, e, f): (f64, f64, f64, f64, f64, f64) = (1.5, 0.5, -1.0, -0.5, 2.0, 0.25);
        let mut data = std::collections::BTreeMap::new();
        for ex in crate::structured::quartic_monomials() {
            let (j, k) = (ex[1] as i32, ex[2] as i32);
            let v = a * b.powi(j) * cc.powi(k) + d * e.powi(j) * f.powi(k);
            data.insert(format!("{}{}{}", ex[0], ex[1], ex[2]), Rat::from_f64_decimal(v).unwrap());
        }
        let inst = catalecticant_instance(&data).unwrap();
        let sys = catalecticant_rank2(&inst, None).unwrap();
        let pt = [a, b, cc, d, e, f].map(c);
        assert!(sys.potential.as_ref().unwrap().eval(&pt).norm() < 1e-20);
        assert!(residual(&sys, &pt) < 1e-12);
        assert_eq!(sys.symmetry_order(), 2);
        check_gradient(sys.potential.as_ref().unwrap(), &sys.equations, 77);
        assert!(sys.is_degenerate(&[c(0.0), c(1.0), c(1.0), c(2.0), c(3.0), c(4.0)]));
        assert!(sys.is_degenerate(&[c(1.0), c(1.0), c(2.0), c(2.0), c(1.0), c(2.0)]));
        assert!(!sys.is_degenerate(&pt));
    }

    #[test]
    fn transfer_round_trip_and_fixed_point() {
        let u = vec![vec![1.0, -2.0], vec![3.5, 4.0]];
        let lam = vec![vec![2.0, 3.0], vec![0.5, 7.0]];
        let ux: Vec<Vec<C>> = u.iter().map(|r| r.iter().map(|v| c(*v)).collect()).collect();
        let y = dual_transfer(&ux, &lam, &u);
        assert!(y.iter().flatten().all(|v| v.norm() == 0.0));
        let x = vec![vec![C::new(0.3, 1.0), c(-4.0)], vec![c(2.0), C::new(0.0, -2.5)]];
        let back = inverse_transfer(&dual_transfer(&x, &lam, &u), &lam, &u);
        for (r1, r2) in back.iter().zip(&x) {
            for (a, b) in r1.iter().zip(r2) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert_eq!(objective(&ux, &u, &lam), 0.0);
    }

    #[test]
    fn eckart_young_diagonal_cases() {
        let u = vec![vec![3.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]];
        let x = eckart_young(&u, 2);
        let want = [[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((x[i][j] - want[i][j]).abs() < 1e-12);
            }
        }
        let full = eckart_young(&u, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert!((full[i][j] - u[i][j]).abs() < 1e-12);
            }
        }
        assert_eq!(singular_value_truncations(&u, 2).len(), 3);
    }

    #[test]
    fn rank_predicate() {
        let x = vec![vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0)]];
        assert!(numerical_rank_below(&x, 2));
        assert!(!numerical_rank_below(&x, 1));
    }
}

//! Second-order classification of real critical points.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::systems::{CPoly, Classifier, PolySystem, PrimalProblem, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    LocalMin,
    SaddleOrMax,
    Ambiguous,
}

/// Relative eigenvalue threshold separating definite from ambiguous.
const EIG_TOL: f64 = 1e-7;

fn verdict(eigs: &[f64]) -> Classification {
    let scale = eigs.iter().map(|e| e.abs()).fold(0.0, f64::max);
    if eigs.is_empty() {
        return Classification::LocalMin;
    }
    if scale == 0.0 {
        return Classification::Ambiguous;
    }
    if eigs.iter().any(|&e| e < -EIG_TOL * scale) {
        Classification::SaddleOrMax
    } else if eigs.iter().all(|&e| e > EIG_TOL * scale) {
        Classification::LocalMin
    } else {
        Classification::Ambiguous
    }
}

/// Eigenvalues after the congruence `D H D` with `D = diag(|h_ii|^{-1/2})`,
/// which keeps the inertia while removing the chart's scaling.
fn symmetric_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let n = h.nrows();
    let mut sym = (&h + h.transpose()) * 0.5;
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let a = sym[(i, i)].abs();
            if a > 0.0 {
                1.0 / a.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] *= d[i] * d[j];
        }
    }
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

/// Classifies a critical point whose matrix is real.
pub fn classify(sys: &PolySystem, vars: &[C]) -> Classification {
    let real_vars = vars
        .iter()
        .all(|v| v.im.abs() <= 1e-8 * (1.0 + v.norm()));
    match (&sys.classifier, &sys.potential) {
        (Classifier::Gradient, Some(pot)) if real_vars => {
            let x: Vec<C> = vars.iter().map(|v| C::new(v.re, 0.0)).collect();
            chart_hessian(pot, &x)
        }
        _ => {
            let coords: Vec<f64> = sys.coordinates_at(vars).iter().map(|c| c.re).collect();
            constrained(&sys.primal, &coords)
        }
    }
}

/// Hessian of the potential in the chart variables.
pub fn chart_hessian(pot: &CPoly, x: &[C]) -> Classification {
    let n = x.len();
    let grads: Vec<CPoly> = (0..n).map(|i| pot.diff(i)).collect();
    let h = DMatrix::from_fn(n, n, |i, j| grads[i].diff(j).eval(x).re);
    verdict(&symmetric_eigenvalues(h))
}

/// Lagrangian Hessian projected onto the tangent space of
/// `{rank X ≤ r, a · x + b = 0}` in structural coordinates. The rank
/// condition is imposed near `x` by the (r+1)-minors that contain the best
/// conditioned r × r block.
pub fn constrained(p: &PrimalProblem, x: &[f64]) -> Classification {
    let st = &p.structure;
    let nx = st.ncoords;
    let xm = st.to_matrix(x, 0.0);
    let (m, n, r) = (st.rows, st.cols, p.rank);
    let mat = DMatrix::from_fn(m, n, |i, j| xm[i][j]);
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv[0] == 0.0 || sv[r - 1] < 1e-6 * sv[0] {
        return Classification::Ambiguous;
    }

    let (rows, cols) = best_block(&xm, r);
    let vars: Vec<CPoly> = (0..nx).map(|k| CPoly::var(nx, k)).collect();
    let pm = st.to_matrix(&vars, CPoly::zero(nx));
    let mut minors = Vec::new();
    for i in (0..m).filter(|i| !rows.contains(i)) {
        for j in (0..n).filter(|j| !cols.contains(j)) {
            let ri: Vec<usize> = rows.iter().copied().chain([i]).collect();
            let cj: Vec<usize> = cols.iter().copied().chain([j]).collect();
            let sub: Vec<Vec<CPoly>> = ri
                .iter()
                .map(|&a| cj.iter().map(|&b| pm[a][b].clone()).collect())
                .collect();
            minors.push(CPoly::det(&sub));
        }
    }
    let xc: Vec<C> = x.iter().map(|v| C::new(*v, 0.0)).collect();
    let grads: Vec<Vec<CPoly>> = minors
        .iter()
        .map(|g| (0..nx).map(|k| g.diff(k)).collect())
        .collect();
    let nrows = minors.len() + p.constraints.len();
    let mut a = DMatrix::zeros(nrows.max(nx), nx);
    for (row, gr) in grads.iter().enumerate() {
        for k in 0..nx {
            a[(row, k)] = gr[k].eval(&xc).re;
        }
    }
    for (l, (al, _)) in p.constraints.iter().enumerate() {
        for k in 0..nx {
            a[(minors.len() + l, k)] = al[k];
        }
    }
    let grad_f = DVector::from_fn(nx, |k, _| 2.0 * p.c[k] * (x[k] - p.center[k]));

    // Multipliers: least-squares solution of Aᵀ ν = −∇f.
    let at = a.transpose();
    let svd_t = at.clone().svd(true, true);
    let nu = match svd_t.solve(&(-&grad_f), 1e-12 * svd_t.singular_values.max()) {
        Ok(v) => v,
        Err(_) => return Classification::Ambiguous,
    };

    let mut h = DMatrix::from_fn(nx, nx, |i, j| if i == j { 2.0 * p.c[i] } else { 0.0 });
    for (mi, gr) in grads.iter().enumerate() {
        let w = nu[mi];
        if w == 0.0 {
            continue;
        }
        for i in 0..nx {
            for j in 0..nx {
                h[(i, j)] += w * gr[i].diff(j).eval(&xc).re;
            }
        }
    }

    // Tangent space: right null space of the constraint Jacobian.
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let basis: Vec<DVector<f64>> = (0..nx)
        .filter(|&i| svd.singular_values[i] <= 1e-8 * smax.max(1e-300))
        .map(|i| vt.row(i).transpose())
        .collect();
    if basis.is_empty() {
        return Classification::LocalMin;
    }
    let nb = DMatrix::from_columns(&basis);
    let projected = nb.transpose() * h * &nb;
    verdict(&symmetric_eigenvalues(projected))
}

/// Rows and columns of the r × r submatrix of largest |det|.
fn best_block(x: &[Vec<f64>], r: usize) -> (Vec<usize>, Vec<usize>) {
    let m = x.len();
    let n = x[0].len();
    let row_sets = subsets(m, r);
    let col_sets = subsets(n, r);
    let mut best = (0.0, Vec::new(), Vec::new());
    for rs in &row_sets {
        for cs in &col_sets {
            let sub = DMatrix::from_fn(r, r, |i, j| x[rs[i]][cs[j]]);
            let d = sub.determinant().abs();
            if d > best.0 || best.1.is_empty() {
                best = (d, rs.clone(), cs.clone());
            }
        }
    }
    (best.1, best.2)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::Structure;

    fn unit_problem(u: Vec<Vec<f64>>, r: usize) -> PrimalProblem {
        let m = u.len();
        let n = u[0].len();
        PrimalProblem {
            structure: Structure::dense(m, n),
            rank: r,
            c: vec![1.0; m * n],
            center: u.iter().flatten().copied().collect(),
            constraints: Vec::new(),
            weights: vec![vec![1.0; n]; m],
            u,
        }
    }

    #[test]
    fn truncations_of_a_diagonal_matrix() {
        let u = vec![vec![3.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]];
        let p = unit_problem(u, 2);
        let flat = |d: [f64; 3]| {
            vec![d[0], 0.0, 0.0, 0.0, d[1], 0.0, 0.0, 0.0, d[2]]
        };
        assert_eq!(constrained(&p, &flat([3.0, 2.0, 0.0])), Classification::LocalMin);
        assert_eq!(constrained(&p, &flat([3.0, 0.0, 1.0])), Classification::SaddleOrMax);
        assert_eq!(constrained(&p, &flat([0.0, 2.0, 1.0])), Classification::SaddleOrMax);
    }

    #[test]
    fn rank_drop_is_ambiguous() {
        let u = vec![vec![3.0, 0.0], vec![0.0, 1.0]];
        let p = unit_problem(u, 1);
        assert_eq!(constrained(&p, &[0.0; 4]), Classification::Ambiguous);
    }

    #[test]
    fn chart_hessian_of_a_quadratic() {
        let x = CPoly::var(2, 0);
        let y = CPoly::var(2, 1);
        let bowl = &x.pow(2) + &y.pow(2).scale(3.0);
        let saddle = &x.pow(2) - &y.pow(2);
        let z = [C::new(0.0, 0.0); 2];
        assert_eq!(chart_hessian(&bowl, &z), Classification::LocalMin);
        assert_eq!(chart_hessian(&saddle, &z), Classification::SaddleOrMax);
        assert_eq!(chart_hessian(&x.pow(4), &z), Classification::Ambiguous);
    }
}

//! Start systems with known solutions.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::linalg::Lu;
use crate::error::{Error, Result};
use crate::systems::{CPoly, C};

/// A square system whose solutions are known and enumerable by index.
pub trait StartSystem: Sync {
    fn nvars(&self) -> usize;
    fn num_points(&self) -> usize;
    fn point(&self, idx: usize) -> Vec<C>;
    /// Values and row-major Jacobian.
    fn eval_jac(&self, x: &[C], g: &mut [C], jac: &mut [C]);
}

fn random_unit(rng: &mut ChaCha8Rng) -> C {
    C::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_complex(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `x_i^{d_i} − c_i = 0` with random unit `c_i`.
pub struct TotalDegreeStart {
    degrees: Vec<u32>,
    consts: Vec<C>,
    count: usize,
}

impl TotalDegreeStart {
    pub fn new(degrees: Vec<u32>, rng: &mut ChaCha8Rng) -> Result<Self> {
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::ZeroDegreeEquation(i));
        }
        let count = bezout_number(&degrees)
            .try_into()
            .map_err(|_| Error::PathBudget {
                paths: bezout_number(&degrees),
                limit: usize::MAX as u128,
            })?;
        let consts = degrees.iter().map(|_| random_unit(rng)).collect();
        Ok(TotalDegreeStart {
            degrees,
            consts,
            count,
        })
    }
}

pub fn bezout_number(degrees: &[u32]) -> u128 {
    degrees.iter().map(|&d| d as u128).product()
}

impl StartSystem for TotalDegreeStart {
    fn nvars(&self) -> usize {
        self.degrees.len()
    }

    fn num_points(&self) -> usize {
        self.count
    }

    fn point(&self, mut idx: usize) -> Vec<C> {
        self.degrees
            .iter()
            .zip(&self.consts)
            .map(|(&d, c)| {
                let k = idx % d as usize;
                idx /= d as usize;
                let root = c.powf(1.0 / d as f64);
                root * C::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)
            })
            .collect()
    }

    fn eval_jac(&self, x: &[C], g: &mut [C], jac: &mut [C]) {
        let n = self.degrees.len();
        jac.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        for i in 0..n {
            let d = self.degrees[i];
            let p = x[i].powu(d - 1);
            g[i] = p * x[i] - self.consts[i];
            jac[i * n + i] = p * d as f64;
        }
    }
}

/// Multihomogeneous Bézout number: the number of ways to give every variable
/// group as many equations as it has variables, each equation contributing
/// its degree in the group it is assigned to.
pub fn multihomogeneous_bezout(degrees: &[Vec<u32>], sizes: &[usize]) -> u128 {
    fn rec(
        i: usize,
        left: &mut Vec<usize>,
        degrees: &[Vec<u32>],
        memo: &mut HashMap<(usize, Vec<usize>), u128>,
    ) -> u128 {
        if i == degrees.len() {
            return u128::from(left.iter().all(|&l| l == 0));
        }
        let key = (i, left.clone());
        if let Some(v) = memo.get(&key) {
            return *v;
        }
        let mut total = 0u128;
        for g in 0..left.len() {
            if left[g] == 0 || degrees[i][g] == 0 {
                continue;
            }
            left[g] -= 1;
            total += degrees[i][g] as u128 * rec(i + 1, left, degrees, memo);
            left[g] += 1;
        }
        memo.insert(key, total);
        total
    }
    let mut left = sizes.to_vec();
    rec(0, &mut left, degrees, &mut HashMap::new())
}

/// Degree of every equation in every variable group.
pub fn group_degrees(eqs: &[CPoly], groups: &[Vec<usize>]) -> Vec<Vec<u32>> {
    eqs.iter()
        .map(|p| groups.iter().map(|g| p.degree_in(g)).collect())
        .collect()
}

/// Partitions `0..n` by group label; labels must be `0..k` with no gaps.
pub fn partition_groups(labels: &[usize]) -> Result<Vec<Vec<usize>>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (v, &g) in labels.iter().enumerate() {
        out[g].push(v);
    }
    if out.iter().any(Vec::is_empty) {
        return Err(Error::InvalidPartition("empty variable group".into()));
    }
    Ok(out)
}

/// An affine form in the variables of one group.
#[derive(Clone, Debug)]
struct Form {
    coeffs: Vec<C>,
    constant: C,
}

/// Linear-product start system: equation `i` is the product, over groups
/// `g`, of `d_{ig}` random affine forms in the variables of `g`.
pub struct LinearProductStart {
    nvars: usize,
    groups: Vec<Vec<usize>>,
    /// forms[i][g][k]
    forms: Vec<Vec<Vec<Form>>>,
    /// Group chosen for each equation, one entry per admissible pattern.
    patterns: Vec<Vec<usize>>,
    /// Number of start points contributed by each pattern, cumulated.
    offsets: Vec<usize>,
    degrees: Vec<Vec<u32>>,
}

impl LinearProductStart {
    pub fn new(degrees: Vec<Vec<u32>>, groups: Vec<Vec<usize>>, rng: &mut ChaCha8Rng) -> Result<Self> {
        let nvars: usize = groups.iter().map(Vec::len).sum();
        if degrees.len() != nvars {
            return Err(Error::InvalidPartition(format!(
                "{} equations for {nvars} variables",
                degrees.len()
            )));
        }
        if let Some(i) = degrees.iter().position(|d| d.iter().all(|&x| x == 0)) {
            return Err(Error::ZeroDegreeEquation(i));
        }
        let forms = degrees
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&groups)
                    .map(|(&d, g)| {
                        (0..d)
                            .map(|_| Form {
                                coeffs: g.iter().map(|_| random_complex(rng)).collect(),
                                constant: random_complex(rng),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut patterns = Vec::new();
        let mut cur = Vec::with_capacity(nvars);
        let mut left: Vec<usize> = groups.iter().map(Vec::len).collect();
        enumerate_patterns(0, &degrees, &mut left, &mut cur, &mut patterns);
        let mut offsets = Vec::with_capacity(patterns.len() + 1);
        offsets.push(0usize);
        for p in &patterns {
            let n: usize = p
                .iter()
                .enumerate()
                .map(|(i, &g)| degrees[i][g] as usize)
                .product();
            offsets.push(offsets.last().unwrap() + n);
        }
        Ok(LinearProductStart {
            nvars,
            groups,
            forms,
            patterns,
            offsets,
            degrees,
        })
    }
}

fn enumerate_patterns(
    i: usize,
    degrees: &[Vec<u32>],
    left: &mut Vec<usize>,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if i == degrees.len() {
        if left.iter().all(|&l| l == 0) {
            out.push(cur.clone());
        }
        return;
    }
    // Prune: remaining equations must be able to fill the remaining slots.
    let remaining: usize = left.iter().sum();
    if remaining != degrees.len() - i {
        return;
    }
    for g in 0..left.len() {
        if left[g] == 0 || degrees[i][g] == 0 {
            continue;
        }
        left[g] -= 1;
        cur.push(g);
        enumerate_patterns(i + 1, degrees, left, cur, out);
        cur.pop();
        left[g] += 1;
    }
}

impl StartSystem for LinearProductStart {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn num_points(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn point(&self, idx: usize) -> Vec<C> {
        let p = self.offsets.partition_point(|&o| o <= idx) - 1;
        let mut rest = idx - self.offsets[p];
        let pattern = &self.patterns[p];
        // Pick one factor per equation from its assigned group.
        let choice: Vec<usize> = pattern
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let d = self.degrees[i][g] as usize;
                let k = rest % d;
                rest /= d;
                k
            })
            .collect();
        let mut x = vec![C::new(0.0, 0.0); self.nvars];
        for (g, vars) in self.groups.iter().enumerate() {
            let rows: Vec<&Form> = pattern
                .iter()
                .enumerate()
                .filter(|(_, &pg)| pg == g)
                .map(|(i, _)| &self.forms[i][g][choice[i]])
                .collect();
            let n = vars.len();
            let a: Vec<C> = rows.iter().flat_map(|f| f.coeffs.iter().copied()).collect();
            let b: Vec<C> = rows.iter().map(|f| -f.constant).collect();
            let sol = Lu::new(a, n)
                .expect("random start forms are in general position")
                .solve(&b);
            for (v, s) in vars.iter().zip(sol) {
                x[*v] = s;
            }
        }
        x
    }

    fn eval_jac(&self, x: &[C], g: &mut [C], jac: &mut [C]) {
        let n = self.nvars;
        jac.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        let mut vals: Vec<C> = Vec::new();
        let mut owners: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            vals.clear();
            owners.clear();
            for (gi, vars) in self.groups.iter().enumerate() {
                for (k, f) in self.forms[i][gi].iter().enumerate() {
                    let mut v = f.constant;
                    for (c, &var) in f.coeffs.iter().zip(vars) {
                        v += c * x[var];
                    }
                    vals.push(v);
                    owners.push((gi, k));
                }
            }
            let len = vals.len();
            // prefix[j] = Π_{l<j}, suffix[j] = Π_{l≥j}
            let mut prefix = vec![C::new(1.0, 0.0); len + 1];
            for j in 0..len {
                prefix[j + 1] = prefix[j] * vals[j];
            }
            let mut suffix = C::new(1.0, 0.0);
            g[i] = prefix[len];
            for j in (0..len).rev() {
                let others = prefix[j] * suffix;
                let (gi, k) = owners[j];
                for (c, &var) in self.forms[i][gi][k].coeffs.iter().zip(&self.groups[gi]) {
                    jac[i * n + var] += c * others;
                }
                suffix *= vals[j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn check_points(start: &dyn StartSystem) {
        let n = start.nvars();
        let mut g = vec![C::new(0.0, 0.0); n];
        let mut j = vec![C::new(0.0, 0.0); n * n];
        let mut seen: Vec<Vec<C>> = Vec::new();
        for idx in 0..start.num_points() {
            let x = start.point(idx);
            start.eval_jac(&x, &mut g, &mut j);
            assert!(g.iter().all(|v| v.norm() < 1e-10), "point {idx} is not a root");
            assert!(seen.iter().all(|y| y.iter().zip(&x).any(|(a, b)| (a - b).norm() > 1e-8)));
            seen.push(x);
        }
    }

    #[test]
    fn total_degree_points() {
        let s = TotalDegreeStart::new(vec![2], &mut rng()).unwrap();
        assert_eq!(s.num_points(), 2);
        let s = TotalDegreeStart::new(vec![3, 2, 2], &mut rng()).unwrap();
        assert_eq!(s.num_points(), 12);
        check_points(&s);
        assert!(matches!(
            TotalDegreeStart::new(vec![1, 0], &mut rng()),
            Err(Error::ZeroDegreeEquation(1))
        ));
    }

    #[test]
    fn linear_product_points_and_count() {
        let degrees = vec![vec![1, 2], vec![2, 1], vec![1, 1]];
        let groups = vec![vec![0, 1], vec![2]];
        let s = LinearProductStart::new(degrees.clone(), groups, &mut rng()).unwrap();
        let want = multihomogeneous_bezout(&degrees, &[2, 1]);
        assert_eq!(s.num_points() as u128, want);
        // group {2} takes one equation: eq0 gives 2·2·1, eq1 gives 1·1·1, eq2 gives 1·1·2
        assert_eq!(want, 7);
        check_points(&s);
    }

    #[test]
    fn jacobian_of_linear_product_matches_finite_differences() {
        let degrees = vec![vec![2, 1], vec![1, 2], vec![3, 0]];
        let groups = vec![vec![0, 2], vec![1]];
        let s = LinearProductStart::new(degrees, groups, &mut rng()).unwrap();
        let x = vec![C::new(0.3, 0.1), C::new(-0.4, 0.7), C::new(1.1, -0.2)];
        let mut g = vec![C::new(0.0, 0.0); 3];
        let mut j = vec![C::new(0.0, 0.0); 9];
        s.eval_jac(&x, &mut g, &mut j);
        let h = 1e-6;
        for v in 0..3 {
            let mut xp = x.clone();
            xp[v] += h;
            let mut gp = vec![C::new(0.0, 0.0); 3];
            let mut jp = vec![C::new(0.0, 0.0); 9];
            s.eval_jac(&xp, &mut gp, &mut jp);
            for i in 0..3 {
                let fd = (gp[i] - g[i]) / h;
                assert!((fd - j[i * 3 + v]).norm() < 1e-4);
            }
        }
    }

    #[test]
    fn single_group_count_is_the_bezout_number() {
        let degrees = vec![vec![3], vec![2], vec![2]];
        assert_eq!(multihomogeneous_bezout(&degrees, &[3]), bezout_number(&[3, 2, 2]));
    }
}

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::partition::Partition;

/// Schubert-basis multiplication data for the Grassmannian of
/// `r`-dimensional subspaces of an `m`-dimensional space.
///
/// Basis classes σ_λ are indexed by partitions in the `r × (m − r)` box, and
/// the special class σ_k is `c_k` of the universal quotient bundle.
#[derive(Clone, Debug)]
pub struct SchubertBasis {
    pub r: usize,
    pub m: usize,
    basis: Vec<Partition>,
    index: HashMap<Partition, usize>,
    table: Vec<Vec<Vec<(usize, BigInt)>>>,
}

impl SchubertBasis {
    pub fn new(r: usize, m: usize) -> Self {
        assert!(r <= m, "subspace dimension exceeds ambient dimension");
        let basis = Partition::in_box(r, m - r);
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut sb = SchubertBasis {
            r,
            m,
            basis,
            index,
            table: Vec::new(),
        };
        sb.table = sb.build_table();
        sb
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.r * (self.m - self.r)
    }

    pub fn partition(&self, i: usize) -> &Partition {
        &self.basis[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Codimension of basis class `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].size()
    }

    /// Index of the point class σ_box.
    pub fn top_index(&self) -> usize {
        self.index[&Partition::new(vec![self.m - self.r; self.r])]
    }

    /// Structure constants: σ_i · σ_j as (index, coefficient) pairs.
    pub fn product(&self, i: usize, j: usize) -> &[(usize, BigInt)] {
        &self.table[i][j]
    }

    /// Pieri rule: σ_k · σ_λ is the sum of σ_μ over μ ⊇ λ in the box with
    /// μ/λ a horizontal strip of `k` boxes.
    pub fn pieri(&self, k: usize, lambda: &Partition) -> Vec<Partition> {
        let rows = self.r;
        let cols = self.m - self.r;
        let mut out = Vec::new();
        let mut mu = Vec::with_capacity(rows);
        fn rec(
            i: usize,
            left: usize,
            rows: usize,
            cols: usize,
            lambda: &Partition,
            mu: &mut Vec<usize>,
            out: &mut Vec<Partition>,
        ) {
            if i == rows {
                if left == 0 {
                    out.push(Partition::new(mu.clone()));
                }
                return;
            }
            let lo = lambda.part(i);
            let hi = if i == 0 { cols } else { lambda.part(i - 1) };
            if lo > hi {
                return;
            }
            for v in lo..=hi.min(lo + left) {
                mu.push(v);
                rec(i + 1, left - (v - lo), rows, cols, lambda, mu, out);
                mu.pop();
            }
        }
        rec(0, k, rows, cols, lambda, &mut mu, &mut out);
        out
    }

    /// Multiplies a dense coefficient vector by σ_k.
    fn mul_special(&self, v: &[BigInt], k: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.len()];
        if k == 0 {
            out.clone_from_slice(v);
            return out;
        }
        if k > self.m - self.r {
            return out;
        }
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for mu in self.pieri(k, &self.basis[i]) {
                out[self.index[&mu]] += c;
            }
        }
        out
    }

    /// σ_λ · σ_μ by expanding σ_μ with the Giambelli determinant
    /// det(σ_{μ_i + j − i}) and applying Pieri factor by factor.
    fn giambelli_product(&self, lam: usize, mu: &Partition) -> Vec<BigInt> {
        let l = mu.len();
        let mut total = vec![BigInt::zero(); self.len()];
        let mut start = vec![BigInt::zero(); self.len()];
        start[lam] = BigInt::from(1);
        if l == 0 {
            return start;
        }
        for (perm, sign) in permutations(l) {
            let mut cur = start.clone();
            let mut dead = false;
            for (i, &j) in perm.iter().enumerate() {
                let k = mu.part(i) as isize + j as isize - i as isize;
                if k < 0 {
                    dead = true;
                    break;
                }
                cur = self.mul_special(&cur, k as usize);
                if cur.iter().all(|c| c.is_zero()) {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            for (t, c) in total.iter_mut().zip(cur) {
                if sign > 0 {
                    *t += c;
                } else {
                    *t -= c;
                }
            }
        }
        total
    }

    fn build_table(&self) -> Vec<Vec<Vec<(usize, BigInt)>>> {
        let n = self.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    table[i][j] = table[j][i].clone();
                    continue;
                }
                let v = self.giambelli_product(i, &self.basis[j]);
                table[i][j] = v
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
            }
        }
        table
    }
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, sign: &mut i32, out: &mut Vec<(Vec<usize>, i32)>) {
        if k <= 1 {
            out.push((cur.clone(), *sign));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, cur, sign, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heap(k - 1, cur, sign, out);
    }
    let mut sign = 1;
    heap(n, &mut cur, &mut sign, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        for (perm, sign) in p {
            let mut inv = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            assert_eq!(sign, if inv % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn small_products() {
        let p1 = SchubertBasis::new(1, 2);
        let s1 = p1.index_of(&Partition::new(vec![1])).unwrap();
        assert!(p1.product(s1, s1).is_empty());

        let g = SchubertBasis::new(2, 4);
        let s1 = g.index_of(&Partition::new(vec![1])).unwrap();
        let prod: Vec<Partition> = g
            .product(s1, s1)
            .iter()
            .map(|(k, _)| g.partition(*k).clone())
            .collect();
        assert_eq!(prod.len(), 2);
        assert!(prod.contains(&Partition::new(vec![2])));
        assert!(prod.contains(&Partition::new(vec![1, 1])));
    }
}

//! Small dense complex linear algebra for Newton steps.

use crate::systems::C;

/// LU factorization with partial pivoting of a row-major `n × n` matrix.
pub struct Lu {
    n: usize,
    a: Vec<C>,
    piv: Vec<usize>,
}

impl Lu {
    /// `None` when a pivot is exactly zero or not finite.
    pub fn new(mut a: Vec<C>, n: usize) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut piv = (0..n).collect::<Vec<_>>();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))?;
            if !(best > 0.0) || !best.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let d = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / d;
                a[i * n + k] = f;
                if f != C::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= f * u;
                    }
                }
            }
        }
        Some(Lu { n, a, piv })
    }

    pub fn solve(&self, b: &[C]) -> Vec<C> {
        let n = self.n;
        let mut x: Vec<C> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.a[i * n + j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.a[i * n + j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }

    /// Ratio of smallest to largest pivot, a cheap conditioning proxy.
    pub fn pivot_ratio(&self) -> f64 {
        let d: Vec<f64> = (0..self.n).map(|i| self.a[i * self.n + i].norm()).collect();
        let hi = d.iter().copied().fold(0.0, f64::max);
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }
}

/// Least-squares solution of `J d = b` for a row-major `rows × cols` matrix
/// with `rows ≥ cols`, through the normal equations.
pub fn least_squares(j: &[C], rows: usize, cols: usize, b: &[C]) -> Option<Vec<C>> {
    let mut ata = vec![C::new(0.0, 0.0); cols * cols];
    let mut atb = vec![C::new(0.0, 0.0); cols];
    for r in 0..rows {
        let row = &j[r * cols..(r + 1) * cols];
        for p in 0..cols {
            let cp = row[p].conj();
            if cp == C::new(0.0, 0.0) {
                continue;
            }
            atb[p] += cp * b[r];
            for q in 0..cols {
                ata[p * cols + q] += cp * row[q];
            }
        }
    }
    Lu::new(ata, cols).map(|lu| lu.solve(&atb))
}

pub fn norm_inf(x: &[C]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_complex_system() {
        let a = vec![
            C::new(0.0, 0.0),
            C::new(2.0, 1.0),
            C::new(1.0, 0.0),
            C::new(3.0, 0.0),
            C::new(-1.0, 0.5),
            C::new(0.0, 2.0),
            C::new(1.0, 1.0),
            C::new(0.0, 0.0),
            C::new(4.0, 0.0),
        ];
        let x = vec![C::new(1.0, -1.0), C::new(0.5, 2.0), C::new(-3.0, 0.0)];
        let b: Vec<C> = (0..3)
            .map(|i| (0..3).map(|j| a[i * 3 + j] * x[j]).sum())
            .collect();
        let lu = Lu::new(a.clone(), 3).unwrap();
        let got = lu.solve(&b);
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-12);
        }
        let ls = least_squares(&a, 3, 3, &b).unwrap();
        for (g, w) in ls.iter().zip(&x) {
            assert!((g - w).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(2.0, 0.0), C::new(4.0, 0.0)];
        let lu = Lu::new(a, 2);
        assert!(lu.map_or(true, |l| l.pivot_ratio() < 1e-15));
    }
}

//! Predictor-corrector path tracking for `H(x, t) = γ(1 − t) G(x) + t F(x)`.

use serde::{Deserialize, Serialize};

use super::linalg::{norm_inf, Lu};
use super::start::StartSystem;
use super::TrackerConfig;
use crate::systems::{CompiledSystem, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathStatus {
    Converged,
    Diverged,
    /// Reached `t = 1` (or stalled right before it) at an ill-conditioned point.
    Singular,
    StepLimit,
    /// The step size fell below the minimum away from `t = 1`.
    Failed,
}

#[derive(Clone, Debug)]
pub struct PathResult {
    pub status: PathStatus,
    pub x: Vec<C>,
    pub t: f64,
    pub steps: usize,
    /// Pivot ratio of the target Jacobian at the endpoint.
    pub conditioning: f64,
}

pub struct Homotopy<'a> {
    pub target: &'a CompiledSystem,
    pub start: &'a dyn StartSystem,
    pub gamma: C,
}

struct Work {
    f: Vec<C>,
    fj: Vec<C>,
    g: Vec<C>,
    gj: Vec<C>,
    h: Vec<C>,
    hx: Vec<C>,
    ht: Vec<C>,
}

impl Work {
    fn new(n: usize) -> Self {
        let z = C::new(0.0, 0.0);
        Work {
            f: vec![z; n],
            fj: vec![z; n * n],
            g: vec![z; n],
            gj: vec![z; n * n],
            h: vec![z; n],
            hx: vec![z; n * n],
            ht: vec![z; n],
        }
    }
}

impl Homotopy<'_> {
    fn n(&self) -> usize {
        self.target.nvars()
    }

    fn eval(&self, x: &[C], t: f64, w: &mut Work) {
        self.target.eval_jac(x, &mut w.f, &mut w.fj);
        self.start.eval_jac(x, &mut w.g, &mut w.gj);
        let a = self.gamma * (1.0 - t);
        for i in 0..w.h.len() {
            w.h[i] = a * w.g[i] + w.f[i] * t;
            w.ht[i] = w.f[i] - self.gamma * w.g[i];
        }
        for i in 0..w.hx.len() {
            w.hx[i] = a * w.gj[i] + w.fj[i] * t;
        }
    }

    /// Tangent `dx/dt = −H_x⁻¹ H_t`.
    fn tangent(&self, x: &[C], t: f64, w: &mut Work) -> Option<Vec<C>> {
        self.eval(x, t, w);
        let lu = Lu::new(w.hx.clone(), self.n())?;
        let neg: Vec<C> = w.ht.iter().map(|v| -v).collect();
        Some(lu.solve(&neg))
    }

    fn predict(&self, x: &[C], t: f64, h: f64, w: &mut Work) -> Option<Vec<C>> {
        let axpy = |a: &[C], s: f64, b: &[C]| -> Vec<C> {
            a.iter().zip(b).map(|(u, v)| u + v * s).collect()
        };
        let k1 = self.tangent(x, t, w)?;
        let k2 = self.tangent(&axpy(x, h / 2.0, &k1), t + h / 2.0, w)?;
        let k3 = self.tangent(&axpy(x, h / 2.0, &k2), t + h / 2.0, w)?;
        let k4 = self.tangent(&axpy(x, h, &k3), t + h, w)?;
        Some(
            (0..x.len())
                .map(|i| x[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
                .collect(),
        )
    }

    /// Newton on `H(·, t)`; succeeds when the last correction is below
    /// `tol (1 + |x|)` with contracting iterates.
    fn correct(&self, x: &mut [C], t: f64, tol: f64, max_iter: usize, w: &mut Work) -> bool {
        let mut prev = f64::INFINITY;
        for _ in 0..max_iter {
            self.eval(x, t, w);
            let Some(lu) = Lu::new(w.hx.clone(), self.n()) else {
                return false;
            };
            let neg: Vec<C> = w.h.iter().map(|v| -v).collect();
            let d = lu.solve(&neg);
            let dn = norm_inf(&d);
            if !dn.is_finite() {
                return false;
            }
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
            let scale = 1.0 + norm_inf(x);
            if dn <= tol * scale {
                return true;
            }
            if dn > 0.5 * prev {
                return false;
            }
            prev = dn;
        }
        false
    }
}

pub fn track(hom: &Homotopy<'_>, x0: Vec<C>, cfg: &TrackerConfig) -> PathResult {
    let n = hom.n();
    let mut w = Work::new(n);
    let mut x = x0;
    let mut t = 0.0f64;
    let mut h = cfg.max_step.min(0.05);
    let mut streak = 0;
    let mut steps = 0;
    let result = |status, x: Vec<C>, t, steps, w: &mut Work| {
        hom.target.eval_jac(&x, &mut w.f, &mut w.fj);
        let conditioning = Lu::new(w.fj.clone(), n).map_or(0.0, |lu| lu.pivot_ratio());
        PathResult {
            status,
            x,
            t,
            steps,
            conditioning,
        }
    };
    while t < 1.0 {
        if steps >= cfg.max_steps {
            return result(PathStatus::StepLimit, x, t, steps, &mut w);
        }
        steps += 1;
        let step = h.min(1.0 - t);
        let t_next = if step == 1.0 - t { 1.0 } else { t + step };
        let accepted = match hom.predict(&x, t, step, &mut w) {
            Some(mut xp) if xp.iter().all(|v| v.re.is_finite() && v.im.is_finite()) => {
                if hom.correct(&mut xp, t_next, cfg.tracking_tol, 3, &mut w) {
                    x = xp;
                    t = t_next;
                    true
                } else {
                    false
                }
            }
            _ => false,
        };
        if accepted {
            if norm_inf(&x) > cfg.divergence_threshold {
                return result(PathStatus::Diverged, x, t, steps, &mut w);
            }
            streak += 1;
            if streak >= 3 {
                h = (h * 2.0).min(cfg.max_step);
                streak = 0;
            }
        } else {
            streak = 0;
            h /= 2.0;
            if h < cfg.min_step {
                let status = if norm_inf(&x) > cfg.divergence_threshold.sqrt() && t > 0.9 {
                    PathStatus::Diverged
                } else if t > 0.9 {
                    PathStatus::Singular
                } else {
                    PathStatus::Failed
                };
                return result(status, x, t, steps, &mut w);
            }
        }
    }
    let mut out = result(PathStatus::Converged, x, t, steps, &mut w);
    if out.conditioning < cfg.singular_threshold {
        out.status = PathStatus::Singular;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::start::{StartSystem, TotalDegreeStart};
    use super::*;
    use crate::systems::CPoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> TrackerConfig {
        TrackerConfig::default()
    }

    #[test]
    fn univariate_square_roots() {
        let x = CPoly::var(1, 0);
        let f = &x.pow(2) - &CPoly::constant(1, 4.0);
        let target = CompiledSystem::new(&[f], 1);
        let start = TotalDegreeStart::new(vec![2], &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let hom = Homotopy {
            target: &target,
            start: &start,
            gamma: C::from_polar(1.0, 0.7),
        };
        let mut ends: Vec<f64> = (0..2)
            .map(|i| {
                let r = track(&hom, start.point(i), &cfg());
                assert_eq!(r.status, PathStatus::Converged);
                assert!(r.x[0].im.abs() < 1e-10);
                r.x[0].re
            })
            .collect();
        ends.sort_by(f64::total_cmp);
        assert!((ends[0] + 2.0).abs() < 1e-10 && (ends[1] - 2.0).abs() < 1e-10);
    }

    /// A start system given by explicit polynomials and points.
    struct Explicit {
        sys: CompiledSystem,
        points: Vec<Vec<C>>,
    }

    impl StartSystem for Explicit {
        fn nvars(&self) -> usize {
            self.sys.nvars()
        }
        fn num_points(&self) -> usize {
            self.points.len()
        }
        fn point(&self, idx: usize) -> Vec<C> {
            self.points[idx].clone()
        }
        fn eval_jac(&self, x: &[C], g: &mut [C], jac: &mut [C]) {
            self.sys.eval_jac(x, g, jac)
        }
    }

    #[test]
    fn identity_homotopy_stays_put() {
        let x = CPoly::var(2, 0);
        let y = CPoly::var(2, 1);
        let eqs = vec![
            &(&x * &y) - &CPoly::constant(2, 2.0),
            &x.pow(2) - &y,
        ];
        // x³ = 2, y = x²
        let x0 = C::new(2f64.cbrt(), 0.0);
        let start = Explicit {
            sys: CompiledSystem::new(&eqs, 2),
            points: vec![vec![x0, x0 * x0]],
        };
        let target = CompiledSystem::new(&eqs, 2);
        let hom = Homotopy {
            target: &target,
            start: &start,
            gamma: C::new(1.0, 0.0),
        };
        let r = track(&hom, start.point(0), &cfg());
        assert_eq!(r.status, PathStatus::Converged);
        assert!((r.x[0] - x0).norm() < 1e-12 && (r.x[1] - x0 * x0).norm() < 1e-12);
    }

    #[test]
    fn random_linear_system_matches_direct_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        use rand::Rng;
        let n = 4;
        let a: Vec<C> = (0..n * n)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let b: Vec<C> = (0..n)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let eqs: Vec<CPoly> = (0..n)
            .map(|i| {
                let mut p = CPoly::constant(n, -b[i]);
                for j in 0..n {
                    p = &p + &CPoly::var(n, j).scale(a[i * n + j]);
                }
                p
            })
            .collect();
        let want = Lu::new(a, n).unwrap().solve(&b);
        let target = CompiledSystem::new(&eqs, n);
        let start = TotalDegreeStart::new(vec![1; n], &mut rng).unwrap();
        let hom = Homotopy {
            target: &target,
            start: &start,
            gamma: C::from_polar(1.0, 2.1),
        };
        let r = track(&hom, start.point(0), &cfg());
        assert_eq!(r.status, PathStatus::Converged);
        for (g, w) in r.x.iter().zip(&want) {
            assert!((g - w).norm() < 1e-10);
        }
    }

    #[test]
    fn paths_to_infinity_diverge() {
        // x² − 1 = 0 has two roots while the start system (degree 3) has three.
        let x = CPoly::var(1, 0);
        let f = &(&x.pow(2) - &CPoly::constant(1, 1.0)) + &x.pow(3).scale(0.0);
        let target = CompiledSystem::new(&[f], 1);
        let start = TotalDegreeStart::new(vec![3], &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let hom = Homotopy {
            target: &target,
            start: &start,
            gamma: C::from_polar(1.0, 1.3),
        };
        let statuses: Vec<PathStatus> = (0..3).map(|i| track(&hom, start.point(i), &cfg()).status).collect();
        assert_eq!(statuses.iter().filter(|s| **s == PathStatus::Converged).count(), 2);
        assert_eq!(statuses.iter().filter(|s| **s == PathStatus::Diverged).count(), 1);
    }
}

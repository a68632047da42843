//! Homotopy continuation: start systems, path tracking, endpoint
//! post-processing and count reconciliation.

pub mod classify;
pub mod linalg;
pub mod start;
pub mod tracker;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{objective, residual, CPoly, CompiledSystem, PolySystem, C};
pub use classify::{classify, Classification};
use linalg::{least_squares, norm_inf, Lu};
use start::{
    bezout_number, group_degrees, multihomogeneous_bezout, partition_groups, LinearProductStart,
    StartSystem, TotalDegreeStart,
};
pub use tracker::{track, Homotopy, PathResult, PathStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    TotalDegree,
    Multihomogeneous,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub tracking_tol: f64,
    pub newton_tol: f64,
    /// Relative distance below which two solutions are the same.
    pub dedup_tol: f64,
    /// Largest relative imaginary part of a real solution.
    pub real_tol: f64,
    /// Largest relative residual on the full system.
    pub residual_tol: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub divergence_threshold: f64,
    /// Pivot ratio of the Jacobian below which an endpoint is singular.
    pub singular_threshold: f64,
    pub start: StartKind,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub seed: u64,
    /// Refuse to run when the start system has more paths than this.
    pub max_paths: u128,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            tracking_tol: 1e-10,
            newton_tol: 1e-12,
            dedup_tol: 1e-6,
            real_tol: 1e-8,
            residual_tol: 1e-8,
            min_step: 1e-14,
            max_step: 0.1,
            max_steps: 10_000,
            divergence_threshold: 1e8,
            singular_threshold: 1e-12,
            start: StartKind::Multihomogeneous,
            threads: 0,
            seed: 1,
            max_paths: 1_000_000,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            self.tracking_tol,
            self.newton_tol,
            self.dedup_tol,
            self.real_tol,
            self.residual_tol,
            self.min_step,
            self.max_step,
        ];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::OutOfRange("tolerances must be positive".into()));
        }
        if self.dedup_tol <= self.newton_tol {
            return Err(Error::OutOfRange("dedup tolerance must exceed the Newton tolerance".into()));
        }
        if self.min_step > self.max_step {
            return Err(Error::OutOfRange("min step exceeds max step".into()));
        }
        Ok(())
    }

    /// The random unit constant `γ = exp(2πi u)` for this seed.
    pub fn gamma(&self) -> C {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let u: f64 = rng.gen();
        C::from_polar(1.0, std::f64::consts::TAU * u)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub total: usize,
    pub converged: usize,
    pub diverged: usize,
    pub singular: usize,
    pub step_limit: usize,
    pub failed: usize,
    /// Endpoints dropped for their residual on the full system.
    pub filtered_residual: usize,
    /// Endpoints dropped on the degenerate locus.
    pub filtered_degenerate: usize,
    pub duplicates: usize,
    /// Solutions whose image under the symmetry was not found.
    pub unmatched_symmetry: usize,
    /// Distinct solutions before the symmetry quotient.
    pub raw_solutions: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// Solution in the system variables.
    pub vars: Vec<C>,
    /// Structural coordinates of the matrix.
    pub coords: Vec<C>,
    pub x: Vec<Vec<C>>,
    pub residual: f64,
    pub is_real: bool,
    pub class: Option<Classification>,
    pub objective: Option<f64>,
    /// The path ended at an ill-conditioned point.
    pub multiplicity_flag: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionSet {
    pub points: Vec<CriticalPoint>,
    pub stats: PathStats,
    pub predicted: Option<u64>,
    pub agreement: Option<bool>,
    pub warnings: Vec<String>,
}

impl SolutionSet {
    pub fn n_complex(&self) -> usize {
        self.points.len()
    }

    pub fn n_real(&self) -> usize {
        self.points.iter().filter(|p| p.is_real).count()
    }

    pub fn n_local_min(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.class == Some(Classification::LocalMin))
            .count()
    }

    pub fn n_ambiguous(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.class == Some(Classification::Ambiguous))
            .count()
    }

    /// Real point of smallest objective.
    pub fn closest(&self) -> Option<&CriticalPoint> {
        self.points
            .iter()
            .filter(|p| p.objective.is_some())
            .min_by(|a, b| a.objective.unwrap().total_cmp(&b.objective.unwrap()))
    }

    /// Number of non-real points whose conjugate is not in the set.
    pub fn unpaired_conjugates(&self, tol: f64) -> usize {
        self.points
            .iter()
            .filter(|p| !p.is_real)
            .filter(|p| {
                let conj: Vec<C> = p.coords.iter().map(|c| c.conj()).collect();
                !self.points.iter().any(|q| close(&q.coords, &conj, tol))
            })
            .count()
    }
}

/// `|a − b|∞ ≤ tol (1 + max(|a|∞, |b|∞))`.
pub fn close(a: &[C], b: &[C], tol: f64) -> bool {
    let scale = 1.0 + norm_inf(a).max(norm_inf(b));
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * scale)
}

fn flatten(x: &[Vec<C>]) -> Vec<C> {
    x.iter().flatten().copied().collect()
}

/// Equal as sets of matrices at the given relative tolerance.
pub fn same_matrix_sets(a: &[Vec<Vec<C>>], b: &[Vec<Vec<C>>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let bf: Vec<Vec<C>> = b.iter().map(|x| flatten(x)).collect();
    let mut used = vec![false; b.len()];
    for x in a {
        let xf = flatten(x);
        match (0..bf.len()).find(|&j| !used[j] && close(&xf, &bf[j], tol)) {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

fn normalized(eqs: &[CPoly]) -> Vec<CPoly> {
    eqs.iter()
        .map(|p| {
            let m = p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            if m > 0.0 {
                p.scale(1.0 / m)
            } else {
                p.clone()
            }
        })
        .collect()
}

/// Number of paths the configured start system would track.
pub fn path_count(sys: &PolySystem, kind: StartKind) -> Result<u128> {
    let sq = sys.square();
    match kind {
        StartKind::TotalDegree => Ok(bezout_number(&sq.iter().map(CPoly::degree).collect::<Vec<_>>())),
        StartKind::Multihomogeneous => {
            let groups = partition_groups(&sys.groups)?;
            let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
            Ok(multihomogeneous_bezout(&group_degrees(sq, &groups), &sizes))
        }
    }
}

fn build_start(sys: &PolySystem, cfg: &TrackerConfig, rng: &mut ChaCha8Rng) -> Result<Box<dyn StartSystem>> {
    let sq = sys.square();
    if sq.len() != sys.nvars() {
        return Err(Error::InvalidInstance(format!(
            "tracked system has {} equations in {} variables",
            sq.len(),
            sys.nvars()
        )));
    }
    let paths = path_count(sys, cfg.start)?;
    if paths > cfg.max_paths {
        return Err(Error::PathBudget {
            paths,
            limit: cfg.max_paths,
        });
    }
    Ok(match cfg.start {
        StartKind::TotalDegree => Box::new(TotalDegreeStart::new(
            sq.iter().map(CPoly::degree).collect(),
            rng,
        )?),
        StartKind::Multihomogeneous => {
            let groups = partition_groups(&sys.groups)?;
            Box::new(LinearProductStart::new(group_degrees(sq, &groups), groups, rng)?)
        }
    })
}

fn run_paths(
    target: &CompiledSystem,
    start: &dyn StartSystem,
    gamma: C,
    cfg: &TrackerConfig,
) -> Result<Vec<PathResult>> {
    let hom = Homotopy {
        target,
        start,
        gamma,
    };
    let work = || {
        (0..start.num_points())
            .into_par_iter()
            .map(|i| track(&hom, start.point(i), cfg))
            .collect::<Vec<_>>()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.threads > 0 {
        builder = builder.num_threads(cfg.threads);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    Ok(pool.install(work))
}

/// Newton on the square system, then Gauss-Newton on the full system.
fn refine(
    square: &CompiledSystem,
    full: &CompiledSystem,
    x0: &[C],
    cfg: &TrackerConfig,
) -> Vec<C> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut f = vec![C::new(0.0, 0.0); n];
    let mut j = vec![C::new(0.0, 0.0); n * n];
    for _ in 0..8 {
        square.eval_jac(&x, &mut f, &mut j);
        let Some(lu) = Lu::new(j.clone(), n) else { break };
        let neg: Vec<C> = f.iter().map(|v| -v).collect();
        let d = lu.solve(&neg);
        let dn = norm_inf(&d);
        if !dn.is_finite() {
            break;
        }
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += di;
        }
        if dn <= cfg.newton_tol * (1.0 + norm_inf(&x)) {
            break;
        }
    }
    if full.neqs() > n {
        let rows = full.neqs();
        let mut f = vec![C::new(0.0, 0.0); rows];
        let mut j = vec![C::new(0.0, 0.0); rows * n];
        for _ in 0..4 {
            full.eval_jac(&x, &mut f, &mut j);
            let neg: Vec<C> = f.iter().map(|v| -v).collect();
            let Some(d) = least_squares(&j, rows, n, &neg) else { break };
            let dn = norm_inf(&d);
            if !dn.is_finite() {
                break;
            }
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
            if dn <= cfg.newton_tol * (1.0 + norm_inf(&x)) {
                break;
            }
        }
    }
    x
}

/// Largest equation value relative to the size of its terms.
pub fn relative_residual(eqs: &[CPoly], x: &[C]) -> f64 {
    eqs.iter()
        .map(|p| p.eval(x).norm() / (1.0 + p.abs_term_sum(x)))
        .fold(0.0, f64::max)
}

fn canonical_key(p: &CriticalPoint) -> Vec<f64> {
    let g = 1e-8;
    p.coords
        .iter()
        .chain(&p.vars)
        .flat_map(|c| [(c.re / g).round(), (c.im / g).round()])
        .collect()
}

fn canonical_sort(points: &mut [CriticalPoint]) {
    points.sort_by(|a, b| {
        let (ka, kb) = (canonical_key(a), canonical_key(b));
        ka.iter()
            .zip(&kb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

fn make_point(sys: &PolySystem, vars: Vec<C>, flagged: bool, cfg: &TrackerConfig) -> CriticalPoint {
    let coords = sys.coordinates_at(&vars);
    let x = sys.primal.structure.to_matrix(&coords, C::new(0.0, 0.0));
    let is_real = coords.iter().all(|c| c.im.abs() <= cfg.real_tol * (1.0 + norm_inf(&coords)));
    let (class, obj) = if is_real {
        let xr: Vec<Vec<C>> = x.iter().map(|r| r.iter().map(|v| C::new(v.re, 0.0)).collect()).collect();
        (
            Some(classify(sys, &vars)),
            Some(objective(&xr, &sys.primal.u, &sys.primal.weights)),
        )
    } else {
        (None, None)
    };
    CriticalPoint {
        residual: residual(sys, &vars),
        vars,
        coords,
        x,
        is_real,
        class,
        objective: obj,
        multiplicity_flag: flagged,
    }
}

/// Tracks every path of the configured start system and post-processes the
/// endpoints into distinct critical points.
pub fn solve(sys: &PolySystem, cfg: &TrackerConfig) -> Result<SolutionSet> {
    cfg.validate()?;
    let n = sys.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gamma = C::from_polar(1.0, std::f64::consts::TAU * rng.gen::<f64>());
    let start = build_start(sys, cfg, &mut rng)?;
    let sq = normalized(sys.square());
    let target = CompiledSystem::new(&sq, n);
    let full = CompiledSystem::new(&normalized(&sys.equations), n);
    let results = run_paths(&target, start.as_ref(), gamma, cfg)?;

    let mut stats = PathStats {
        total: results.len(),
        ..Default::default()
    };
    let mut candidates: Vec<(Vec<C>, bool)> = Vec::new();
    for r in &results {
        match r.status {
            PathStatus::Converged => stats.converged += 1,
            PathStatus::Diverged => stats.diverged += 1,
            PathStatus::Singular => stats.singular += 1,
            PathStatus::StepLimit => stats.step_limit += 1,
            PathStatus::Failed => stats.failed += 1,
        }
        if !matches!(r.status, PathStatus::Converged | PathStatus::Singular) {
            continue;
        }
        let x = refine(&target, &full, &r.x, cfg);
        if !(relative_residual(&sys.equations, &x) <= cfg.residual_tol) {
            stats.filtered_residual += 1;
            continue;
        }
        if sys.is_degenerate(&x) {
            stats.filtered_degenerate += 1;
            continue;
        }
        candidates.push((x, r.status == PathStatus::Singular));
    }
    let accounted = stats.converged + stats.diverged + stats.singular + stats.step_limit + stats.failed;
    if accounted != stats.total {
        return Err(Error::InconsistentCount(format!(
            "{accounted} classified paths out of {}",
            stats.total
        )));
    }

    let mut distinct: Vec<(Vec<C>, bool)> = Vec::new();
    for (x, flag) in candidates {
        if let Some(d) = distinct.iter_mut().find(|(y, _)| close(y, &x, cfg.dedup_tol)) {
            stats.duplicates += 1;
            d.1 |= flag;
        } else {
            distinct.push((x, flag));
        }
    }
    stats.raw_solutions = distinct.len();

    let mut warnings = Vec::new();
    let reps: Vec<(Vec<C>, bool)> = match &sys.symmetry {
        None => distinct,
        Some(perm) => {
            let mut taken = vec![false; distinct.len()];
            let mut out = Vec::new();
            for i in 0..distinct.len() {
                if taken[i] {
                    continue;
                }
                taken[i] = true;
                let image: Vec<C> = perm.iter().map(|&v| distinct[i].0[v]).collect();
                match (0..distinct.len()).find(|&j| !taken[j] && close(&distinct[j].0, &image, cfg.dedup_tol)) {
                    Some(j) => taken[j] = true,
                    None => stats.unmatched_symmetry += 1,
                }
                out.push(distinct[i].clone());
            }
            if stats.unmatched_symmetry > 0 {
                warnings.push(format!(
                    "{} solutions have no partner under the symmetry",
                    stats.unmatched_symmetry
                ));
            }
            out
        }
    };

    let mut points: Vec<CriticalPoint> = reps
        .into_iter()
        .map(|(x, flag)| make_point(sys, x, flag, cfg))
        .collect();
    canonical_sort(&mut points);
    if stats.singular > 0 {
        warnings.push(format!("{} paths ended at singular points", stats.singular));
    }
    if stats.failed + stats.step_limit > 0 {
        warnings.push(format!(
            "{} paths failed to reach t = 1",
            stats.failed + stats.step_limit
        ));
    }
    Ok(SolutionSet {
        points,
        stats,
        predicted: None,
        agreement: None,
        warnings,
    })
}

/// Union of solution sets of the same problem (e.g. different charts),
/// identifying points with the same matrix.
pub fn merge(sets: Vec<SolutionSet>, cfg: &TrackerConfig) -> SolutionSet {
    let mut stats = PathStats::default();
    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut warnings = Vec::new();
    for s in sets {
        stats.total += s.stats.total;
        stats.converged += s.stats.converged;
        stats.diverged += s.stats.diverged;
        stats.singular += s.stats.singular;
        stats.step_limit += s.stats.step_limit;
        stats.failed += s.stats.failed;
        stats.filtered_residual += s.stats.filtered_residual;
        stats.filtered_degenerate += s.stats.filtered_degenerate;
        stats.duplicates += s.stats.duplicates;
        stats.unmatched_symmetry += s.stats.unmatched_symmetry;
        warnings.extend(s.warnings);
        for p in s.points {
            if points.iter().any(|q| close(&q.coords, &p.coords, cfg.dedup_tol)) {
                stats.duplicates += 1;
            } else {
                points.push(p);
            }
        }
    }
    stats.raw_solutions = points.len();
    canonical_sort(&mut points);
    SolutionSet {
        points,
        stats,
        predicted: None,
        agreement: None,
        warnings,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Reconciliation {
    pub found: usize,
    pub predicted: u64,
    pub agreement: bool,
    pub message: String,
}

/// Compares the number of critical points with a predicted ED degree.
pub fn reconcile(set: &mut SolutionSet, predicted: u64) -> Reconciliation {
    let found = set.n_complex();
    let agreement = found as u64 == predicted;
    set.predicted = Some(predicted);
    set.agreement = Some(agreement);
    let s = &set.stats;
    let message = if agreement {
        format!("{found} critical points, as predicted")
    } else {
        format!(
            "found {found}, predicted {predicted}; paths: {} total, {} converged, {} diverged, {} singular, {} failed, {} filtered by residual, {} on the degenerate locus; rerun with another seed, or the data may be special",
            s.total,
            s.converged,
            s.diverged,
            s.singular,
            s.failed + s.step_limit,
            s.filtered_residual,
            s.filtered_degenerate
        )
    };
    Reconciliation {
        found,
        predicted,
        agreement,
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::{hankel_instance, Instance, Rat, WeightKind};
    use crate::systems::{eckart_young, hankel_rank1, normal_space, primal_corank1, rank1_parametric};

    fn dense(u: &str, w: &str, r: usize) -> Instance {
        let v: serde_json::Value = serde_json::from_str(u).unwrap();
        let m = v.as_array().unwrap().len();
        let n = v[0].as_array().unwrap().len();
        Instance::from_json(&format!(
            r#"{{"m":{m},"n":{n},"r":{r},"family":"dense","U":{u},"weights":{w}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = TrackerConfig::default();
        assert!(c.validate().is_ok());
        c.dedup_tol = 1e-13;
        assert!(c.validate().is_err());
        assert!((TrackerConfig::default().gamma().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_corank_one_recovers_singular_value_truncations() {
        let inst = dense("[[3,0,0],[0,2,0],[0,0,1]]", "[[1,1,1],[1,1,1],[1,1,1]]", 2);
        let sys = normal_space(&inst, Some(3)).unwrap();
        let set = solve(&sys, &TrackerConfig::default()).unwrap();
        assert_eq!(set.n_complex(), 3, "{:?}", set.stats);
        assert_eq!(set.n_real(), 3);
        assert_eq!(set.n_local_min(), 1);
        let best = set.closest().unwrap();
        let ey = eckart_young(&inst.u_f64(), 2);
        for i in 0..3 {
            for j in 0..3 {
                assert!((best.x[i][j].re - ey[i][j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn two_by_two_primal_eckart_young() {
        let inst = dense("[[3,0],[0,1]]", "[[1,1],[1,1]]", 1);
        let sys = primal_corank1(&inst).unwrap();
        let set = solve(&sys, &TrackerConfig::default()).unwrap();
        assert_eq!(set.n_complex(), 2);
        let objs: Vec<f64> = set.points.iter().map(|p| p.objective.unwrap()).collect();
        assert!(objs.iter().any(|o| (o - 1.0).abs() < 1e-9));
        assert!(objs.iter().any(|o| (o - 9.0).abs() < 1e-9));
    }

    #[test]
    fn hankel_theta_count() {
        let data = [7, -3, 5, 2, -4].map(Rat::int);
        let inst = hankel_instance(&data, 1, WeightKind::Theta).unwrap();
        let set = solve(&hankel_rank1(&inst).unwrap(), &TrackerConfig::default()).unwrap();
        assert_eq!(set.n_complex(), 4, "{:?}", set.stats);
        assert_eq!(set.unpaired_conjugates(1e-6), 0);
    }

    #[test]
    fn determinism_across_thread_counts() {
        let inst = dense("[[1,-4,2],[3,5,-1]]", "[[2,7,1],[4,3,9]]", 1);
        let sys = rank1_parametric(&inst).unwrap();
        let one = solve(&sys, &TrackerConfig { threads: 1, ..Default::default() }).unwrap();
        let two = solve(&sys, &TrackerConfig { threads: 2, ..Default::default() }).unwrap();
        assert_eq!(one.n_complex(), two.n_complex());
        for (a, b) in one.points.iter().zip(&two.points) {
            assert_eq!(a.vars, b.vars);
        }
    }

    #[test]
    fn path_budget_is_enforced() {
        let inst = dense("[[1,-4,2],[3,5,-1],[2,2,7]]", "[[2,7,1],[4,3,9],[1,1,1]]", 2);
        let sys = primal_corank1(&inst).unwrap();
        let cfg = TrackerConfig {
            max_paths: 100,
            ..Default::default()
        };
        assert!(matches!(solve(&sys, &cfg), Err(Error::PathBudget { .. })));
        assert_eq!(path_count(&sys, StartKind::Multihomogeneous).unwrap(), 6912);
    }
}

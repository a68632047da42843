//! The `solve` command: build a polynomial system for an instance, track all
//! paths, and reconcile the count against an expectation or the exact engine.

use std::time::Instant;

use ed_slra::eddegree::{self, EdDegreeQuery};
use ed_slra::solver::{self, SolutionSet, StartKind, TrackerConfig};
use ed_slra::structured::{
    hankel_weights, sylvester_weights, Family, Instance, WeightKind, WeightMatrix,
};
use ed_slra::systems::{
    catalecticant_rank2, dual_rank1, hankel_rank1, normal_space, primal_corank1, rank1_parametric,
    PolySystem,
};
use serde::Serialize;
use serde_json::json;

use crate::report::RunReport;
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationChoice {
    /// Pick from the family, rank and constraints.
    Auto,
    /// Lagrange multipliers on the determinant (square corank-one only).
    Primal,
    /// Kernel charts of the normal space; any rank.
    Normal,
    /// Rank-one parametrization, applied to the dual data for corank one.
    DualRank1,
    /// `x_i = s t^i` for rank-one Hankel matrices.
    HankelRank1,
    /// Rank-two ternary quartics.
    Catalecticant,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub formulation: FormulationChoice,
    /// Replaces the instance weights by a named family.
    pub weights: Option<WeightKind>,
    /// Replaces the instance rank.
    pub rank: Option<usize>,
    /// Random kernel charts for the normal formulation; identity charts when absent.
    pub chart_seed: Option<u64>,
    pub expect: Option<u64>,
    pub real_only: bool,
    pub config: TrackerConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            formulation: FormulationChoice::Auto,
            weights: None,
            rank: None,
            chart_seed: None,
            expect: None,
            real_only: false,
            config: TrackerConfig::default(),
        }
    }
}

/// Applies `--weights` and `--r`.
pub fn apply_overrides(inst: &mut Instance, opts: &SolveOptions) -> CliResult<()> {
    if let Some(r) = opts.rank {
        inst.r = r;
    }
    if let Some(kind) = opts.weights {
        inst.weights = match inst.family {
            Family::Hankel => {
                let order = inst.params.hankel_order.unwrap_or(inst.m + inst.n - 1);
                hankel_weights(order, kind)?
            }
            Family::Sylvester => {
                let p = inst
                    .params
                    .sylvester
                    .ok_or_else(|| CliError::Usage("Sylvester instance lacks params".into()))?;
                sylvester_weights(p.m, p.n, p.k, kind)?
            }
            Family::Dense if kind == WeightKind::Ones => WeightMatrix::ones(inst.m, inst.n),
            _ => {
                return Err(CliError::Usage(format!(
                    "weights {kind:?} are not defined for the {:?} family",
                    inst.family
                )))
            }
        };
    }
    inst.validate()?;
    Ok(())
}

pub fn resolve_formulation(inst: &Instance, choice: FormulationChoice) -> FormulationChoice {
    if choice != FormulationChoice::Auto {
        return choice;
    }
    let corank1 = inst.r + 1 == inst.m.min(inst.n);
    match inst.family {
        Family::Catalecticant => FormulationChoice::Catalecticant,
        Family::Hankel if inst.r == 1 && inst.constraints.is_empty() => FormulationChoice::HankelRank1,
        Family::Dense if inst.r == 1 && inst.constraints.is_empty() => FormulationChoice::DualRank1,
        Family::Hankel | Family::Sylvester if corank1 && inst.m == inst.n => FormulationChoice::Primal,
        _ => FormulationChoice::Normal,
    }
}

pub fn build_system(inst: &Instance, opts: &SolveOptions) -> CliResult<PolySystem> {
    let sys = match resolve_formulation(inst, opts.formulation) {
        FormulationChoice::Primal => primal_corank1(inst)?,
        FormulationChoice::Normal => normal_space(inst, opts.chart_seed)?,
        FormulationChoice::DualRank1 if inst.r == 1 => rank1_parametric(inst)?,
        FormulationChoice::DualRank1 => dual_rank1(inst)?,
        FormulationChoice::HankelRank1 => hankel_rank1(inst)?,
        FormulationChoice::Catalecticant => catalecticant_rank2(inst, None)?,
        FormulationChoice::Auto => unreachable!("resolved above"),
    };
    Ok(sys)
}

/// ED degree the exact engine predicts for this instance, with its basis.
/// `None` when no formula applies (special weights, mixed sections, ...).
pub fn predicted_ed_degree(inst: &Instance) -> Option<(u64, &'static str)> {
    let s = inst.constraints.len();
    let affine = inst.constraints.iter().filter(|c| c.is_affine()).count();
    let section = match affine {
        0 => eddegree::SectionKind::Linear,
        a if a == s => eddegree::SectionKind::Affine,
        _ => return None,
    };
    let w = &inst.weights.0;
    let unit = w.iter().flatten().all(|x| x == &w[0][0]);
    let to_u64 = |v: num_bigint::BigInt| u64::try_from(v).ok();
    match inst.family {
        Family::Dense => {
            let mut q = EdDegreeQuery {
                m: inst.m,
                n: inst.n,
                r: inst.r,
                s,
                section,
                weights: eddegree::WeightKind::Generic,
            };
            if !unit {
                return Some((to_u64(eddegree::ed_degree(&q).ok()?.value)?, "generic weights"));
            }
            if s == 0 {
                // Eckart-Young: one critical point per choice of r singular values.
                let k = inst.m.min(inst.n) as u64;
                let binom = (0..inst.r as u64).fold(1u64, |acc, i| acc * (k - i) / (i + 1));
                return Some((binom, "unit weights, singular value truncations"));
            }
            q.weights = eddegree::WeightKind::Unit;
            let v = eddegree::ed_degree(&q).ok()?;
            Some((to_u64(v.value)?, "unit weights, conjecture-based"))
        }
        Family::Hankel if s == 0 => {
            let order = inst.params.hankel_order?;
            let omega = hankel_weights(order, WeightKind::Omega).ok()?;
            if inst.weights != omega {
                return None;
            }
            let v = eddegree::hankel_ed_generic(order - 1, inst.r).ok()?;
            Some((to_u64(v)?, "Hankel, coordinate metric"))
        }
        _ => None,
    }
}

/// Runs the solver and assembles the report.
pub fn solve_instance(inst: &Instance, opts: &SolveOptions, command: &str) -> CliResult<(RunReport, SolutionSet)> {
    let started = Instant::now();
    let formulation = resolve_formulation(inst, opts.formulation);
    let sys = build_system(inst, opts)?;
    let n_paths = solver::path_count(&sys, opts.config.start)?;
    let mut set = solver::solve(&sys, &opts.config)?;

    let mut report = RunReport::new(command).with_solution(&opts.config, &set, opts.real_only);
    report.config = json!({
        "formulation": formulation,
        "start_paths": n_paths.to_string(),
        "rank": inst.r,
        "chart_seed": opts.chart_seed,
        "tracker": opts.config,
    });
    let predicted = predicted_ed_degree(inst);
    let mut expected = serde_json::Map::new();
    if let Some((p, basis)) = predicted {
        let rec = solver::reconcile(&mut set, p);
        expected.insert("predicted".into(), json!(p));
        expected.insert("predicted_basis".into(), json!(basis));
        report.diagnostics.push(rec.message);
        report.agreement = Some(rec.agreement);
    }
    if let Some(e) = opts.expect {
        expected.insert("n_complex".into(), json!(e));
        let ok = set.n_complex() as u64 == e;
        report.agreement = Some(ok);
        if !ok {
            report.failed = true;
            report.diagnostics.push(format!(
                "expected {e} critical points, found {}; rerun with another --seed, or the instance may be special",
                set.n_complex()
            ));
        }
    }
    if !expected.is_empty() {
        report.expected = Some(expected.into());
    }
    report.wall_ms = started.elapsed().as_millis() as u64;
    Ok((report, set))
}

pub fn tracker_defaults(start: Option<StartKind>) -> TrackerConfig {
    let mut c = TrackerConfig::default();
    if let Some(s) = start {
        c.start = s;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use ed_slra::structured::{hankel_instance, random_dense, Rat};

    #[test]
    fn automatic_formulations() {
        let dense = random_dense(3, 3, 1, false, 1);
        assert_eq!(resolve_formulation(&dense, FormulationChoice::Auto), FormulationChoice::DualRank1);
        let mut corank = dense.clone();
        corank.r = 2;
        assert_eq!(resolve_formulation(&corank, FormulationChoice::Auto), FormulationChoice::Normal);
        let h = hankel_instance(&[1, 2, 3, 4, 6].map(Rat::int), 2, WeightKind::Omega).unwrap();
        assert_eq!(resolve_formulation(&h, FormulationChoice::Auto), FormulationChoice::Primal);
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_ed_degree(&random_dense(3, 3, 1, false, 2)).unwrap().0, 39);
        assert_eq!(predicted_ed_degree(&random_dense(3, 4, 2, true, 2)).unwrap().0, 3);
        let h = hankel_instance(&[1, 2, 3, 4, 6].map(Rat::int), 2, WeightKind::Omega).unwrap();
        assert_eq!(predicted_ed_degree(&h).unwrap().0, 13);
        let t = hankel_instance(&[1, 2, 3, 4, 6].map(Rat::int), 2, WeightKind::Theta).unwrap();
        assert!(predicted_ed_degree(&t).is_none());
    }

    #[test]
    fn weight_override_needs_a_named_family() {
        let mut dense = random_dense(2, 3, 1, false, 1);
        let opts = SolveOptions {
            weights: Some(WeightKind::Theta),
            ..Default::default()
        };
        assert!(matches!(apply_overrides(&mut dense, &opts), Err(CliError::Usage(_))));
    }
}

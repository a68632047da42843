//! The JSON document every command prints.

use ed_slra::solver::{Classification, CriticalPoint, SolutionSet, TrackerConfig};
use ed_slra::systems::C;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    /// Real entries for real points, `[re, im]` pairs otherwise.
    #[serde(rename = "X")]
    pub x: Value,
    pub objective: Option<f64>,
    pub residual: f64,
    pub is_real: bool,
    pub class: Option<Classification>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub multiplicity_flag: bool,
}

impl PointReport {
    pub fn new(p: &CriticalPoint) -> Self {
        let entry = |z: &C| if p.is_real { json!(z.re) } else { json!([z.re, z.im]) };
        let x: Vec<Vec<Value>> = p.x.iter().map(|row| row.iter().map(entry).collect()).collect();
        PointReport {
            x: json!(x),
            objective: p.objective,
            residual: p.residual,
            is_real: p.is_real,
            class: p.class,
            multiplicity_flag: p.multiplicity_flag,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: Option<u64>,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_converged: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_diverged: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_filtered: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_complex: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_real: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_local_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closest: Option<PointReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Value>,
    pub expected: Option<Value>,
    pub agreement: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    pub wall_ms: u64,
    /// Set when an expectation failed; decides the exit code.
    #[serde(skip)]
    pub failed: bool,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            config: Value::Null,
            ..Default::default()
        }
    }

    /// Fills in the counts and points of a solver run.
    pub fn with_solution(mut self, cfg: &TrackerConfig, set: &SolutionSet, real_only: bool) -> Self {
        let s = &set.stats;
        self.seed = Some(cfg.seed);
        self.n_paths = Some(s.total);
        self.n_converged = Some(s.converged);
        self.n_diverged = Some(s.diverged);
        self.n_filtered = Some(s.filtered_residual + s.filtered_degenerate);
        self.n_complex = Some(set.n_complex());
        self.n_real = Some(set.n_real());
        self.n_local_min = Some(set.n_local_min());
        self.points = Some(
            set.points
                .iter()
                .filter(|p| p.is_real || !real_only)
                .map(PointReport::new)
                .collect(),
        );
        self.closest = set.closest().map(PointReport::new);
        self.diagnostics.extend(set.warnings.iter().cloned());
        self.diagnostics.push(format!(
            "paths: {} singular, {} failed, {} step limit, {} duplicates, {} degenerate, {} residual-filtered",
            s.singular, s.failed, s.step_limit, s.duplicates, s.filtered_degenerate, s.filtered_residual
        ));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only plain data")
    }
}

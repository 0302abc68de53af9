//! Run configuration, the JSON verification report and the end-to-end runs
//! that fill it in.

use std::collections::BTreeMap;
use std::time::Instant;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, TopologyCertificate};
use crate::conditions::{check_reconstruction_conditions, gate, ConditionReport, Gate, SamplingParams};
use crate::config::{Execution, Tolerances};
use crate::delaunay::{AlphaComplex, DelaunayComplex};
use crate::error::{Error, Result};
use crate::manifold::AnalyticManifold;
use crate::restricted::{core_delaunay, restricted_delaunay};
use crate::sampling::{verify_sample, PointCloud, SampleReport};
use crate::squash::{
    naive_vertical_simplification, non_crossing_simplification, practical_vertical_simplification, Mode, SnapshotFn,
    SquashOptions, SquashTrace,
};
use crate::vertical::{skins, verify_vertical_convexity, ConvexityOptions, ConvexityReport, DualGraph, Shape};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Naive,
    Practical,
    NonCrossing,
    /// Output the core Delaunay complex instead of squashing.
    Restricted,
}

impl RunMode {
    pub fn needs_manifold(self) -> bool {
        self != RunMode::Practical
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct Checks {
    pub sample: bool,
    pub conditions: bool,
    pub dual_graph: bool,
    pub skins: bool,
    pub vertical_convexity: bool,
    pub restricted: bool,
    /// Barycentric grid resolution for the angle extrema over a simplex.
    pub angle_resolution: usize,
    /// Witness spacing for grid-based checks, as a fraction of epsilon.
    pub witness_spacing_ratio: f64,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            sample: true,
            conditions: true,
            dual_graph: true,
            skins: true,
            vertical_convexity: false,
            restricted: true,
            angle_resolution: 4,
            witness_spacing_ratio: 0.1,
        }
    }
}

/// Everything needed to replay a run. Lengths are either absolute or given as
/// a ratio of the reach; `resolve` converts ratios once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub surface: Option<String>,
    pub epsilon: Option<f64>,
    pub epsilon_ratio: Option<f64>,
    pub delta: Option<f64>,
    pub delta_ratio: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_ratio: Option<f64>,
    /// Overrides the reach of the surface; needed for ratios without a surface.
    pub reach: Option<f64>,
    pub seed: u64,
    pub mode: RunMode,
    pub input: Option<String>,
    pub output: Option<String>,
    pub snapshot_every: Option<usize>,
    pub execution: Execution,
    pub checks: Checks,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(command: &str, mode: RunMode) -> Self {
        RunConfig {
            command: command.into(),
            surface: None,
            epsilon: None,
            epsilon_ratio: None,
            delta: None,
            delta_ratio: None,
            alpha: None,
            alpha_ratio: None,
            reach: None,
            seed: 0,
            mode,
            input: None,
            output: None,
            snapshot_every: None,
            execution: Execution::default(),
            checks: Checks::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn manifold(&self) -> Result<Option<AnalyticManifold>> {
        self.surface.as_deref().map(AnalyticManifold::parse).transpose()
    }

    /// The reach used for ratios and conditions: the override, else the surface's.
    pub fn reach_of(&self, m: Option<&AnalyticManifold>) -> Option<f64> {
        self.reach.or(m.filter(|m| !m.unbounded_reach).map(|m| m.reach))
    }

    fn length(&self, name: &str, abs: Option<f64>, ratio: Option<f64>, reach: Option<f64>) -> Result<Option<f64>> {
        let v = match (abs, ratio) {
            (Some(_), Some(_)) => return Err(Error::Parse(format!("{name} given both absolute and as a ratio"))),
            (Some(a), None) => Some(a),
            (None, Some(r)) => {
                let reach = reach.ok_or_else(|| Error::Parse(format!("{name} ratio needs a surface with finite reach or an explicit reach")))?;
                Some(r * reach)
            }
            (None, None) => None,
        };
        if let Some(x) = v {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Parse(format!("{name} must be finite and non-negative, got {x}")));
            }
        }
        Ok(v)
    }

    pub fn resolve(&self, m: Option<&AnalyticManifold>) -> Result<Resolved> {
        let reach = self.reach_of(m);
        Ok(Resolved {
            reach,
            epsilon: self.length("epsilon", self.epsilon, self.epsilon_ratio, reach)?,
            epsilon_measured: false,
            delta: self.length("delta", self.delta, self.delta_ratio, reach)?.unwrap_or(0.0),
            alpha: self.length("alpha", self.alpha, self.alpha_ratio, reach)?,
        })
    }
}

/// Absolute parameters after ratio conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Resolved {
    pub reach: Option<f64>,
    pub epsilon: Option<f64>,
    /// Epsilon was not given and was measured from the sample.
    pub epsilon_measured: bool,
    pub delta: f64,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DualGraphSummary {
    pub nodes: usize,
    pub arcs: usize,
    pub sinks: usize,
    pub sources: usize,
    pub acyclic: bool,
    /// Arcs whose head circumcenter is not strictly higher than the tail's.
    pub monotonicity_violations: usize,
    pub height_monotone: bool,
}

pub fn dual_graph_summary(g: &DualGraph) -> DualGraphSummary {
    let violations = g.arcs.iter().filter(|a| !(g.alt[a.from as usize] < g.alt[a.to as usize])).count();
    DualGraphSummary {
        nodes: g.len(),
        arcs: g.arcs.len(),
        sinks: g.sinks().len(),
        sources: g.sources().len(),
        acyclic: g.topological_order().is_ok(),
        monotonicity_violations: violations,
        height_monotone: violations == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SkinsSummary {
    pub upper: TopologyCertificate,
    pub lower: TopologyCertificate,
    /// (d-1)-simplices with no d-coface, counted in both skins.
    pub shared: usize,
    pub union_is_boundary: bool,
}

pub fn skins_summary(k: &SimplicialComplex, m: &AnalyticManifold, tol: &Tolerances) -> Result<SkinsSummary> {
    let s = skins(k, m, tol)?;
    let expected = m.expected_topology();
    let mut union = s.upper.all_simplices();
    union.extend(s.lower.all_simplices());
    Ok(SkinsSummary {
        upper: s.upper.certify_topology(expected),
        lower: s.lower.certify_topology(expected),
        shared: s.labels.iter().filter(|(_, l)| *l == crate::vertical::SkinLabel::Both).count(),
        union_is_boundary: union == k.boundary().all_simplices(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TraceSummary {
    pub mode: Mode,
    pub collapses: usize,
    pub initial_top_simplices: usize,
    pub remaining_top_simplices: usize,
    pub final_counts: Vec<usize>,
    pub final_euler: i64,
    pub euler_constant: bool,
    pub all_dual_extremal: bool,
    /// Practical collapses whose face was not also vertically free relative to M.
    pub naive_disagreements: usize,
    pub invariant_checks: usize,
    pub invariant_failures: Vec<String>,
}

impl From<&SquashTrace> for TraceSummary {
    fn from(t: &SquashTrace) -> Self {
        TraceSummary {
            mode: t.mode,
            collapses: t.steps.len(),
            initial_top_simplices: t.initial_top_simplices,
            remaining_top_simplices: t.remaining_top_simplices,
            final_counts: t.final_counts.clone(),
            final_euler: t.final_euler,
            euler_constant: t.euler_constant(),
            all_dual_extremal: t.all_dual_extremal(),
            naive_disagreements: t.steps.iter().filter(|s| s.naive_agrees == Some(false)).count(),
            invariant_checks: t.invariant_checks,
            invariant_failures: t.invariant_failures.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RestrictedSummary {
    pub core_counts: Vec<usize>,
    pub restricted_counts: Vec<usize>,
    pub core_equals_restricted: bool,
    pub pure: bool,
    /// First few witnessed simplices outside the core complex.
    pub extras: Vec<Simplex>,
    pub extra_count: usize,
    pub unverified_witnesses: usize,
    pub degenerate_witnesses: usize,
    /// Whether the reconstructed or verified mesh equals the core complex.
    pub output_equals_core: Option<bool>,
    pub core_topology: TopologyCertificate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    /// Wall-clock seconds per stage.
    pub stages: BTreeMap<String, f64>,
    pub total: f64,
}

impl Timing {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        let s = t.elapsed().as_secs_f64();
        *self.stages.entry(stage.into()).or_default() += s;
        self.total += s;
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub library_version: String,
    pub config: RunConfig,
    pub seed: u64,
    pub resolved: Resolved,
    pub points: usize,
    pub dim: usize,
    pub sample: Option<SampleReport>,
    pub gate: Option<Gate>,
    pub angle_conditions: Option<ConditionReport>,
    pub dual_graph: Option<DualGraphSummary>,
    pub skins: Option<SkinsSummary>,
    pub vertical_convexity: Option<ConvexityReport>,
    pub output_counts: Vec<usize>,
    pub topology: Option<TopologyCertificate>,
    pub trace: Option<TraceSummary>,
    pub restricted: Option<RestrictedSummary>,
    /// Checks that could not be carried out, with the reason.
    pub skipped: Vec<String>,
    pub timing: Timing,
}

impl VerificationReport {
    fn new(cfg: &RunConfig, resolved: Resolved, cloud: &PointCloud) -> Self {
        VerificationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            library_version: crate::VERSION.into(),
            config: cfg.clone(),
            seed: cfg.seed,
            resolved,
            points: cloud.len(),
            dim: cloud.dim,
            sample: None,
            gate: None,
            angle_conditions: None,
            dual_graph: None,
            skins: None,
            vertical_convexity: None,
            output_counts: vec![],
            topology: None,
            trace: None,
            restricted: None,
            skipped: vec![],
            timing: Timing::default(),
        }
    }

    /// False when the parameter gate or an angle condition required by the
    /// mode fails; None when they were not evaluated.
    pub fn hypotheses_hold(&self) -> Option<bool> {
        let c = self.angle_conditions.as_ref()?;
        Some(match self.config.mode {
            RunMode::Practical => c.gate.passes && c.practical_ok(),
            _ => c.gate.passes && c.naive_ok(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// JSON schema of `VerificationReport`.
pub fn report_schema() -> serde_json::Value {
    let mut v = serde_json::to_value(schemars::schema_for!(VerificationReport)).expect("schema serializes");
    v["$id"] = format!("squash-verification-report/v{REPORT_SCHEMA_VERSION}").into();
    v
}

pub struct Reconstruction {
    pub initial: SimplicialComplex,
    pub output: SimplicialComplex,
    pub trace: Option<SquashTrace>,
    /// Dual graph of the initial complex relative to M.
    pub dual: Option<DualGraph>,
    pub report: VerificationReport,
}

fn counts(k: &SimplicialComplex) -> Vec<usize> {
    (0..=k.dim()).map(|i| k.count(i)).collect()
}

fn measure_sample(report: &mut VerificationReport, cloud: &PointCloud, m: &AnalyticManifold, exec: Execution) {
    let r = &mut report.resolved;
    let probe = r.epsilon.or(r.alpha).unwrap_or(m.reach.min(1.0));
    let (delta, given) = (r.delta, r.epsilon);
    let s = report.timing.time("sample_check", || verify_sample(cloud, m, probe, delta, exec));
    if given.is_none() {
        report.resolved.epsilon = Some(s.measured_eps + s.grid_slack);
        report.resolved.epsilon_measured = true;
    }
    report.sample = Some(s);
}

/// Angle conditions and parameter gate on K, when epsilon, alpha and reach are known.
fn condition_checks(report: &mut VerificationReport, k: &SimplicialComplex, m: &AnalyticManifold, exec: Execution) {
    let r = report.resolved;
    let (Some(eps), Some(alpha), Some(reach)) = (r.epsilon, r.alpha, r.reach) else {
        report.skipped.push("conditions: epsilon, alpha and reach are all needed".into());
        return;
    };
    match SamplingParams::new(eps, r.delta, alpha, reach) {
        Ok(p) => {
            report.gate = Some(gate(&p));
            let res = report.config.checks.angle_resolution;
            match report.timing.time("conditions", || check_reconstruction_conditions(k, m, &p, res, exec)) {
                Ok(c) => report.angle_conditions = Some(c),
                Err(e) => report.skipped.push(format!("conditions: {e}")),
            }
        }
        Err(e) => report.skipped.push(format!("conditions: {e}")),
    }
}

fn witness_spacing(report: &VerificationReport, m: &AnalyticManifold) -> f64 {
    let r = report.resolved;
    let base = r.epsilon.or(r.alpha).unwrap_or(0.1 * m.reach.min(1.0));
    (base * report.config.checks.witness_spacing_ratio).max(1e-6)
}

fn restricted_checks(
    report: &mut VerificationReport,
    d: &DelaunayComplex,
    m: &AnalyticManifold,
    output: Option<&SimplicialComplex>,
) -> Option<SimplicialComplex> {
    let tol = report.config.tolerances;
    let exec = report.config.execution;
    let spacing = witness_spacing(report, m);
    let res = report.timing.time("restricted", || -> Result<_> {
        let core = core_delaunay(d, m, &tol, exec)?;
        let full = restricted_delaunay(d, m, spacing, &tol, exec)?;
        Ok((core, full))
    });
    match res {
        Ok((core, full)) => {
            let k = core.complex;
            report.restricted = Some(RestrictedSummary {
                core_counts: counts(&k),
                restricted_counts: counts(&full.complex),
                core_equals_restricted: k.same_simplices(&full.complex),
                pure: full.pure,
                extras: full.extras.iter().take(20).copied().collect(),
                extra_count: full.extras.len(),
                unverified_witnesses: core.witnesses.iter().filter(|w| !w.verified).count(),
                degenerate_witnesses: full.degenerate_witnesses,
                output_equals_core: output.map(|o| same_up_to_dim(o, &k)),
                core_topology: k.certify_topology(m.expected_topology()),
            });
            Some(k)
        }
        Err(e) => {
            report.skipped.push(format!("restricted: {e}"));
            None
        }
    }
}

/// Simplex-set equality, ignoring that one complex may be declared in a
/// higher ambient dimension.
fn same_up_to_dim(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    a.all_simplices() == b.all_simplices()
}

/// Checks that only need K and M: dual graph, skins and vertical convexity.
fn structure_checks(report: &mut VerificationReport, k: &SimplicialComplex, m: &AnalyticManifold) -> Option<DualGraph> {
    let tol = report.config.tolerances;
    let exec = report.config.execution;
    let checks = report.config.checks;
    let mut dual = None;
    if checks.dual_graph {
        match report.timing.time("dual_graph", || DualGraph::build(k, m, &tol, exec)) {
            Ok(g) => {
                report.dual_graph = Some(dual_graph_summary(&g));
                dual = Some(g);
            }
            Err(e) => report.skipped.push(format!("dual_graph: {e}")),
        }
    }
    if checks.skins {
        match report.timing.time("skins", || skins_summary(k, m, &tol)) {
            Ok(s) => report.skins = Some(s),
            Err(e) => report.skipped.push(format!("skins: {e}")),
        }
    }
    if checks.vertical_convexity {
        let alpha = report.resolved.alpha.unwrap_or(m.reach);
        let opts = ConvexityOptions {
            spacing: witness_spacing(report, m),
            half_length: (2.0 * alpha).min(0.99 * m.reach),
            merge_tol: tol.interval_merge,
            exec,
        };
        report.vertical_convexity = Some(report.timing.time("vertical_convexity", || verify_vertical_convexity(Shape::Complex(k), m, &opts)));
    }
    dual
}

/// Alpha-complex, optional squash per the mode, and every enabled check.
pub fn reconstruct(cfg: &RunConfig, cloud: &PointCloud, m: Option<&AnalyticManifold>, snapshot: Option<SnapshotFn>) -> Result<Reconstruction> {
    if cfg.mode.needs_manifold() && m.is_none() {
        return Err(Error::Parse(format!("mode {:?} needs a surface", cfg.mode)));
    }
    let resolved = cfg.resolve(m)?;
    let mut report = VerificationReport::new(cfg, resolved, cloud);
    let exec = cfg.execution;
    if let (Some(m), true) = (m, cfg.checks.sample) {
        measure_sample(&mut report, cloud, m, exec);
    }
    let alpha = report.resolved.alpha.ok_or_else(|| Error::Parse("alpha is required".into()))?;
    let d = report.timing.time("delaunay", || DelaunayComplex::build(cloud.dim, std::sync::Arc::new(cloud.points.clone())))?;
    let initial = report.timing.time("alpha_complex", || AlphaComplex::new(d.clone(), exec).complex(alpha));

    let mut dual = None;
    if let Some(m) = m {
        if cfg.checks.conditions {
            condition_checks(&mut report, &initial, m, exec);
        }
        dual = structure_checks(&mut report, &initial, m);
    }

    let mut opts = SquashOptions { tol: cfg.tolerances, exec, check_every: None, snapshot_every: cfg.snapshot_every, snapshot };
    let (output, trace) = match cfg.mode {
        RunMode::Naive => {
            let (k, t) = report.timing.time("squash", || naive_vertical_simplification(initial.clone(), m.unwrap(), &mut opts))?;
            (k, Some(t))
        }
        RunMode::Practical => {
            let (k, t) = report.timing.time("squash", || practical_vertical_simplification(initial.clone(), m, &mut opts))?;
            (k, Some(t))
        }
        RunMode::NonCrossing => {
            let (k, t) = report.timing.time("squash", || non_crossing_simplification(initial.clone(), m.unwrap(), &mut opts))?;
            (k, Some(t))
        }
        RunMode::Restricted => {
            let tol = cfg.tolerances;
            let c = report.timing.time("squash", || core_delaunay(&d, m.unwrap(), &tol, exec))?;
            (c.complex, None)
        }
    };
    report.trace = trace.as_ref().map(TraceSummary::from);
    report.output_counts = counts(&output);
    if let Some(m) = m {
        report.topology = Some(output.certify_topology(m.expected_topology()));
        if cfg.checks.restricted {
            restricted_checks(&mut report, &d, m, Some(&output));
        }
    } else {
        report.topology = Some(output.certify_topology(None));
    }
    Ok(Reconstruction { initial, output, trace, dual, report })
}

/// Report for an existing cloud and, optionally, a mesh over the same points.
pub fn verify(cfg: &RunConfig, cloud: &PointCloud, mesh: Option<&SimplicialComplex>, m: &AnalyticManifold) -> Result<VerificationReport> {
    let resolved = cfg.resolve(Some(m))?;
    let mut report = VerificationReport::new(cfg, resolved, cloud);
    let exec = cfg.execution;
    if let Some(k) = mesh {
        if k.points().as_slice() != cloud.points.as_slice() {
            return Err(Error::Parse("mesh vertices differ from the cloud".into()));
        }
    }
    if cfg.checks.sample {
        measure_sample(&mut report, cloud, m, exec);
    }
    let d = report.timing.time("delaunay", || DelaunayComplex::build(cloud.dim, std::sync::Arc::new(cloud.points.clone())))?;
    if let Some(alpha) = report.resolved.alpha {
        let k = report.timing.time("alpha_complex", || AlphaComplex::new(d.clone(), exec).complex(alpha));
        if cfg.checks.conditions {
            condition_checks(&mut report, &k, m, exec);
        }
        structure_checks(&mut report, &k, m);
    }
    if let Some(k) = mesh {
        report.output_counts = counts(k);
        report.topology = Some(k.certify_topology(m.expected_topology()));
    }
    if cfg.checks.restricted {
        restricted_checks(&mut report, &d, m, mesh);
    }
    Ok(report)
}

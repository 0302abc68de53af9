//! Reconstruction by vertical collapses: the naive and practical vertical
//! simplifications, the squash drivers built on them, and the non-crossing
//! variant that only collapses at sinks above M and sources below M.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::config::{Execution, Tolerances};
use crate::delaunay::{AlphaComplex, DelaunayComplex};
use crate::error::{Error, Result};
use crate::manifold::AnalyticManifold;
use crate::sampling::PointCloud;
use crate::vertical::{
    circumcenter_alt, facet_sides, practical_normal, side_core, vertically_free, DualGraph, FacetInfo, FacetSide, FreeSide,
    Reference,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Naive,
    Practical,
    NonCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SquashStep {
    pub step: usize,
    pub tau: Simplex,
    pub sigma: Simplex,
    pub side: FreeSide,
    pub euler_before: i64,
    pub euler_after: i64,
    /// Whether sigma was a sink (side FromAbove) or a source (FromBelow) of the
    /// dual graph relative to M at the time of the collapse.
    pub dual_extremal: Option<bool>,
    /// Practical runs with M at hand: whether tau was also vertically free relative to M.
    pub naive_agrees: Option<bool>,
    pub circumcenter_alt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SquashTrace {
    pub mode: Mode,
    pub steps: Vec<SquashStep>,
    pub initial_top_simplices: usize,
    pub remaining_top_simplices: usize,
    /// Simplex counts per dimension at termination.
    pub final_counts: Vec<usize>,
    pub final_euler: i64,
    pub invariant_checks: usize,
    pub invariant_failures: Vec<String>,
}

impl SquashTrace {
    pub fn euler_constant(&self) -> bool {
        self.steps.iter().all(|s| s.euler_before == s.euler_after)
    }

    pub fn all_dual_extremal(&self) -> bool {
        self.steps.iter().all(|s| s.dual_extremal != Some(false))
    }

    /// One JSON object per step, then a summary line.
    pub fn write_jsonl<W: Write>(&self, w: &mut W) -> Result<()> {
        for s in &self.steps {
            serde_json::to_writer(&mut *w, s).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
        }
        let summary = serde_json::json!({
            "summary": {
                "mode": self.mode,
                "initial_top_simplices": self.initial_top_simplices,
                "remaining_top_simplices": self.remaining_top_simplices,
                "final_counts": self.final_counts,
                "final_euler": self.final_euler,
                "invariant_checks": self.invariant_checks,
                "invariant_failures": self.invariant_failures,
            }
        });
        serde_json::to_writer(&mut *w, &summary).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }
}

pub type SnapshotFn<'a> = &'a mut dyn FnMut(usize, &SimplicialComplex);

pub struct SquashOptions<'a> {
    pub tol: Tolerances,
    pub exec: Execution,
    /// Rebuild the dual graph and check acyclicity every this many collapses (needs M).
    pub check_every: Option<usize>,
    pub snapshot_every: Option<usize>,
    pub snapshot: Option<SnapshotFn<'a>>,
}

impl Default for SquashOptions<'_> {
    fn default() -> Self {
        SquashOptions { tol: Tolerances::default(), exec: Execution::default(), check_every: None, snapshot_every: None, snapshot: None }
    }
}

type Candidate = (Simplex, Simplex, FreeSide);

struct Sides<'a> {
    k_dim: usize,
    m: Option<&'a AnalyticManifold>,
    practical: bool,
    tol: Tolerances,
    cache: HashMap<Simplex, Option<Vec<FacetInfo>>>,
}

impl Sides<'_> {
    /// Facet sides of sigma relative to the mode's reference; None if a facet is vertical.
    fn get(&mut self, table: &[crate::geom::Point], sigma: &Simplex) -> Result<Option<Vec<FacetInfo>>> {
        if let Some(s) = self.cache.get(sigma) {
            return Ok(s.clone());
        }
        let reference = if self.practical {
            Reference::Hyperplane(practical_normal(table, self.k_dim, sigma)?)
        } else {
            Reference::Manifold(self.m.expect("naive mode needs M"))
        };
        let s = match facet_sides(table, self.k_dim, sigma, reference, &self.tol) {
            Ok(s) => Some(s),
            Err(Error::VerticalFacet { .. }) | Err(Error::DegenerateSimplex) => None,
            Err(e) => return Err(e),
        };
        self.cache.insert(*sigma, s.clone());
        Ok(s)
    }
}

fn candidates_of(k: &SimplicialComplex, sides: &mut Sides, sigma: &Simplex) -> Result<Vec<Candidate>> {
    let Some(s) = sides.get(k.points(), sigma)? else {
        return Ok(vec![]);
    };
    let mut out = Vec::new();
    for (side, free) in [(FacetSide::Upper, FreeSide::FromAbove), (FacetSide::Lower, FreeSide::FromBelow)] {
        if let Some(tau) = side_core(sigma, &s, side) {
            if k.star_within(&tau, sigma) {
                out.push((tau, *sigma, free));
            }
        }
    }
    Ok(out)
}

/// d-simplices of K sharing a vertex with sigma.
fn vertex_neighbors(k: &SimplicialComplex, sigma: &Simplex) -> BTreeSet<Simplex> {
    let mut out = BTreeSet::new();
    for &v in sigma.vertices() {
        if let Ok(tops) = k.top_cofaces(&Simplex::vertex(v)) {
            out.extend(tops);
        }
    }
    out
}

/// Whether sigma is a sink (or source) of the dual graph relative to M, from
/// the sides of sigma and of its facet neighbors.
fn is_extremal(k: &SimplicialComplex, m: &AnalyticManifold, tol: &Tolerances, sigma: &Simplex, sink: bool) -> Result<bool> {
    let d = k.dim();
    let table = k.points();
    let s = facet_sides(table, d, sigma, Reference::Manifold(m), tol)?;
    for f in &s {
        for c in k.immediate_cofaces(&f.facet)? {
            if c == sigma {
                continue;
            }
            let out_arc = f.side == FacetSide::Upper;
            if out_arc == sink {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn trace_new(mode: Mode, k: &SimplicialComplex) -> SquashTrace {
    SquashTrace {
        mode,
        steps: Vec::new(),
        initial_top_simplices: k.count(k.dim()),
        remaining_top_simplices: 0,
        final_counts: vec![],
        final_euler: 0,
        invariant_checks: 0,
        invariant_failures: vec![],
    }
}

fn trace_finish(trace: &mut SquashTrace, k: &SimplicialComplex) {
    trace.remaining_top_simplices = k.count(k.dim());
    trace.final_counts = (0..=k.dim()).map(|j| k.count(j)).collect();
    trace.final_euler = k.euler_characteristic();
}

fn after_step(k: &SimplicialComplex, m: Option<&AnalyticManifold>, opts: &mut SquashOptions, trace: &mut SquashTrace) {
    let n = trace.steps.len();
    if let (Some(every), Some(m)) = (opts.check_every, m) {
        if every > 0 && n % every == 0 {
            trace.invariant_checks += 1;
            match DualGraph::build(k, m, &opts.tol, opts.exec) {
                Ok(g) => {
                    if let Err(cycle) = g.topological_order() {
                        trace.invariant_failures.push(format!("step {n}: dual graph has a cycle of length {}", cycle.len()));
                    }
                }
                Err(e) => trace.invariant_failures.push(format!("step {n}: {e}")),
            }
        }
    }
    if let (Some(every), Some(snap)) = (opts.snapshot_every, opts.snapshot.as_mut()) {
        if every > 0 && n % every == 0 {
            snap(n, k);
        }
    }
}

fn vertical_simplification(
    mut k: SimplicialComplex,
    m: Option<&AnalyticManifold>,
    practical: bool,
    opts: &mut SquashOptions,
) -> Result<(SimplicialComplex, SquashTrace)> {
    let d = k.dim();
    let mode = if practical { Mode::Practical } else { Mode::Naive };
    let mut trace = trace_new(mode, &k);
    let mut sides = Sides { k_dim: d, m, practical, tol: opts.tol, cache: HashMap::new() };
    let mut pending: BTreeSet<Candidate> = BTreeSet::new();
    let mut by_sigma: HashMap<Simplex, Vec<Candidate>> = HashMap::new();
    for s in k.simplices(d) {
        let c = candidates_of(&k, &mut sides, &s)?;
        pending.extend(c.iter().copied());
        by_sigma.insert(s, c);
    }
    while let Some(&(tau, sigma, side)) = pending.iter().next() {
        let dual_extremal = match (m, practical) {
            (Some(m), false) => Some(is_extremal(&k, m, &opts.tol, &sigma, side == FreeSide::FromAbove)?),
            _ => None,
        };
        let naive_agrees = match (m, practical) {
            (Some(m), true) => Some(matches!(vertically_free(&k, &tau, Reference::Manifold(m), &opts.tol), Ok(Some((_, s))) if s == sigma)),
            _ => None,
        };
        let euler_before = k.euler_characteristic();
        k.collapse(&tau)?;
        let euler_after = k.euler_characteristic();
        for c in by_sigma.remove(&sigma).unwrap_or_default() {
            pending.remove(&c);
        }
        sides.cache.remove(&sigma);
        for nb in vertex_neighbors(&k, &sigma) {
            for c in by_sigma.remove(&nb).unwrap_or_default() {
                pending.remove(&c);
            }
            let c = candidates_of(&k, &mut sides, &nb)?;
            pending.extend(c.iter().copied());
            by_sigma.insert(nb, c);
        }
        let circumcenter_alt = m.and_then(|m| circumcenter_alt(k.points(), m, &sigma).ok());
        trace.steps.push(SquashStep {
            step: trace.steps.len(),
            tau,
            sigma,
            side,
            euler_before,
            euler_after,
            dual_extremal,
            naive_agrees,
            circumcenter_alt,
        });
        after_step(&k, m, opts, &mut trace);
    }
    trace_finish(&mut trace, &k);
    Ok((k, trace))
}

/// Collapses simplices vertically free relative to M until none is left.
/// Among candidates the smallest (dimension, vertex ids) tau goes first.
pub fn naive_vertical_simplification(k: SimplicialComplex, m: &AnalyticManifold, opts: &mut SquashOptions) -> Result<(SimplicialComplex, SquashTrace)> {
    vertical_simplification(k, Some(m), false, opts)
}

/// Same loop with freeness relative to the hyperplane of the smallest facet of
/// each coface. `m`, when given, is consulted only to annotate the trace.
pub fn practical_vertical_simplification(
    k: SimplicialComplex,
    m: Option<&AnalyticManifold>,
    opts: &mut SquashOptions,
) -> Result<(SimplicialComplex, SquashTrace)> {
    vertical_simplification(k, m, true, opts)
}

/// Alpha-complex of a cloud at the given alpha.
pub fn alpha_complex_of(cloud: &PointCloud, alpha: f64, exec: Execution) -> Result<SimplicialComplex> {
    let d = DelaunayComplex::build(cloud.dim, std::sync::Arc::new(cloud.points.clone()))?;
    Ok(AlphaComplex::new(d, exec).complex(alpha))
}

pub fn naive_squash(cloud: &PointCloud, alpha: f64, m: &AnalyticManifold, opts: &mut SquashOptions) -> Result<(SimplicialComplex, SquashTrace)> {
    let k = alpha_complex_of(cloud, alpha, opts.exec)?;
    naive_vertical_simplification(k, m, opts)
}

pub fn practical_squash(cloud: &PointCloud, alpha: f64, m: Option<&AnalyticManifold>, opts: &mut SquashOptions) -> Result<(SimplicialComplex, SquashTrace)> {
    let k = alpha_complex_of(cloud, alpha, opts.exec)?;
    practical_vertical_simplification(k, m, opts)
}

/// Collapses the upper core of a sink whose circumcenter lies above M, else the
/// lower core of a source whose circumcenter lies below M, until no d-simplex is left.
pub fn non_crossing_simplification(mut k: SimplicialComplex, m: &AnalyticManifold, opts: &mut SquashOptions) -> Result<(SimplicialComplex, SquashTrace)> {
    let d = k.dim();
    let mut trace = trace_new(Mode::NonCrossing, &k);
    let table = k.points().clone();
    let mut alt: HashMap<Simplex, f64> = HashMap::new();
    let mut sides: HashMap<Simplex, Vec<FacetInfo>> = HashMap::new();
    for s in k.simplices(d) {
        let a = circumcenter_alt(&table, m, &s)?;
        if a.abs() < opts.tol.genericity {
            return Err(Error::GenericityViolated(s));
        }
        alt.insert(s, a);
        sides.insert(s, facet_sides(&table, d, &s, Reference::Manifold(m), &opts.tol)?);
    }
    // candidate test for one d-simplex: (is sink above, is source below) with a free core
    let status = |k: &SimplicialComplex, s: &Simplex| -> Result<Option<(Simplex, FreeSide)>> {
        let a = alt[s];
        let sd = &sides[s];
        let mut has_out = false;
        let mut has_in = false;
        for f in sd {
            if k.immediate_cofaces(&f.facet)?.len() > 1 {
                if f.side == FacetSide::Upper {
                    has_out = true;
                } else {
                    has_in = true;
                }
            }
        }
        if a > 0.0 && !has_out {
            if let Some(t) = side_core(s, sd, FacetSide::Upper) {
                if k.star_within(&t, s) {
                    return Ok(Some((t, FreeSide::FromAbove)));
                }
            }
        }
        if a < 0.0 && !has_in {
            if let Some(t) = side_core(s, sd, FacetSide::Lower) {
                if k.star_within(&t, s) {
                    return Ok(Some((t, FreeSide::FromBelow)));
                }
            }
        }
        Ok(None)
    };
    let mut above: BTreeSet<Simplex> = BTreeSet::new();
    let mut below: BTreeSet<Simplex> = BTreeSet::new();
    let mut core: HashMap<Simplex, Simplex> = HashMap::new();
    let mut classify = |k: &SimplicialComplex, s: Simplex, above: &mut BTreeSet<Simplex>, below: &mut BTreeSet<Simplex>| -> Result<()> {
        above.remove(&s);
        below.remove(&s);
        core.remove(&s);
        if let Some((t, side)) = status(k, &s)? {
            core.insert(s, t);
            if side == FreeSide::FromAbove {
                above.insert(s);
            } else {
                below.insert(s);
            }
        }
        Ok(())
    };
    for s in k.simplices(d) {
        classify(&k, s, &mut above, &mut below)?;
    }
    while k.count(d) > 0 {
        let (sigma, side) = if let Some(&s) = above.iter().next() {
            (s, FreeSide::FromAbove)
        } else if let Some(&s) = below.iter().next() {
            (s, FreeSide::FromBelow)
        } else {
            trace_finish(&mut trace, &k);
            return Err(Error::Stuck(k.count(d)));
        };
        let tau = match side {
            FreeSide::FromAbove => side_core(&sigma, &sides[&sigma], FacetSide::Upper).unwrap(),
            FreeSide::FromBelow => side_core(&sigma, &sides[&sigma], FacetSide::Lower).unwrap(),
        };
        let euler_before = k.euler_characteristic();
        k.collapse(&tau)?;
        let euler_after = k.euler_characteristic();
        above.remove(&sigma);
        below.remove(&sigma);
        for nb in vertex_neighbors(&k, &sigma) {
            classify(&k, nb, &mut above, &mut below)?;
        }
        trace.steps.push(SquashStep {
            step: trace.steps.len(),
            tau,
            sigma,
            side,
            euler_before,
            euler_after,
            dual_extremal: Some(true),
            naive_agrees: None,
            circumcenter_alt: Some(alt[&sigma]),
        });
        after_step(&k, Some(m), opts, &mut trace);
    }
    trace_finish(&mut trace, &k);
    Ok((k, trace))
}

pub fn non_crossing_squash(cloud: &PointCloud, alpha: f64, m: &AnalyticManifold, opts: &mut SquashOptions) -> Result<(SimplicialComplex, SquashTrace)> {
    let k = alpha_complex_of(cloud, alpha, opts.exec)?;
    non_crossing_simplification(k, m, opts)
}

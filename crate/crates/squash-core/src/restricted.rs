//! Delaunay simplices whose Voronoi cells meet M: the core complex from exact
//! crossings of dual Voronoi edges, and the full restricted complex with
//! lower-dimensional simplices detected on a witness grid.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, TopologyCertificate};
use crate::config::{Execution, Tolerances};
use crate::delaunay::DelaunayComplex;
use crate::error::{Error, Result};
use crate::geom::{circumcenter, outward_normal, Point};
use crate::manifold::AnalyticManifold;
use crate::par;
use crate::sampling::{verify_sample, PointCloud};
use crate::spatial::PointIndex;
use crate::vertical::circumcenter_alt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetWitness {
    pub facet: Simplex,
    pub point: [f64; 3],
    /// Crossing parameter along the dual Voronoi edge.
    pub param: f64,
    /// On M within tolerance, equidistant from the facet vertices, and no sample closer.
    pub verified: bool,
}

#[derive(Debug, Clone)]
pub struct RestrictedComplex {
    pub complex: SimplicialComplex,
    pub witnesses: Vec<FacetWitness>,
    /// Witnessed simplices outside the closure of the (d-1)-simplices.
    pub extras: Vec<Simplex>,
    pub pure: bool,
    /// Witness-grid points whose two nearest samples tie within tolerance.
    pub degenerate_witnesses: usize,
}

fn check_genericity(d: &DelaunayComplex, m: &AnalyticManifold, tol: &Tolerances) -> Result<()> {
    for c in &d.cells {
        if let Ok(a) = circumcenter_alt(&d.points, m, c) {
            if a.abs() < tol.genericity {
                return Err(Error::GenericityViolated(*c));
            }
        }
    }
    Ok(())
}

/// Segment of the Voronoi edge dual to facet `f`, clipped for hull facets.
fn dual_segment(d: &DelaunayComplex, m: &AnalyticManifold, f: &Simplex, cells: &[u32]) -> Option<(Point, Point)> {
    let z = |c: u32| circumcenter(&d.cells[c as usize].points(&d.points)).ok().map(|(z, _)| z);
    match cells {
        [a, b] => Some((z(*a)?, z(*b)?)),
        [a] => {
            let za = z(*a)?;
            let cell = d.cells[*a as usize];
            let apex = cell.minus(f)?.vertices()[0];
            let n = outward_normal(d.dim, &f.points(&d.points), &d.points[apex as usize])?;
            let (lo, hi) = m.bounding_box();
            let diag = (hi - lo).norm();
            let reach = if m.unbounded_reach { diag } else { m.reach };
            let center = (lo + hi) / 2.0;
            let far = (za - center).norm() + diag + 3.0 * reach;
            Some((za, za + n * far))
        }
        _ => None,
    }
}

fn verify_witness(idx: &PointIndex, pts: &[Point], m: &AnalyticManifold, f: &Simplex, w: &Point) -> bool {
    let ds: Vec<f64> = f.vertices().iter().map(|&v| (pts[v as usize] - w).norm()).collect();
    let r = ds[0];
    let scale = 1e-9 * r.max(1.0);
    let equi = ds.iter().all(|d| (d - r).abs() <= scale);
    let nearest_ok = idx.nearest(w).map(|(_, d)| d >= r - scale).unwrap_or(false);
    let on_m = m.distance(w) <= 1e-9;
    equi && nearest_ok && on_m
}

/// (d-1)-simplices whose dual Voronoi edge crosses M, with all their faces.
pub fn core_delaunay(d: &DelaunayComplex, m: &AnalyticManifold, tol: &Tolerances, exec: Execution) -> Result<RestrictedComplex> {
    check_genericity(d, m, tol)?;
    let fmap = d.facet_map();
    let facets: Vec<(Simplex, Vec<u32>)> = {
        let mut v: Vec<_> = fmap.into_iter().collect();
        v.sort_unstable_by_key(|(f, _)| *f);
        v
    };
    let idx = PointIndex::build(&d.points, mean_spacing(&d.points));
    let found: Vec<Option<FacetWitness>> = par::map(exec, &facets, |(f, cells)| {
        let (a, b) = dual_segment(d, m, f, cells)?;
        let t = *m.segment_crossings(&a, &b, tol.bisection).first()?;
        let w = a + (b - a) * t;
        let verified = verify_witness(&idx, &d.points, m, f, &w);
        Some(FacetWitness { facet: *f, point: [w.x, w.y, w.z], param: t, verified })
    });
    let witnesses: Vec<FacetWitness> = found.into_iter().flatten().collect();
    let complex = SimplicialComplex::from_closure(d.dim, d.points.clone(), witnesses.iter().map(|w| w.facet));
    let pure = !witnesses.is_empty();
    Ok(RestrictedComplex { complex, witnesses, extras: vec![], pure, degenerate_witnesses: 0 })
}

fn mean_spacing(pts: &[Point]) -> f64 {
    if pts.len() < 2 {
        return 1.0;
    }
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    ((hi - lo).norm() / (pts.len() as f64).sqrt()).max(1e-9)
}

/// Searches M near `start` for a point equidistant from a and b with no sample
/// closer, alternating projection onto the bisector and onto M.
fn certify_edge(idx: &PointIndex, m: &AnalyticManifold, a: &Point, b: &Point, start: &Point) -> Option<Point> {
    let mid = (a + b) / 2.0;
    let u = (b - a).normalize();
    let mut x = *start;
    for _ in 0..100 {
        let on_plane = x - u * (x - mid).dot(&u);
        let next = m.foot(&on_plane).ok()?.0;
        let moved = (next - x).norm();
        x = next;
        if moved < 1e-13 {
            break;
        }
    }
    let da = (x - a).norm();
    let db = (x - b).norm();
    let scale = 1e-9 * da.max(1.0);
    let ok = (da - db).abs() <= scale && idx.nearest(&x).map(|(_, d)| d >= da - scale).unwrap_or(false);
    ok.then_some(x)
}

/// The core complex plus vertices and edges whose Voronoi cells meet M at a
/// witness-grid point; pure when no witnessed simplex falls outside the core.
pub fn restricted_delaunay(d: &DelaunayComplex, m: &AnalyticManifold, spacing: f64, tol: &Tolerances, exec: Execution) -> Result<RestrictedComplex> {
    let mut core = core_delaunay(d, m, tol, exec)?;
    let grid = m.witness_grid(spacing);
    let h = grid.covering.max(spacing);
    let pts = d.points.as_slice();
    let idx = PointIndex::build(pts, mean_spacing(pts));
    let per: Vec<(Vec<Simplex>, bool)> = par::map(exec, &grid.points, |g| {
        let Some((p1, d1)) = idx.nearest(g) else {
            return (vec![], false);
        };
        let mut out = vec![Simplex::vertex(p1 as u32)];
        let mut degenerate = false;
        if d.dim == 3 {
            for q in idx.within(g, d1 + 2.0 * h) {
                if q == p1 {
                    continue;
                }
                let d2 = (pts[q] - g).norm();
                if d2 - d1 <= 1e-12 {
                    degenerate = true;
                }
                let e = Simplex::new(&[p1 as u32, q as u32]);
                if core.complex.contains(&e) {
                    out.push(e);
                } else if certify_edge(&idx, m, &pts[p1], &pts[q], g).is_some() {
                    out.push(e);
                }
            }
        }
        (out, degenerate)
    });
    let mut witnessed: BTreeSet<Simplex> = BTreeSet::new();
    let mut degenerate = 0;
    for (s, deg) in per {
        witnessed.extend(s);
        degenerate += deg as usize;
    }
    let extras: Vec<Simplex> = witnessed.iter().copied().filter(|s| !core.complex.contains(s)).collect();
    let mut all: Vec<Simplex> = core.complex.iter().copied().collect();
    all.extend(extras.iter().copied());
    core.complex = SimplicialComplex::from_closure(d.dim, d.points.clone(), all);
    core.pure = core.pure && extras.is_empty();
    core.extras = extras;
    core.degenerate_witnesses = degenerate;
    Ok(core)
}

#[derive(Debug, Clone)]
pub struct EquivalenceOutcome {
    pub core: RestrictedComplex,
    pub restricted: RestrictedComplex,
    pub equal: bool,
    pub certificate: TopologyCertificate,
    pub measured_eps_over_r: f64,
    /// measured eps / R at most 0.225.
    pub sampling_ok: bool,
}

/// Builds both complexes from the Delaunay complex of the cloud, compares them,
/// and certifies the core against M.
pub fn restricted_equivalence(cloud: &PointCloud, m: &AnalyticManifold, spacing: f64, tol: &Tolerances, exec: Execution) -> Result<EquivalenceOutcome> {
    let d = crate::delaunay::delaunay(cloud)?;
    let core = core_delaunay(&d, m, tol, exec)?;
    let restricted = restricted_delaunay(&d, m, spacing, tol, exec)?;
    let equal = core.complex.same_simplices(&restricted.complex);
    let certificate = core.complex.certify_topology(m.expected_topology());
    let rep = verify_sample(cloud, m, spacing * 10.0, 0.0, exec);
    let measured = (rep.measured_eps + rep.grid_slack) / m.reach;
    Ok(EquivalenceOutcome { core, restricted, equal, certificate, measured_eps_over_r: measured, sampling_ok: measured <= 0.225 })
}

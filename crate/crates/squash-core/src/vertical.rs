//! Verticality relative to a manifold or a hyperplane: facet sides, the below
//! relation and its dual graph, vertically free simplices, skins, and a
//! numerical vertical-convexity verifier.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use nalgebra::Vector3;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::config::{Execution, Tolerances};
use crate::error::{Error, Result};
use crate::geom::{angle_to_hyperplane, barycenter, barycentric, circumcenter, orient, orthonormalize, outward_normal, Point};
use crate::manifold::AnalyticManifold;
use crate::par;
use crate::spatial::{BoxIndex, PointIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum FacetSide {
    Upper,
    Lower,
}

impl FacetSide {
    pub fn flip(self) -> Self {
        match self {
            FacetSide::Upper => FacetSide::Lower,
            FacetSide::Lower => FacetSide::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum FreeSide {
    FromAbove,
    FromBelow,
}

/// What "vertical" is measured against.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    Manifold(&'a AnalyticManifold),
    /// A hyperplane, given by its unit normal.
    Hyperplane(Vector3<f64>),
}

impl Reference<'_> {
    pub fn normal_at(&self, x: &Point) -> Result<Vector3<f64>> {
        match self {
            Reference::Manifold(m) => m.normal_at_projection(x),
            Reference::Hyperplane(n) => Ok(*n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetInfo {
    pub facet: Simplex,
    pub opposite: u32,
    pub side: FacetSide,
    /// N_nu . n at the facet barycenter.
    pub dot: f64,
}

/// Upper/lower label of every facet of the d-simplex `sigma`.
pub fn facet_sides(table: &[Point], dim: usize, sigma: &Simplex, reference: Reference, tol: &Tolerances) -> Result<Vec<FacetInfo>> {
    if sigma.dim() != dim {
        return Err(Error::DegenerateSimplex);
    }
    let pts = sigma.points(table);
    if orient(dim, &pts) == 0 {
        return Err(Error::DegenerateSimplex);
    }
    let mut out = Vec::with_capacity(dim + 1);
    for (v, f) in sigma.facets() {
        let fp = f.points(table);
        let apex = table[v as usize];
        let nn = outward_normal(dim, &fp, &apex).ok_or(Error::DegenerateSimplex)?;
        let n = reference.normal_at(&barycenter(&fp))?;
        let dot = nn.dot(&n);
        if dot.abs() < tol.vertical_dot {
            return Err(Error::VerticalFacet { simplex: *sigma, facet: f });
        }
        let side = if dot > 0.0 { FacetSide::Upper } else { FacetSide::Lower };
        out.push(FacetInfo { facet: f, opposite: v, side, dot });
    }
    Ok(out)
}

/// Intersection of the facets on `side`: sigma minus the vertices opposite them.
pub fn side_core(sigma: &Simplex, sides: &[FacetInfo], side: FacetSide) -> Option<Simplex> {
    let drop: Vec<u32> = sides.iter().filter(|f| f.side == side).map(|f| f.opposite).collect();
    let keep: Vec<u32> = sigma.vertices().iter().copied().filter(|v| !drop.contains(v)).collect();
    if keep.is_empty() || drop.is_empty() {
        None
    } else {
        Some(Simplex::new(&keep))
    }
}

/// True iff `sigma0` lies below `sigma1` across their common facet.
pub fn below_relation(table: &[Point], dim: usize, sigma0: &Simplex, sigma1: &Simplex, reference: Reference, tol: &Tolerances) -> Result<bool> {
    let nu = sigma0.intersection(sigma1).filter(|s| s.dim() + 1 == dim).ok_or(Error::SimplexNotFound(*sigma1))?;
    let s0 = facet_sides(table, dim, sigma0, reference, tol)?;
    let s1 = facet_sides(table, dim, sigma1, reference, tol)?;
    let side = |s: &[FacetInfo]| s.iter().find(|f| f.facet == nu).unwrap().side;
    let (a, b) = (side(&s0), side(&s1));
    if a == b {
        return Err(Error::VerticalFacet { simplex: *sigma0, facet: nu });
    }
    Ok(a == FacetSide::Upper)
}

/// Unit normal of the reference hyperplane for `sigma` in the practical
/// algorithm: the outward normal of its lexicographically smallest facet.
pub fn practical_normal(table: &[Point], dim: usize, sigma: &Simplex) -> Result<Vector3<f64>> {
    let (v, f) = sigma.facets().into_iter().min_by_key(|(_, f)| *f).ok_or(Error::DegenerateSimplex)?;
    outward_normal(dim, &f.points(table), &table[v as usize]).ok_or(Error::DegenerateSimplex)
}

/// Signed height of the circumcenter of `sigma`.
pub fn circumcenter_alt(table: &[Point], m: &AnalyticManifold, sigma: &Simplex) -> Result<f64> {
    let (z, _) = circumcenter(&sigma.points(table))?;
    Ok(m.alt(&z).unwrap_or_else(|_| m.signed_distance(&z)))
}

/// tau is free in K with a d-dimensional maximal coface sigma, and the facets of
/// sigma containing tau are exactly its upper (or exactly its lower) facets.
pub fn vertically_free(k: &SimplicialComplex, tau: &Simplex, reference: Reference, tol: &Tolerances) -> Result<Option<(FreeSide, Simplex)>> {
    let Some(sigma) = k.is_free(tau)? else {
        return Ok(None);
    };
    if sigma.dim() != k.dim() {
        return Ok(None);
    }
    let sides = match facet_sides(k.points(), k.dim(), &sigma, reference, tol) {
        Ok(s) => s,
        Err(Error::VerticalFacet { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let all_upper: BTreeSet<Simplex> = sides.iter().filter(|f| f.side == FacetSide::Upper).map(|f| f.facet).collect();
    let all_lower: BTreeSet<Simplex> = sides.iter().filter(|f| f.side == FacetSide::Lower).map(|f| f.facet).collect();
    let star_facets: BTreeSet<Simplex> = sides.iter().filter(|f| tau.is_face_of(&f.facet)).map(|f| f.facet).collect();
    Ok(if star_facets == all_upper {
        Some((FreeSide::FromAbove, sigma))
    } else if star_facets == all_lower {
        Some((FreeSide::FromBelow, sigma))
    } else {
        None
    })
}

/// Is the support of tau vertical relative to M: does the angle between
/// Aff tau and the tangent plane reach pi/2 somewhere on Conv tau.
pub fn is_vertical(m: &AnalyticManifold, table: &[Point], tau: &Simplex, tol: &Tolerances) -> Result<bool> {
    let pts = tau.points(table);
    let near = pts.iter().map(|p| m.distance(p)).fold(f64::INFINITY, f64::min);
    let mut diam: f64 = 0.0;
    for a in &pts {
        for b in &pts {
            diam = diam.max((a - b).norm());
        }
    }
    if !m.unbounded_reach && near + diam >= m.reach {
        return Err(Error::OutsideTube(*tau));
    }
    if tau.dim() == 0 {
        return Ok(false);
    }
    if tau.dim() >= m.dim {
        return Ok(true);
    }
    let ext = angle_extrema(m, &pts, 10)?;
    Ok(ext.max >= FRAC_PI_2 - tol.vertical_angle)
}

/// Angle between Aff tau and the tangent plane at pi(x): vertex values and
/// extrema over Conv tau (grid plus golden-section refinement).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AngleExtrema {
    pub vertex_min: f64,
    pub vertex_max: f64,
    pub min: f64,
    pub max: f64,
}

fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(parts - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn vertex_angles(m: &AnalyticManifold, pts: &[Point]) -> Result<Vec<f64>> {
    let basis = orthonormalize(&pts[1..].iter().map(|p| p - pts[0]).collect::<Vec<_>>()).ok_or(Error::DegenerateSimplex)?;
    pts.iter().map(|p| Ok(angle_to_hyperplane(&basis, &m.normal_at_projection(p)?))).collect()
}

pub fn angle_extrema(m: &AnalyticManifold, pts: &[Point], resolution: usize) -> Result<AngleExtrema> {
    let basis = orthonormalize(&pts[1..].iter().map(|p| p - pts[0]).collect::<Vec<_>>()).ok_or(Error::DegenerateSimplex)?;
    let k = pts.len();
    let eval = |w: &[f64]| -> Result<f64> {
        let x = pts.iter().zip(w).fold(Point::zeros(), |a, (p, &t)| a + p * t);
        Ok(angle_to_hyperplane(&basis, &m.normal_at_projection(&x)?))
    };
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for i in 0..k {
        let mut w = vec![0.0; k];
        w[i] = 1.0;
        let a = eval(&w)?;
        vmin = vmin.min(a);
        vmax = vmax.max(a);
    }
    let mut best_min = (f64::INFINITY, Vec::new());
    let mut best_max = (f64::NEG_INFINITY, Vec::new());
    for c in compositions(k, resolution.max(1)) {
        let w: Vec<f64> = c.iter().map(|&x| x as f64 / resolution.max(1) as f64).collect();
        let a = eval(&w)?;
        if a < best_min.0 {
            best_min = (a, w.clone());
        }
        if a > best_max.0 {
            best_max = (a, w);
        }
    }
    let max = refine(&eval, best_max)?;
    let min = -refine(&|w: &[f64]| eval(w).map(|a| -a), (-best_min.0, best_min.1))?;
    Ok(AngleExtrema { vertex_min: vmin, vertex_max: vmax, min: min.min(vmin), max: max.max(vmax) })
}

/// Golden-section ascent along the edge directions of the barycentric simplex.
fn refine(f: &dyn Fn(&[f64]) -> Result<f64>, start: (f64, Vec<f64>)) -> Result<f64> {
    let (mut best, mut w) = start;
    let k = w.len();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..2 {
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                // move mass s from j to i, s in [0, w_j]
                let (lo0, hi0) = (0.0, w[j]);
                if hi0 - lo0 < 1e-12 {
                    continue;
                }
                let at = |s: f64| {
                    let mut v = w.clone();
                    v[i] += s;
                    v[j] -= s;
                    f(&v)
                };
                let (mut lo, mut hi) = (lo0, hi0);
                let mut x1 = hi - g * (hi - lo);
                let mut x2 = lo + g * (hi - lo);
                let mut f1 = at(x1)?;
                let mut f2 = at(x2)?;
                for _ in 0..25 {
                    if f1 < f2 {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + g * (hi - lo);
                        f2 = at(x2)?;
                    } else {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - g * (hi - lo);
                        f1 = at(x1)?;
                    }
                }
                let (s, v) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
                if v > best {
                    best = v;
                    w[i] += s;
                    w[j] -= s;
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualArc {
    pub from: u32,
    pub to: u32,
    pub facet: Simplex,
}

/// Nodes are the d-simplices of K; an arc runs from sigma0 to sigma1 when
/// sigma0 lies below sigma1 across a shared facet.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub nodes: Vec<Simplex>,
    /// Signed height of each node's circumcenter.
    pub alt: Vec<f64>,
    pub arcs: Vec<DualArc>,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
}

impl DualGraph {
    pub fn build(k: &SimplicialComplex, m: &AnalyticManifold, tol: &Tolerances, exec: Execution) -> Result<Self> {
        let d = k.dim();
        let table = k.points();
        let nodes = k.simplices(d);
        let index: HashMap<Simplex, u32> = nodes.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        let sides = par::map(exec, &nodes, |s| facet_sides(table, d, s, Reference::Manifold(m), tol));
        let sides: Vec<Vec<FacetInfo>> = sides.into_iter().collect::<Result<_>>()?;
        let alt = par::map(exec, &nodes, |s| circumcenter_alt(table, m, s).unwrap_or(f64::NAN));
        let mut arcs = Vec::new();
        let mut out = vec![Vec::new(); nodes.len()];
        let mut inn = vec![Vec::new(); nodes.len()];
        for (i, s) in nodes.iter().enumerate() {
            for f in &sides[i] {
                if f.side != FacetSide::Upper {
                    continue;
                }
                for c in k.immediate_cofaces(&f.facet)? {
                    if c == s {
                        continue;
                    }
                    let j = index[c];
                    let other = sides[j as usize].iter().find(|g| g.facet == f.facet).unwrap();
                    if other.side != FacetSide::Lower {
                        return Err(Error::VerticalFacet { simplex: *s, facet: f.facet });
                    }
                    arcs.push(DualArc { from: i as u32, to: j, facet: f.facet });
                    out[i].push(j);
                    inn[j as usize].push(i as u32);
                }
            }
        }
        Ok(DualGraph { nodes, alt, arcs, out, inn })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sinks(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32).filter(|&i| self.out[i as usize].is_empty()).collect()
    }

    pub fn sources(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32).filter(|&i| self.inn[i as usize].is_empty()).collect()
    }

    pub fn out_neighbors(&self, i: u32) -> &[u32] {
        &self.out[i as usize]
    }

    /// Kahn order, or a directed cycle when the graph is not acyclic.
    pub fn topological_order(&self) -> std::result::Result<Vec<u32>, Vec<u32>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.inn.iter().map(|v| v.len()).collect();
        let mut queue: VecDeque<u32> = (0..n as u32).filter(|&i| indeg[i as usize] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &self.out[i as usize] {
                indeg[j as usize] -= 1;
                if indeg[j as usize] == 0 {
                    queue.push_back(j);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // walk backwards along remaining in-arcs until a node repeats
        let mut cur = (0..n).find(|&i| indeg[i] > 0).unwrap() as u32;
        let mut seen: HashMap<u32, usize> = HashMap::new();
        let mut path = Vec::new();
        loop {
            if let Some(&at) = seen.get(&cur) {
                let mut cycle: Vec<u32> = path[at..].to_vec();
                cycle.reverse();
                return Err(cycle);
            }
            seen.insert(cur, path.len());
            path.push(cur);
            cur = *self.inn[cur as usize].iter().find(|&&p| indeg[p as usize] > 0).unwrap();
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph dual {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let ids: Vec<String> = n.vertices().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "  n{i} [label=\"{}\\nalt={:.4e}\"];", ids.join(" "), self.alt[i]);
        }
        for a in &self.arcs {
            let _ = writeln!(s, "  n{} -> n{};", a.from, a.to);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SkinLabel {
    Upper,
    Lower,
    Both,
}

/// Upper and lower complexes of K.
#[derive(Debug, Clone)]
pub struct Skins {
    pub upper: SimplicialComplex,
    pub lower: SimplicialComplex,
    pub labels: Vec<(Simplex, SkinLabel)>,
}

pub fn skins(k: &SimplicialComplex, m: &AnalyticManifold, tol: &Tolerances) -> Result<Skins> {
    let d = k.dim();
    let table = k.points();
    let mut labels = Vec::new();
    for nu in k.simplices(d - 1) {
        let tops = k.immediate_cofaces(&nu)?;
        match tops.len() {
            0 => labels.push((nu, SkinLabel::Both)),
            1 => {
                let sides = facet_sides(table, d, &tops[0], Reference::Manifold(m), tol)?;
                let side = sides.iter().find(|f| f.facet == nu).unwrap().side;
                labels.push((nu, if side == FacetSide::Upper { SkinLabel::Upper } else { SkinLabel::Lower }));
            }
            _ => {}
        }
    }
    let pick = |want: SkinLabel| labels.iter().filter(move |(_, l)| *l == want || *l == SkinLabel::Both).map(|(s, _)| *s);
    Ok(Skins { upper: k.subcomplex(pick(SkinLabel::Upper)), lower: k.subcomplex(pick(SkinLabel::Lower)), labels })
}

/// The set whose vertical convexity is checked.
#[derive(Debug, Clone, Copy)]
pub enum Shape<'a> {
    Complex(&'a SimplicialComplex),
    /// Union of balls of a common radius.
    Balls { centers: &'a [Point], radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityOptions {
    /// Witness grid spacing on M.
    pub spacing: f64,
    /// Half-length of the normal segment at each witness.
    pub half_length: f64,
    pub merge_tol: f64,
    pub exec: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConvexityReport {
    pub witnesses: usize,
    pub violations: usize,
    pub uncovered: usize,
    pub max_components: usize,
    pub max_interval_length: f64,
    pub vertically_convex: bool,
    pub covering_projection: bool,
    /// Up to ten witnesses with two or more components.
    pub examples: Vec<[f64; 3]>,
}

/// Merges intervals whose gap is at most `tol`.
pub fn merge_intervals(mut iv: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 + tol => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

struct Pieces<'a> {
    dim: usize,
    table: &'a [Point],
    cells: Vec<Simplex>,
    sheets: Vec<Simplex>,
    cell_index: BoxIndex,
    sheet_index: BoxIndex,
}

fn bbox(pts: &[Point]) -> (Point, Point) {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

impl<'a> Pieces<'a> {
    fn new(k: &'a SimplicialComplex, cell: f64) -> Self {
        let d = k.dim();
        let table = k.points().as_slice();
        let cells = k.simplices(d);
        let sheets: Vec<Simplex> =
            k.simplices(d - 1).into_iter().filter(|s| k.immediate_cofaces(s).map(|c| c.is_empty()).unwrap_or(false)).collect();
        let mut cell_index = BoxIndex::new(cell);
        for (i, s) in cells.iter().enumerate() {
            let (lo, hi) = bbox(&s.points(table));
            cell_index.insert(i as u32, &lo, &hi);
        }
        let mut sheet_index = BoxIndex::new(cell);
        for (i, s) in sheets.iter().enumerate() {
            let (lo, hi) = bbox(&s.points(table));
            sheet_index.insert(i as u32, &lo, &hi);
        }
        Pieces { dim: d, table, cells, sheets, cell_index, sheet_index }
    }

    fn intervals(&self, m: &Point, n: &Vector3<f64>, r: f64) -> Vec<(f64, f64)> {
        let a = m - n * r;
        let b = m + n * r;
        let (lo, hi) = bbox(&[a, b]);
        let mut out = Vec::new();
        for i in self.cell_index.query(&lo, &hi) {
            let verts = self.cells[i as usize].points(self.table);
            let (Some(la), Some(lb)) = (barycentric(self.dim, &verts, &a), barycentric(self.dim, &verts, &b)) else {
                continue;
            };
            let (mut s0, mut s1) = (0.0f64, 1.0f64);
            for j in 0..=self.dim {
                let (u, v) = (la[j], lb[j]);
                let dv = v - u;
                if dv.abs() < 1e-300 {
                    if u < 0.0 {
                        s0 = 1.0;
                        s1 = 0.0;
                    }
                    continue;
                }
                let s = -u / dv;
                if dv > 0.0 {
                    s0 = s0.max(s);
                } else {
                    s1 = s1.min(s);
                }
            }
            if s0 <= s1 {
                out.push((-r + 2.0 * r * s0, -r + 2.0 * r * s1));
            }
        }
        for i in self.sheet_index.query(&lo, &hi) {
            let verts = self.sheets[i as usize].points(self.table);
            if let Some(t) = hit_sheet(self.dim, &verts, m, n) {
                if t.abs() <= r {
                    out.push((t, t));
                }
            }
        }
        out
    }
}

/// Parameter t where m + t n meets the (d-1)-simplex, if it does.
fn hit_sheet(dim: usize, v: &[Point], m: &Point, n: &Vector3<f64>) -> Option<f64> {
    if dim == 2 {
        let e = v[1] - v[0];
        let det = n.x * (-e.y) - n.y * (-e.x);
        if det.abs() < 1e-15 {
            return None;
        }
        let w = v[0] - m;
        let t = (w.x * (-e.y) - w.y * (-e.x)) / det;
        let s = (n.x * w.y - n.y * w.x) / det;
        return (-1e-12..=1.0 + 1e-12).contains(&s).then_some(t);
    }
    let nt = (v[1] - v[0]).cross(&(v[2] - v[0]));
    let n2 = nt.norm_squared();
    let denom = nt.dot(n);
    if denom.abs() < 1e-12 * nt.norm() {
        return None;
    }
    let t = nt.dot(&(v[0] - m)) / denom;
    let x = m + n * t;
    for i in 0..3 {
        let (p, q) = (v[(i + 1) % 3], v[(i + 2) % 3]);
        let l = (p - x).cross(&(q - x)).dot(&nt) / n2;
        if l < -1e-12 {
            return None;
        }
    }
    Some(t)
}

/// Intersects the normal segment at every witness with X and counts the
/// connected components of the intersection.
pub fn verify_vertical_convexity(x: Shape, m: &AnalyticManifold, opts: &ConvexityOptions) -> ConvexityReport {
    let grid = m.witness_grid(opts.spacing);
    let r = opts.half_length;
    let cell = (2.0 * r).max(opts.spacing);
    let balls = match x {
        Shape::Balls { centers, radius } => Some((PointIndex::build(centers, (r + radius).max(1e-9)), radius)),
        _ => None,
    };
    let pieces = match x {
        Shape::Complex(k) => Some(Pieces::new(k, cell)),
        _ => None,
    };
    let per: Vec<Option<(usize, f64)>> = par::map(opts.exec, &grid.points, |g| {
        let (foot, n) = m.foot(g).ok()?;
        let iv = if let Some((idx, rad)) = &balls {
            let mut iv = Vec::new();
            for i in idx.within(&foot, r + rad) {
                let p = idx.points()[i];
                let w = foot - p;
                let bq = n.dot(&w);
                let c = w.norm_squared() - rad * rad;
                let disc = bq * bq - c;
                if disc < 0.0 {
                    continue;
                }
                let s = disc.sqrt();
                let (t0, t1) = ((-bq - s).max(-r), (-bq + s).min(r));
                if t0 <= t1 {
                    iv.push((t0, t1));
                }
            }
            iv
        } else {
            pieces.as_ref().unwrap().intervals(&foot, &n, r)
        };
        let merged = merge_intervals(iv, opts.merge_tol);
        let len = merged.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
        Some((merged.len(), len))
    });
    let mut report = ConvexityReport {
        witnesses: grid.points.len(),
        violations: 0,
        uncovered: 0,
        max_components: 0,
        max_interval_length: 0.0,
        vertically_convex: true,
        covering_projection: true,
        examples: Vec::new(),
    };
    for (g, p) in grid.points.iter().zip(per) {
        let Some((c, len)) = p else {
            report.uncovered += 1;
            continue;
        };
        report.max_components = report.max_components.max(c);
        report.max_interval_length = report.max_interval_length.max(len);
        if c == 0 {
            report.uncovered += 1;
        }
        if c >= 2 {
            report.violations += 1;
            if report.examples.len() < 10 {
                report.examples.push([g.x, g.y, g.z]);
            }
        }
    }
    report.vertically_convex = report.violations == 0;
    report.covering_projection = report.uncovered == 0;
    report
}

//! Analytic codimension-one manifolds with projection, normals and signed height.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use evalexpr::{ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};
use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Flat, Point};

/// Reach used for hyperplanes, which have none.
pub const UNBOUNDED_REACH: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpectedTopology {
    Circle,
    Sphere,
    Torus,
    Genus(u32),
}

impl ExpectedTopology {
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            ExpectedTopology::Circle => 0,
            ExpectedTopology::Sphere => 2,
            ExpectedTopology::Torus => 0,
            ExpectedTopology::Genus(g) => 2 - 2 * *g as i64,
        }
    }
}

/// A level set f = 0 given as an expression in x, y (and z).
#[derive(Clone)]
pub struct Implicit {
    pub source: String,
    tree: Arc<Node<DefaultNumericTypes>>,
    pub half_extent: f64,
}

impl fmt::Debug for Implicit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Implicit({:?})", self.source)
    }
}

impl PartialEq for Implicit {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.half_extent == other.half_extent
    }
}

impl Implicit {
    pub fn new(source: &str, half_extent: f64) -> Result<Implicit> {
        let tree = evalexpr::build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| Error::Parse(format!("implicit expression: {e}")))?;
        let imp = Implicit { source: source.to_string(), tree: Arc::new(tree), half_extent };
        imp.value(&Point::new(0.1, 0.2, 0.3))?;
        Ok(imp)
    }

    pub fn value(&self, p: &Point) -> Result<f64> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        for (k, v) in [("x", p.x), ("y", p.y), ("z", p.z)] {
            ctx.set_value(k.into(), Value::Float(v)).map_err(|e| Error::Parse(e.to_string()))?;
        }
        self.tree
            .eval_number_with_context(&ctx)
            .map_err(|e| Error::Parse(format!("implicit expression: {e}")))
    }

    pub fn gradient(&self, dim: usize, p: &Point) -> Result<Vector3<f64>> {
        let h = 1e-6;
        let mut g = Vector3::zeros();
        for i in 0..dim {
            let mut a = *p;
            let mut b = *p;
            a[i] += h;
            b[i] -= h;
            g[i] = (self.value(&a)? - self.value(&b)?) / (2.0 * h);
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldKind {
    Circle { center: Point, radius: f64 },
    Sphere { center: Point, radius: f64 },
    /// Axis z, centered at the origin.
    Torus { major: f64, minor: f64 },
    /// `half_extent` bounds the window used for sampling and witness grids.
    Hyperplane { base: Point, normal: Vector3<f64>, half_extent: f64 },
    Implicit(Implicit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticManifold {
    pub kind: ManifoldKind,
    pub dim: usize,
    pub reach: f64,
    pub unbounded_reach: bool,
    pub genus: Option<u32>,
    pub spec: String,
}

/// Points on M with a bound on the distance from any point of M to the nearest one.
#[derive(Debug, Clone)]
pub struct WitnessGrid {
    pub points: Vec<Point>,
    pub covering: f64,
}

fn parse_vec(s: &str) -> Result<Vector3<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad vector {s:?}"))))
        .collect::<Result<_>>()?;
    match parts.len() {
        2 => Ok(Vector3::new(parts[0], parts[1], 0.0)),
        3 => Ok(Vector3::new(parts[0], parts[1], parts[2])),
        _ => Err(Error::Parse(format!("bad vector {s:?}"))),
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

impl AnalyticManifold {
    pub fn circle(radius: f64) -> Self {
        Self::circle_at(Point::zeros(), radius)
    }

    pub fn circle_at(center: Point, radius: f64) -> Self {
        AnalyticManifold {
            kind: ManifoldKind::Circle { center, radius },
            dim: 2,
            reach: radius,
            unbounded_reach: false,
            genus: None,
            spec: format!("circle r={radius}"),
        }
    }

    pub fn sphere(radius: f64) -> Self {
        Self::sphere_at(Point::zeros(), radius)
    }

    pub fn sphere_at(center: Point, radius: f64) -> Self {
        AnalyticManifold {
            kind: ManifoldKind::Sphere { center, radius },
            dim: 3,
            reach: radius,
            unbounded_reach: false,
            genus: None,
            spec: format!("sphere r={radius}"),
        }
    }

    pub fn torus(major: f64, minor: f64) -> Self {
        AnalyticManifold {
            kind: ManifoldKind::Torus { major, minor },
            dim: 3,
            reach: minor.min(major - minor),
            unbounded_reach: false,
            genus: None,
            spec: format!("torus R={major} r={minor}"),
        }
    }

    pub fn hyperplane(dim: usize, base: Point, normal: Vector3<f64>) -> Self {
        AnalyticManifold {
            kind: ManifoldKind::Hyperplane { base, normal: normal.normalize(), half_extent: 1.0 },
            dim,
            reach: UNBOUNDED_REACH,
            unbounded_reach: true,
            genus: None,
            spec: format!("plane n={},{},{} p={},{},{}", normal.x, normal.y, normal.z, base.x, base.y, base.z),
        }
    }

    pub fn implicit(dim: usize, source: &str, reach: f64, half_extent: f64) -> Result<Self> {
        Ok(AnalyticManifold {
            kind: ManifoldKind::Implicit(Implicit::new(source, half_extent)?),
            dim,
            reach,
            unbounded_reach: false,
            genus: None,
            spec: format!("implicit f={source} R={reach}"),
        })
    }

    /// Parses `sphere r=1`, `circle r=1`, `torus R=3 r=1`, `plane n=0,0,1 p=0,0,0`,
    /// `implicit file=<path> R=<reach>` or `implicit f=<expr> R=<reach>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut words = spec.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::Parse("empty surface spec".into()))?;
        let mut kv = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {w:?}")))?;
            kv.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| kv.get(k).map(|s| s.as_str());
        let center = get("c").map(parse_vec).transpose()?.unwrap_or_else(Point::zeros);
        let mut m = match kind {
            "circle" => Self::circle_at(center, parse_num(get("r").unwrap_or("1"))?),
            "sphere" => Self::sphere_at(center, parse_num(get("r").unwrap_or("1"))?),
            "torus" => Self::torus(parse_num(get("R").unwrap_or("3"))?, parse_num(get("r").unwrap_or("1"))?),
            "plane" => {
                let n = parse_vec(get("n").ok_or_else(|| Error::Parse("plane needs n=".into()))?)?;
                let p = get("p").map(parse_vec).transpose()?.unwrap_or_else(Point::zeros);
                let dim = if get("n").map(|s| s.split(',').count()) == Some(2) { 2 } else { 3 };
                let mut m = Self::hyperplane(dim, p, n);
                if let Some(h) = get("half") {
                    if let ManifoldKind::Hyperplane { half_extent, .. } = &mut m.kind {
                        *half_extent = parse_num(h)?;
                    }
                }
                m
            }
            "implicit" => {
                let source = match (get("file"), get("f")) {
                    (Some(path), _) => std::fs::read_to_string(path)?.trim().to_string(),
                    (None, Some(f)) => f.to_string(),
                    _ => return Err(Error::Parse("implicit needs file= or f=".into())),
                };
                let reach = parse_num(get("R").ok_or_else(|| Error::Parse("implicit needs R=".into()))?)?;
                let dim = get("dim").map(parse_num).transpose()?.unwrap_or(3.0) as usize;
                let half = get("bbox").map(parse_num).transpose()?.unwrap_or(2.0);
                Self::implicit(dim, &source, reach, half)?
            }
            other => return Err(Error::Parse(format!("unknown surface kind {other:?}"))),
        };
        if let Some(g) = get("genus") {
            m.genus = Some(parse_num(g)? as u32);
        }
        if let Some(r) = get("reach") {
            m.reach = parse_num(r)?;
            m.unbounded_reach = false;
        }
        if m.reach <= 0.0 || !m.reach.is_finite() {
            return Err(Error::Parse("reach must be positive".into()));
        }
        m.spec = spec.trim().to_string();
        Ok(m)
    }

    pub fn expected_topology(&self) -> Option<ExpectedTopology> {
        match &self.kind {
            ManifoldKind::Circle { .. } => Some(ExpectedTopology::Circle),
            ManifoldKind::Sphere { .. } => Some(ExpectedTopology::Sphere),
            ManifoldKind::Torus { .. } => Some(ExpectedTopology::Torus),
            _ => self.genus.map(ExpectedTopology::Genus),
        }
    }

    fn is_closed_form(&self) -> bool {
        !matches!(self.kind, ManifoldKind::Implicit(_))
    }

    /// Signed distance, positive on the normal side. Exact for closed-form kinds;
    /// implicit kinds use the projection when it converges and f/|grad f| otherwise.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        match &self.kind {
            ManifoldKind::Circle { center, radius } | ManifoldKind::Sphere { center, radius } => {
                (x - center).norm() - radius
            }
            ManifoldKind::Torus { major, minor } => {
                let rho = (x.x * x.x + x.y * x.y).sqrt();
                ((rho - major).powi(2) + x.z * x.z).sqrt() - minor
            }
            ManifoldKind::Hyperplane { base, normal, .. } => (x - base).dot(normal),
            ManifoldKind::Implicit(imp) => match self.project_implicit(imp, x) {
                Ok((m, n)) => (x - m).dot(&n),
                Err(_) => {
                    let f = imp.value(x).unwrap_or(f64::NAN);
                    let g = imp.gradient(self.dim, x).map(|g| g.norm()).unwrap_or(f64::NAN);
                    f / g
                }
            },
        }
    }

    pub fn distance(&self, x: &Point) -> f64 {
        self.signed_distance(x).abs()
    }

    fn project_implicit(&self, imp: &Implicit, x: &Point) -> Result<(Point, Vector3<f64>)> {
        let mut y = *x;
        for _ in 0..100 {
            // Newton onto the level set along the gradient
            let f = imp.value(&y)?;
            let g = imp.gradient(self.dim, &y)?;
            let g2 = g.norm_squared();
            if g2 == 0.0 {
                return Err(Error::NearMedialAxis);
            }
            y -= g * (f / g2);
            // slide along the tangent plane toward the foot of x
            let g = imp.gradient(self.dim, &y)?;
            let n = g.normalize();
            let d = x - y;
            let tangential = d - n * n.dot(&d);
            y += tangential;
            let res = imp.value(&y)?.abs() / g.norm();
            if res < 1e-11 && tangential.norm() < 1e-9 * (1.0 + d.norm()) {
                let f = imp.value(&y)?;
                let g = imp.gradient(self.dim, &y)?;
                let y = y - g * (f / g.norm_squared());
                let n = imp.gradient(self.dim, &y)?.normalize();
                return Ok((y, n));
            }
        }
        Err(Error::NearMedialAxis)
    }

    /// Nearest point of M together with the normal there, without the reach check.
    pub fn foot(&self, x: &Point) -> Result<(Point, Vector3<f64>)> {
        match &self.kind {
            ManifoldKind::Circle { center, radius } | ManifoldKind::Sphere { center, radius } => {
                let v = x - center;
                let n = v.norm();
                if n == 0.0 {
                    return Err(Error::NearMedialAxis);
                }
                let u = v / n;
                Ok((center + u * *radius, u))
            }
            ManifoldKind::Torus { major, minor } => {
                let rho = (x.x * x.x + x.y * x.y).sqrt();
                if rho == 0.0 {
                    return Err(Error::NearMedialAxis);
                }
                let c = Point::new(x.x / rho * major, x.y / rho * major, 0.0);
                let w = x - c;
                let wn = w.norm();
                if wn == 0.0 {
                    return Err(Error::NearMedialAxis);
                }
                let u = w / wn;
                Ok((c + u * *minor, u))
            }
            ManifoldKind::Hyperplane { base, normal, .. } => Ok((x - normal * (x - base).dot(normal), *normal)),
            ManifoldKind::Implicit(imp) => self.project_implicit(imp, x),
        }
    }

    fn check_tube(&self, x: &Point) -> Result<()> {
        if !self.unbounded_reach && self.is_closed_form() && self.distance(x) > self.reach {
            return Err(Error::NearMedialAxis);
        }
        Ok(())
    }

    pub fn project(&self, x: &Point) -> Result<Point> {
        self.check_tube(x)?;
        let (m, _) = self.foot(x)?;
        if !self.is_closed_form() && (x - m).norm() >= self.reach {
            return Err(Error::NearMedialAxis);
        }
        Ok(m)
    }

    /// n(pi_M(x)) for x in the tube.
    pub fn normal_at_projection(&self, x: &Point) -> Result<Vector3<f64>> {
        self.check_tube(x)?;
        Ok(self.foot(x)?.1)
    }

    pub fn normal(&self, m: &Point) -> Result<Vector3<f64>> {
        let r = self.residual(m);
        if !(r <= 1e-9) {
            return Err(Error::NotOnManifold(r));
        }
        Ok(self.foot(m)?.1)
    }

    fn residual(&self, m: &Point) -> f64 {
        match &self.kind {
            ManifoldKind::Implicit(imp) => {
                let f = imp.value(m).unwrap_or(f64::NAN);
                let g = imp.gradient(self.dim, m).map(|g| g.norm()).unwrap_or(f64::NAN);
                (f / g).abs()
            }
            _ => self.distance(m),
        }
    }

    /// Signed height (x - pi(x)) . n(pi(x)).
    pub fn alt(&self, x: &Point) -> Result<f64> {
        self.check_tube(x)?;
        let (m, n) = self.foot(x)?;
        if !self.is_closed_form() && (x - m).norm() >= self.reach {
            return Err(Error::NearMedialAxis);
        }
        Ok((x - m).dot(&n))
    }

    pub fn tangent_flat(&self, m: &Point) -> Result<Flat> {
        let n = self.normal(m)?;
        Ok(Flat::hyperplane(self.dim, *m, &n))
    }

    /// Axis-aligned box containing M (or its sampling window).
    pub fn bounding_box(&self) -> (Point, Point) {
        match &self.kind {
            ManifoldKind::Circle { center, radius } => {
                let r = Vector3::new(*radius, *radius, 0.0);
                (center - r, center + r)
            }
            ManifoldKind::Sphere { center, radius } => {
                let r = Vector3::repeat(*radius);
                (center - r, center + r)
            }
            ManifoldKind::Torus { major, minor } => {
                let r = Vector3::new(major + minor, major + minor, *minor);
                (-r, r)
            }
            ManifoldKind::Hyperplane { base, half_extent, .. } => {
                let mut r = Vector3::repeat(*half_extent * 2f64.sqrt());
                if self.dim == 2 {
                    r.z = 0.0;
                }
                (base - r, base + r)
            }
            ManifoldKind::Implicit(imp) => {
                let mut r = Vector3::repeat(imp.half_extent);
                if self.dim == 2 {
                    r.z = 0.0;
                }
                (-r, r)
            }
        }
    }

    /// A random point of M, area-uniform for the closed-form kinds.
    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        match &self.kind {
            ManifoldKind::Circle { center, radius } => {
                let t = rng.gen_range(0.0..2.0 * PI);
                center + Vector3::new(t.cos(), t.sin(), 0.0) * *radius
            }
            ManifoldKind::Sphere { center, radius } => loop {
                let v: Vector3<f64> = Vector3::new(
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                );
                let n = v.norm();
                if n > 1e-9 {
                    break center + v / n * *radius;
                }
            },
            ManifoldKind::Torus { major, minor } => loop {
                let u = rng.gen_range(0.0..2.0 * PI);
                let v = rng.gen_range(0.0..2.0 * PI);
                let w: f64 = rng.gen_range(0.0..1.0);
                if w * (major + minor) <= major + minor * v.cos() {
                    break torus_point(*major, *minor, u, v);
                }
            },
            ManifoldKind::Hyperplane { base, normal, half_extent } => {
                let f = Flat::hyperplane(self.dim, *base, normal);
                f.basis.iter().fold(*base, |acc, b| acc + b * rng.gen_range(-*half_extent..*half_extent))
            }
            ManifoldKind::Implicit(imp) => loop {
                let mut q = Point::zeros();
                for i in 0..self.dim {
                    q[i] = rng.gen_range(-imp.half_extent..imp.half_extent);
                }
                if let Ok((m, _)) = self.project_implicit(imp, &q) {
                    break m;
                }
            },
        }
    }

    /// Witness points on M with covering bound at most `spacing`.
    /// Upper estimate of the work `witness_grid(spacing)` does: points emitted, or lattice
    /// nodes scanned for implicit kinds.
    pub fn witness_grid_size(&self, spacing: f64) -> f64 {
        let h = spacing;
        match &self.kind {
            ManifoldKind::Circle { radius, .. } => 2.0 * PI * radius / h + 1.0,
            ManifoldKind::Sphere { radius, .. } => (PI * radius / h + 1.0) * (2.0 * PI * radius / h + 1.0),
            ManifoldKind::Torus { major, minor } => {
                (2.0 * PI * (major + minor) / h + 1.0) * (2.0 * PI * minor / h + 1.0)
            }
            ManifoldKind::Hyperplane { half_extent, .. } => (2.0 * half_extent / h + 2.0).powi(self.dim as i32 - 1),
            ManifoldKind::Implicit(imp) => (4.0 * imp.half_extent / h + 2.0).powi(self.dim as i32),
        }
    }

    pub fn witness_grid(&self, spacing: f64) -> WitnessGrid {
        let h = spacing;
        let mut points = Vec::new();
        let covering;
        match &self.kind {
            ManifoldKind::Circle { center, radius } => {
                let n = ((2.0 * PI * radius / h).ceil() as usize).max(3);
                for i in 0..n {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    points.push(center + Vector3::new(t.cos(), t.sin(), 0.0) * *radius);
                }
                covering = 2.0 * radius * (PI / (2.0 * n as f64)).sin();
            }
            ManifoldKind::Sphere { center, radius } => {
                let nt = ((PI * radius / h).ceil() as usize).max(2);
                let dt = PI / nt as f64;
                for i in 0..nt {
                    let th = (i as f64 + 0.5) * dt;
                    let np = ((2.0 * PI * radius * th.sin() / h).ceil() as usize).max(1);
                    for j in 0..np {
                        let ph = 2.0 * PI * (j as f64 + 0.5 * (i % 2) as f64) / np as f64;
                        let u = Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
                        points.push(center + u * *radius);
                    }
                }
                covering = h;
            }
            ManifoldKind::Torus { major, minor } => {
                let nu = ((2.0 * PI * (major + minor) / h).ceil() as usize).max(3);
                let nv = ((2.0 * PI * minor / h).ceil() as usize).max(3);
                for i in 0..nu {
                    let u = 2.0 * PI * i as f64 / nu as f64;
                    for j in 0..nv {
                        let v = 2.0 * PI * j as f64 / nv as f64;
                        points.push(torus_point(*major, *minor, u, v));
                    }
                }
                covering = h;
            }
            ManifoldKind::Hyperplane { base, normal, half_extent } => {
                let f = Flat::hyperplane(self.dim, *base, normal);
                let n = ((2.0 * half_extent / h).ceil() as usize).max(1);
                let step = 2.0 * half_extent / n as f64;
                let coords: Vec<f64> = (0..=n).map(|i| -half_extent + i as f64 * step).collect();
                if f.basis.len() == 1 {
                    for a in &coords {
                        points.push(base + f.basis[0] * *a);
                    }
                } else {
                    for a in &coords {
                        for b in &coords {
                            points.push(base + f.basis[0] * *a + f.basis[1] * *b);
                        }
                    }
                }
                covering = step * (f.basis.len() as f64).sqrt() / 2.0;
            }
            ManifoldKind::Implicit(imp) => {
                let step = h / 2.0;
                let n = (2.0 * imp.half_extent / step).ceil() as i64;
                let nz = if self.dim == 2 { 0 } else { n };
                for i in 0..=n {
                    for j in 0..=n {
                        for k in 0..=nz {
                            let mut q = Point::new(
                                -imp.half_extent + i as f64 * step,
                                -imp.half_extent + j as f64 * step,
                                -imp.half_extent + k as f64 * step,
                            );
                            if self.dim == 2 {
                                q.z = 0.0;
                            }
                            let f = imp.value(&q).unwrap_or(f64::INFINITY);
                            let g = imp.gradient(self.dim, &q).map(|g| g.norm()).unwrap_or(0.0);
                            if g > 0.0 && (f / g).abs() < step {
                                if let Ok((m, _)) = self.project_implicit(imp, &q) {
                                    points.push(m);
                                }
                            }
                        }
                    }
                }
                covering = 2.0 * step * (self.dim as f64).sqrt() / 2.0;
            }
        }
        WitnessGrid { points, covering }
    }

    /// Parameters t in [0,1] where the segment a + t(b - a) crosses M (sign change of the height).
    pub fn segment_crossings(&self, a: &Point, b: &Point, tol: f64) -> Vec<f64> {
        let d = b - a;
        match &self.kind {
            ManifoldKind::Circle { center, radius } | ManifoldKind::Sphere { center, radius } => {
                let f = a - center;
                let qa = d.norm_squared();
                if qa == 0.0 {
                    return vec![];
                }
                let qb = 2.0 * f.dot(&d);
                let qc = f.norm_squared() - radius * radius;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc <= 0.0 {
                    return vec![];
                }
                let s = disc.sqrt();
                let sg = if qb >= 0.0 { 1.0 } else { -1.0 };
                let q = -0.5 * (qb + sg * s);
                let mut roots = vec![q / qa, if q != 0.0 { qc / q } else { -qb / (2.0 * qa) }];
                roots.retain(|t| (0.0..=1.0).contains(t));
                roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
                roots
            }
            ManifoldKind::Hyperplane { base, normal, .. } => {
                let sa = (a - base).dot(normal);
                let sb = (b - base).dot(normal);
                if (sa < 0.0) != (sb < 0.0) && sa != sb {
                    vec![sa / (sa - sb)]
                } else {
                    vec![]
                }
            }
            ManifoldKind::Torus { minor, .. } => self.march_crossings(a, b, tol, minor * 1e-3, true),
            ManifoldKind::Implicit(_) => self.march_crossings(a, b, tol, self.reach * 1e-2, false),
        }
    }

    fn march_crossings(&self, a: &Point, b: &Point, tol: f64, min_step: f64, lipschitz: bool) -> Vec<f64> {
        let len = (b - a).norm();
        if len == 0.0 {
            return vec![];
        }
        let at = |t: f64| self.signed_distance(&(a + (b - a) * t));
        let mut roots = Vec::new();
        let mut t0 = 0.0;
        let mut f0 = at(0.0);
        while t0 < 1.0 {
            let step = if lipschitz { f0.abs().max(min_step) } else { min_step };
            let t1 = (t0 + step / len).min(1.0);
            let f1 = at(t1);
            if (f0 < 0.0) != (f1 < 0.0) {
                let (mut lo, mut hi, flo) = (t0, t1, f0);
                while (hi - lo) * len > tol {
                    let mid = 0.5 * (lo + hi);
                    let fm = at(mid);
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            t0 = t1;
            f0 = f1;
        }
        roots
    }
}

pub fn torus_point(major: f64, minor: f64, u: f64, v: f64) -> Point {
    let w = major + minor * v.cos();
    Point::new(w * u.cos(), w * u.sin(), minor * v.sin())
}

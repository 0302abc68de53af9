//! (eps, delta)-samples of a manifold: generation and certification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::config::Execution;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::manifold::AnalyticManifold;
use crate::par;
use crate::spatial::PointIndex;

/// Points closer than this are duplicates.
pub const DUPLICATE_DISTANCE: f64 = 1e-12;

/// Witness grids above this size are refused.
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub manifold: AnalyticManifold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Sampled { surface: String, epsilon: f64, delta: f64, seed: u64 },
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Point>,
    pub provenance: Provenance,
}

impl PointCloud {
    /// Validates finiteness and rejects duplicates.
    pub fn new(dim: usize, points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        if let Some(i) = first_duplicate(&points) {
            return Err(Error::DuplicatePoint(i));
        }
        let mut points = points;
        if dim == 2 {
            for p in &mut points {
                p.z = 0.0;
            }
        }
        Ok(PointCloud { dim, points, provenance })
    }

    pub fn external(dim: usize, points: Vec<Point>) -> Result<Self> {
        Self::new(dim, points, Provenance::External)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn first_duplicate(points: &[Point]) -> Option<usize> {
    if points.len() < 2 {
        return None;
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let diag = (hi - lo).norm();
    let cell = (diag / (points.len() as f64).cbrt()).max(1e-9);
    let mut idx = PointIndex::new(cell);
    for (i, p) in points.iter().enumerate() {
        if idx.any_within(p, DUPLICATE_DISTANCE) {
            return Some(i);
        }
        idx.insert(*p);
    }
    None
}

/// Dart throwing on M with exclusion radius eps/2, completed to maximality over a
/// witness grid, then jittered along the normal by uniform noise in [-delta, delta].
pub fn sample_manifold(spec: &SampleSpec) -> Result<PointCloud> {
    let m = &spec.manifold;
    if !(spec.epsilon > 0.0) || spec.delta < 0.0 {
        return Err(Error::InfeasibleSpec("need epsilon > 0 and delta >= 0".into()));
    }
    if spec.epsilon >= m.reach {
        return Err(Error::InfeasibleSpec(format!("epsilon {} is not below the reach {}", spec.epsilon, m.reach)));
    }
    let r = spec.epsilon / 2.0;
    let estimate = m.witness_grid_size(spec.epsilon / 10.0);
    if !(estimate <= MAX_GRID_POINTS as f64) {
        return Err(Error::InfeasibleSpec(format!("witness grid of about {estimate:.0} points exceeds budget")));
    }
    let grid = m.witness_grid(spec.epsilon / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut idx = PointIndex::new(r);
    let stall_limit = 2000;
    let mut misses = 0;
    while misses < stall_limit {
        let q = m.random_point(&mut rng);
        if idx.any_within(&q, r) {
            misses += 1;
        } else {
            idx.insert(q);
            misses = 0;
        }
        if idx.len() > grid.points.len() {
            return Err(Error::InfeasibleSpec("dart throwing exceeded the point budget".into()));
        }
    }
    for g in &grid.points {
        if !idx.any_within(g, r) {
            idx.insert(*g);
        }
    }
    let mut points = idx.points().to_vec();
    if spec.delta > 0.0 {
        for p in &mut points {
            let n = m.normal_at_projection(p)?;
            let t: f64 = rng.gen_range(-spec.delta..=spec.delta);
            *p += n * t;
        }
    }
    PointCloud::new(
        m.dim,
        points,
        Provenance::Sampled { surface: m.spec.clone(), epsilon: spec.epsilon, delta: spec.delta, seed: spec.seed },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SampleReport {
    pub eps_ok: bool,
    pub delta_ok: bool,
    #[serde(with = "crate::config::float_or_null")]
    #[schemars(with = "Option<f64>")]
    pub measured_eps: f64,
    pub measured_delta: f64,
    /// Covering bound of the witness grid; added to `measured_eps` before comparing.
    pub grid_slack: f64,
    pub grid_points: usize,
}

/// Measures max_p d(p, M) exactly and max_{m in grid} d(m, P) on a witness grid of spacing eps/10.
pub fn verify_sample(cloud: &PointCloud, m: &AnalyticManifold, epsilon: f64, delta: f64, exec: Execution) -> SampleReport {
    let measured_delta = par::map(exec, &cloud.points, |p| m.distance(p)).into_iter().fold(0.0, f64::max);
    // coarsen past eps/10 only when the grid would blow the budget; the slack grows to match
    let mut spacing = if epsilon > 0.0 && epsilon.is_finite() { epsilon / 10.0 } else { 1e-3 };
    while !(m.witness_grid_size(spacing) <= MAX_GRID_POINTS as f64) {
        spacing *= 2.0;
    }
    let grid = m.witness_grid(spacing);
    let measured_eps = if cloud.is_empty() {
        f64::INFINITY
    } else {
        let idx = PointIndex::build(&cloud.points, (epsilon / 2.0).max(1e-9));
        par::map(exec, &grid.points, |g| idx.nearest(g).map(|(_, d)| d).unwrap_or(f64::INFINITY))
            .into_iter()
            .fold(0.0, f64::max)
    };
    SampleReport {
        eps_ok: measured_eps + grid.covering <= epsilon,
        delta_ok: measured_delta <= delta + 1e-12,
        measured_eps,
        measured_delta,
        grid_slack: grid.covering,
        grid_points: grid.points.len(),
    }
}

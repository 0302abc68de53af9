//! Closed-form sampling conditions, angle bounds, and the per-simplex angle
//! conditions checked on an alpha-complex.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::io::Write;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::config::Execution;
use crate::error::{Error, Result};
use crate::geom::{circumsphere, Point};
use crate::manifold::AnalyticManifold;
use crate::par;
use crate::vertical::{angle_extrema, AngleExtrema};

fn sqrt2() -> f64 {
    std::f64::consts::SQRT_2
}

/// Which noise regime the strict homotopy condition was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct HomotopyBranches {
    /// (R - delta)^2 - eps^2 > (4 sqrt2 - 5) R^2; evaluated when delta <= eps.
    pub small_noise: Option<bool>,
    /// eps + sqrt2 delta < (sqrt2 - 1) R; evaluated when delta >= eps.
    pub large_noise: Option<bool>,
    pub holds: bool,
}

pub fn homotopy_branches(epsilon: f64, delta: f64, r: f64) -> HomotopyBranches {
    let small = (delta <= epsilon).then(|| (r - delta).powi(2) - epsilon * epsilon > (4.0 * sqrt2() - 5.0) * r * r);
    let large = (delta >= epsilon).then(|| epsilon + sqrt2() * delta < (sqrt2() - 1.0) * r);
    let holds = small.or(large).unwrap_or(false);
    HomotopyBranches { small_noise: small, large_noise: large, holds }
}

pub fn strict_homotopy(epsilon: f64, delta: f64, r: f64) -> bool {
    homotopy_branches(epsilon, delta, r).holds
}

/// Range of alpha for which P + alpha deformation-retracts onto M, or None when
/// the strict homotopy condition fails or the interval is empty.
pub fn interval_i(epsilon: f64, delta: f64, r: f64) -> Option<(f64, f64)> {
    if !strict_homotopy(epsilon, delta, r) {
        return None;
    }
    let (lo, hi) = if delta > epsilon {
        let d0 = 2.0 * (r - delta).powi(2) - (r + epsilon).powi(2);
        if d0 < 0.0 {
            return None;
        }
        (0.5 * (r + epsilon - d0.sqrt()), 0.5 * (r + epsilon + d0.sqrt()))
    } else {
        let e2 = epsilon * epsilon;
        let rd2 = (r - delta).powi(2);
        let g = e2 - rd2;
        let d1 = g * g / (r * r) - 10.0 * g - 7.0 * r * r;
        if d1 < 0.0 {
            return None;
        }
        let base = (rd2 + r * r - e2) / r;
        let b_min = 0.25 * (base - d1.sqrt());
        let b_max = 0.25 * (base + d1.sqrt());
        let a_min2 = (1.0 + b_min / r) * e2 + b_min * b_min + (b_min / r) * (r * r - rd2);
        let a_max2 = rd2 - (r - b_max).powi(2);
        if a_min2 < 0.0 || a_max2 < 0.0 {
            return None;
        }
        (a_min2.sqrt(), a_max2.sqrt())
    };
    (lo <= hi).then_some((lo, hi))
}

/// A thickness beta with M + beta inside P + alpha whenever M is inside P + eps.
pub fn beta_of(epsilon: f64, alpha: f64, r: f64) -> Result<f64> {
    let e2 = epsilon * epsilon;
    let rad = alpha * alpha + e2 * e2 / (4.0 * r * r) - e2;
    if rad < 0.0 {
        return Err(Error::ImaginaryBeta);
    }
    Ok(-e2 / (2.0 * r) + rad.sqrt())
}

fn checked_asin(x: f64) -> Result<f64> {
    if x > 1.0 {
        return Err(Error::BoundExceedsOne(x));
    }
    Ok(x.asin())
}

/// Upper bound on the angle between an edge of length `len` with endpoints on
/// M and the tangent plane at an endpoint.
pub fn edge_angle_bound(len: f64, r: f64) -> Result<f64> {
    checked_asin(len / (2.0 * r))
}

/// Upper bound on the angle between a triangle with vertices on M and the
/// tangent plane at the vertex opposite its longest edge.
pub fn triangle_angle_bound(tri: &[Point; 3], r: f64) -> Result<f64> {
    let rho = circumsphere(tri)?.radius;
    checked_asin(if is_obtuse(tri) { rho / r } else { 3f64.sqrt() * rho / r })
}

fn opposite_lengths2(tri: &[Point; 3]) -> [f64; 3] {
    [(tri[1] - tri[2]).norm_squared(), (tri[0] - tri[2]).norm_squared(), (tri[0] - tri[1]).norm_squared()]
}

/// Index of the vertex opposite the longest edge.
pub fn apex_of_longest_edge(tri: &[Point; 3]) -> usize {
    let l = opposite_lengths2(tri);
    (0..3).max_by(|&i, &j| l[i].total_cmp(&l[j])).unwrap()
}

/// Whether the angle opposite the longest edge exceeds pi/2.
pub fn is_obtuse(tri: &[Point; 3]) -> bool {
    let mut l = opposite_lengths2(tri);
    l.sort_by(f64::total_cmp);
    l[2] > l[0] + l[1]
}

/// Bound on max minus min over vertices of the angle with the tangent plane.
pub fn angular_deviation_spread_bound(rho: f64, r: f64) -> Result<f64> {
    Ok(2.0 * checked_asin(rho / r)?)
}

/// 2 asin(x/2) + asin(x) < pi/2, x = eps / R.
pub fn purity_threshold_check(epsilon: f64, r: f64) -> bool {
    let x = epsilon / r;
    x < 1.0 && 2.0 * (x / 2.0).asin() + x.asin() < FRAC_PI_2
}

/// Root of 2 asin(x/2) + asin(x) = pi/2 on [0, 1], by bisection.
pub fn purity_threshold() -> f64 {
    let g = |x: f64| 2.0 * (x / 2.0).asin() + x.asin() - FRAC_PI_2;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SamplingParams {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
}

impl SamplingParams {
    /// Parameters with beta = beta_of(eps, alpha, R).
    pub fn new(epsilon: f64, delta: f64, alpha: f64, r: f64) -> Result<Self> {
        Ok(SamplingParams { epsilon, delta, alpha, beta: beta_of(epsilon, alpha, r)?, r })
    }

    /// Argument of the arcsin on the right of the vertex condition.
    pub fn vertex_condition_arg(&self) -> f64 {
        let SamplingParams { delta, alpha, beta, r, .. } = *self;
        ((r + beta).powi(2) - (r + delta).powi(2) - alpha * alpha) / (2.0 * (r + delta) * alpha)
    }

    /// Argument of the arcsin on the right of the facet condition.
    pub fn facet_condition_arg(&self) -> f64 {
        self.alpha / (2.0 * (self.r - self.delta - self.alpha))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub homotopy: HomotopyBranches,
    pub interval: Option<[f64; 2]>,
    pub alpha_upper: f64,
    /// alpha in [delta, 2(R - delta)/3) and in the interval.
    pub passes: bool,
}

pub fn gate(p: &SamplingParams) -> Gate {
    let homotopy = homotopy_branches(p.epsilon, p.delta, p.r);
    let interval = interval_i(p.epsilon, p.delta, p.r).map(|(a, b)| [a, b]);
    let alpha_upper = 2.0 * (p.r - p.delta) / 3.0;
    let in_i = interval.map(|[a, b]| a <= p.alpha && p.alpha <= b).unwrap_or(false);
    let passes = homotopy.holds && in_i && p.delta <= p.alpha && p.alpha < alpha_upper;
    Gate { homotopy, interval, alpha_upper, passes }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConditionMargin {
    pub pass: bool,
    /// Right side minus the worst measured left side, radians; null when
    /// no simplex was evaluated.
    #[serde(with = "crate::config::float_or_null")]
    #[schemars(with = "Option<f64>")]
    pub margin: f64,
    pub rhs: f64,
    /// Whether the arcsin on the right is defined.
    pub well_defined: bool,
    pub worst: Option<Simplex>,
    pub evaluated: usize,
    /// Facet condition only: margin against the grid minimum over the support.
    pub grid_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConditionReport {
    pub params: SamplingParams,
    pub gate: Gate,
    /// max over Conv tau of the angle < pi/2, for 0 < dim tau < d.
    pub c2: ConditionMargin,
    /// min over vertices of the angle < asin(((R+b)^2 - (R+d)^2 - a^2) / (2(R+d)a)).
    pub c3: ConditionMargin,
    /// min of the angle < pi/2 - 2 asin(a / (2(R - d - a))), for (d-1)-simplices.
    pub c4: ConditionMargin,
    /// max over vertices of the angle < pi/4, for (d-1)-simplices.
    pub c5: ConditionMargin,
}

impl ConditionReport {
    pub fn naive_ok(&self) -> bool {
        self.c2.pass && self.c3.pass && self.c4.pass
    }

    pub fn practical_ok(&self) -> bool {
        self.naive_ok() && self.c5.pass
    }
}

fn worst_of(items: impl Iterator<Item = (Simplex, f64)>, rhs: f64, well_defined: bool) -> ConditionMargin {
    let mut worst = None;
    let mut lhs = f64::NEG_INFINITY;
    let mut n = 0;
    for (s, v) in items {
        n += 1;
        if v > lhs {
            lhs = v;
            worst = Some(s);
        }
    }
    let margin = if n == 0 { f64::INFINITY } else { rhs - lhs };
    ConditionMargin { pass: well_defined && margin > 0.0, margin, rhs, well_defined, worst, evaluated: n, grid_margin: None }
}

/// Measures the angle conditions on every relevant simplex of K.
pub fn check_reconstruction_conditions(
    k: &SimplicialComplex,
    m: &AnalyticManifold,
    p: &SamplingParams,
    resolution: usize,
    exec: Execution,
) -> Result<ConditionReport> {
    let d = k.dim();
    let table = k.points();
    let mut simplices = Vec::new();
    for i in 1..d {
        simplices.extend(k.simplices(i));
    }
    let ext: Vec<Result<AngleExtrema>> = par::map(exec, &simplices, |s| angle_extrema(m, &s.points(table), resolution));
    let ext: Vec<AngleExtrema> = ext.into_iter().collect::<Result<_>>()?;
    let pairs = || simplices.iter().copied().zip(ext.iter().copied());

    let c2 = worst_of(pairs().map(|(s, e)| (s, e.max)), FRAC_PI_2, true);

    let a3 = p.vertex_condition_arg();
    let c3 = worst_of(pairs().map(|(s, e)| (s, e.vertex_min)), a3.clamp(-1.0, 1.0).asin(), a3 >= -1.0);

    let a4 = p.facet_condition_arg();
    let ok4 = (0.0..=1.0).contains(&a4);
    let rhs4 = FRAC_PI_2 - 2.0 * a4.clamp(0.0, 1.0).asin();
    let facets = || pairs().filter(|(s, _)| s.dim() + 1 == d);
    let mut c4 = worst_of(facets().map(|(s, e)| (s, e.vertex_min)), rhs4, ok4);
    c4.grid_margin = Some(worst_of(facets().map(|(s, e)| (s, e.min)), rhs4, ok4).margin);

    let c5 = worst_of(facets().map(|(s, e)| (s, e.vertex_max)), FRAC_PI_4, true);

    Ok(ConditionReport { params: *p, gate: gate(p), c2, c3, c4, c5 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RegionRow {
    pub eps_over_r: f64,
    pub alpha_over_r: f64,
    pub naive_feasible: bool,
    pub practical_feasible: bool,
}

/// Sampling conditions for noiseless surfaces in R^3, at R = 1.
pub fn region_point(eps: f64, alpha: f64) -> RegionRow {
    let s3 = 3f64.sqrt();
    let aux = alpha > 0.0
        && eps <= (6.0 - 4.0 * sqrt2()).sqrt()
        && alpha <= 1.0 / s3
        && interval_i(eps, 0.0, 1.0).map(|(a, b)| a <= alpha && alpha <= b).unwrap_or(false);
    let naive = aux
        && match beta_of(eps, alpha, 1.0) {
            Ok(beta) => {
                let t1 = ((1.0 + beta).powi(2) - 1.0 - alpha * alpha) / (2.0 * alpha);
                let t2 = (2.0 * alpha.asin()).cos();
                s3 * alpha < t1.min(t2)
            }
            Err(_) => false,
        };
    let practical = naive && s3 * alpha < (FRAC_PI_4 - 2.0 * alpha.asin()).sin();
    RegionRow { eps_over_r: eps, alpha_over_r: alpha, naive_feasible: naive, practical_feasible: practical }
}

/// Points probed in addition to the grid.
pub const REGION_PROBES: [(f64, f64); 3] = [(0.225, 0.359), (0.178, 0.207), (0.5, 0.5)];

/// Grid over [0, extent]^2 with `grid` samples per axis, then the probe rows.
pub fn feasible_region_3d(grid: usize, extent: f64, exec: Execution) -> Vec<RegionRow> {
    let grid = grid.max(2);
    let step = extent / (grid - 1) as f64;
    let mut rows = par::map_range(exec, grid * grid, |i| region_point((i / grid) as f64 * step, (i % grid) as f64 * step));
    rows.extend(REGION_PROBES.iter().map(|&(e, a)| region_point(e, a)));
    rows
}

pub const REGION_HEADER: &str = "eps_over_R,alpha_over_R,naive_feasible,practical_feasible";

pub fn write_region_csv<W: Write>(rows: &[RegionRow], w: &mut W) -> Result<()> {
    writeln!(w, "{REGION_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.eps_over_r, r.alpha_over_r, r.naive_feasible, r.practical_feasible)?;
    }
    Ok(())
}

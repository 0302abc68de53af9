use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

/// Normalized Gram determinant below which a point set counts as affinely degenerate.
pub const DEGENERATE_GRAM: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point,
    pub radius: f64,
}

impl Sphere {
    pub fn contains(&self, p: &Point, slack: f64) -> bool {
        (p - self.center).norm() <= self.radius + slack
    }
}

/// Center and squared radius of the smallest sphere through all points
/// (center in their affine hull).
pub fn circumcenter(pts: &[Point]) -> Result<(Point, f64)> {
    let k = pts.len().checked_sub(1).ok_or(Error::DegenerateSimplex)?;
    if k == 0 {
        return Ok((pts[0], 0.0));
    }
    if k > 3 {
        return Err(Error::DegenerateSimplex);
    }
    let p0 = pts[0];
    let e: Vec<Vector3<f64>> = pts[1..].iter().map(|p| p - p0).collect();
    let mut g = Matrix3::<f64>::identity();
    let mut b = Vector3::<f64>::zeros();
    let mut diag = 1.0;
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = e[i].dot(&e[j]);
        }
        b[i] = 0.5 * e[i].norm_squared();
        diag *= g[(i, i)];
    }
    if diag == 0.0 {
        return Err(Error::DegenerateSimplex);
    }
    let det = g.determinant();
    if !(det / diag > DEGENERATE_GRAM) {
        return Err(Error::DegenerateSimplex);
    }
    let lam = g.lu().solve(&b).ok_or(Error::DegenerateSimplex)?;
    let mut off = Vector3::zeros();
    for i in 0..k {
        off += e[i] * lam[i];
    }
    let c = p0 + off;
    let r2 = pts.iter().map(|p| (p - c).norm_squared()).fold(0.0, f64::max);
    Ok((c, r2))
}

pub fn circumsphere(pts: &[Point]) -> Result<Sphere> {
    let (center, r2) = circumcenter(pts)?;
    Ok(Sphere { center, radius: r2.sqrt() })
}

fn ball_from_support(support: &[Point]) -> Sphere {
    match support.len() {
        0 => Sphere { center: Point::zeros(), radius: -1.0 },
        1 => Sphere { center: support[0], radius: 0.0 },
        _ => circumsphere(support).unwrap_or_else(|_| {
            // affinely dependent support: fall back to the widest pair
            let mut best = Sphere { center: support[0], radius: 0.0 };
            for i in 0..support.len() {
                for j in i + 1..support.len() {
                    let r = 0.5 * (support[i] - support[j]).norm();
                    if r > best.radius {
                        best = Sphere { center: 0.5 * (support[i] + support[j]), radius: r };
                    }
                }
            }
            best
        }),
    }
}

fn mtf(pts: &mut [Point], n: usize, support: &mut Vec<Point>) -> Sphere {
    let mut ball = ball_from_support(support);
    if support.len() == 4 {
        return ball;
    }
    for i in 0..n {
        let slack = 1e-12 * ball.radius.max(1.0);
        if ball.radius < 0.0 || !ball.contains(&pts[i], slack) {
            support.push(pts[i]);
            ball = mtf(pts, i, support);
            support.pop();
            pts[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest ball containing all points (Welzl, move-to-front variant).
pub fn min_enclosing_sphere(points: &[Point]) -> Sphere {
    let mut pts = points.to_vec();
    let n = pts.len();
    let mut support = Vec::with_capacity(4);
    mtf(&mut pts, n, &mut support)
}

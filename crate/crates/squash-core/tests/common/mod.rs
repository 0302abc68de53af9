//! Brute-force alpha values from the empty-sphere definition.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squash_core::geom::{p3, Point};
use squash_core::{PointCloud, Simplex};

pub fn subsets(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i as u32);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Smallest sphere through all of `pts` (center in their affine hull), or None when degenerate.
pub fn smallest_circumsphere(pts: &[Point]) -> Option<(Point, f64)> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    if k == 0 {
        return Some((p0, 0.0));
    }
    let v: Vec<_> = pts[1..].iter().map(|p| p - p0).collect();
    let g = DMatrix::from_fn(k, k, |i, j| v[i].dot(&v[j]));
    let scale = v.iter().map(|x| x.norm_squared()).fold(0.0, f64::max);
    if g.determinant().abs() <= 1e-12 * scale.powi(k as i32) {
        return None;
    }
    let rhs = DVector::from_fn(k, |i, _| 0.5 * v[i].norm_squared());
    let lam = g.lu().solve(&rhs)?;
    let c = v.iter().zip(lam.iter()).fold(p0, |c, (vi, l)| c + vi * *l);
    Some((c, (c - p0).norm()))
}

/// alpha(sigma) from the Voronoi definition: the smallest empty sphere having sigma on its
/// boundary. Its center solves a convex program whose optimum is the smallest circumsphere
/// of sigma plus the active sites, so enumerating supersets is exact in general position.
pub fn alpha_oracle(pts: &[Point], dim: usize, sigma: &[u32]) -> Option<f64> {
    let n = pts.len();
    let mut best: Option<f64> = None;
    for extra in 0..=(dim + 1 - sigma.len()) {
        for add in subsets(n, extra) {
            if add.iter().any(|i| sigma.contains(i)) {
                continue;
            }
            let s: Vec<Point> = sigma.iter().chain(&add).map(|&i| pts[i as usize]).collect();
            let Some((c, r)) = smallest_circumsphere(&s) else { continue };
            let empty = (0..n as u32)
                .filter(|i| !sigma.contains(i) && !add.contains(i))
                .all(|i| (pts[i as usize] - c).norm() > r * (1.0 + 1e-9));
            if empty {
                best = Some(best.map_or(r, |b: f64| b.min(r)));
            }
        }
    }
    best
}

pub fn oracle_table(pts: &[Point], dim: usize) -> BTreeMap<Simplex, f64> {
    let mut out = BTreeMap::new();
    for k in 1..=dim + 1 {
        for s in subsets(pts.len(), k) {
            if let Some(a) = alpha_oracle(pts, dim, &s) {
                out.insert(Simplex::new(&s), a);
            }
        }
    }
    out
}

pub fn random_cloud(dim: usize, n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| {
            let z = if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 };
            p3(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), z)
        })
        .collect();
    PointCloud::external(dim, pts).unwrap()
}

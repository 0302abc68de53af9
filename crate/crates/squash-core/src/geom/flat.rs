use nalgebra::{DMatrix, Vector3};

use super::Point;
use crate::error::{Error, Result};

/// An affine flat: base point plus orthonormal directions.
#[derive(Debug, Clone, PartialEq)]
pub struct Flat {
    pub base: Point,
    pub basis: Vec<Vector3<f64>>,
}

impl Flat {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Affine hull of the points. Errors if they are affinely dependent.
    pub fn through(pts: &[Point]) -> Result<Flat> {
        let base = pts[0];
        let dirs: Vec<Vector3<f64>> = pts[1..].iter().map(|p| p - base).collect();
        let basis = orthonormalize(&dirs).ok_or(Error::DegenerateSimplex)?;
        Ok(Flat { base, basis })
    }

    /// Hyperplane through `base` with unit normal `normal` in R^dim (dim 2 lives in z = 0).
    pub fn hyperplane(dim: usize, base: Point, normal: &Vector3<f64>) -> Flat {
        let n = normal.normalize();
        let basis = match dim {
            2 => vec![Vector3::new(-n.y, n.x, 0.0)],
            _ => {
                let (a, b) = complement_basis(&n);
                vec![a, b]
            }
        };
        Flat { base, basis }
    }

    pub fn project_direction(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.basis.iter().fold(Vector3::zeros(), |acc, b| acc + b * b.dot(v))
    }

    pub fn contains_direction(&self, v: &Vector3<f64>, tol: f64) -> bool {
        (v - self.project_direction(v)).norm() <= tol * v.norm().max(1.0)
    }
}

/// Gram-Schmidt with a relative rank check.
pub fn orthonormalize(dirs: &[Vector3<f64>]) -> Option<Vec<Vector3<f64>>> {
    let scale = dirs.iter().map(|d| d.norm()).fold(0.0, f64::max);
    if scale == 0.0 && !dirs.is_empty() {
        return None;
    }
    let mut out: Vec<Vector3<f64>> = Vec::with_capacity(dirs.len());
    for d in dirs {
        let mut v = *d;
        for _ in 0..2 {
            for b in &out {
                v -= b * b.dot(&v);
            }
        }
        let n = v.norm();
        if n <= 1e-10 * scale {
            return None;
        }
        out.push(v / n);
    }
    Some(out)
}

/// Two unit vectors completing `n` to an orthonormal frame.
pub fn complement_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let a = (pick - n * n.dot(&pick)).normalize();
    let b = n.cross(&a);
    (a, b)
}

/// max over unit u in U of min over unit v in V of the angle between u and v.
/// The sine is the largest singular value of (I - P_V) U_basis and the cosine
/// the smallest of P_V U_basis; atan2 keeps both ends of [0, pi/2] accurate.
pub fn angle_between_flats(u: &Flat, v: &Flat) -> Result<f64> {
    if u.dim() == 0 {
        return Err(Error::ZeroDimFlat);
    }
    let k = u.dim();
    let on: Vec<Vector3<f64>> = u.basis.iter().map(|b| v.project_direction(b)).collect();
    let off = DMatrix::from_fn(3, k, |i, j| u.basis[j][i] - on[j][i]);
    let on = DMatrix::from_fn(3, k, |i, j| on[j][i]);
    let smax = off.singular_values().iter().cloned().fold(0.0, f64::max);
    let cmin = if k > 3 { 0.0 } else { on.singular_values().iter().cloned().fold(f64::INFINITY, f64::min) };
    Ok(smax.atan2(cmin))
}

/// Angle between span(`dirs_basis`) and a hyperplane with unit normal `n`.
/// Same value as `angle_between_flats` for that pair, without the SVD.
pub fn angle_to_hyperplane(basis: &[Vector3<f64>], n: &Vector3<f64>) -> f64 {
    let p: Vector3<f64> = basis.iter().fold(Vector3::zeros(), |acc, b| acc + b * b.dot(n));
    let s = p.norm();
    let c = (n - p).norm();
    s.atan2(c)
}

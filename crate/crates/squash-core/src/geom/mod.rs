//! Geometric primitives: predicates, circumspheres, enclosing spheres, flats and angles.

mod flat;
mod predicates;
mod sphere;

pub use flat::{angle_between_flats, angle_to_hyperplane, complement_basis, orthonormalize, Flat};
pub use predicates::{in_sphere, in_sphere_perturbed, orient};
pub use sphere::{circumcenter, circumsphere, min_enclosing_sphere, Sphere, DEGENERATE_GRAM};

use nalgebra::Vector3;

/// A point of R^d stored in three coordinates; planar data keeps z = 0.
pub type Point = Vector3<f64>;

pub fn p2(x: f64, y: f64) -> Point {
    Point::new(x, y, 0.0)
}

pub fn p3(x: f64, y: f64, z: f64) -> Point {
    Point::new(x, y, z)
}

pub fn barycenter(pts: &[Point]) -> Point {
    pts.iter().fold(Point::zeros(), |a, p| a + p) / pts.len() as f64
}

/// Unit normal of the facet `facet` (d points) pointing away from `apex`.
pub fn outward_normal(dim: usize, facet: &[Point], apex: &Point) -> Option<Vector3<f64>> {
    let raw = match dim {
        2 => {
            let e = facet[1] - facet[0];
            Vector3::new(-e.y, e.x, 0.0)
        }
        _ => (facet[1] - facet[0]).cross(&(facet[2] - facet[0])),
    };
    let n = raw.norm();
    if n == 0.0 {
        return None;
    }
    let mut v = raw / n;
    if v.dot(&(apex - facet[0])) > 0.0 {
        v = -v;
    }
    Some(v)
}

/// Barycentric coordinates of `x` with respect to a full-dimensional simplex.
pub fn barycentric(dim: usize, verts: &[Point], x: &Point) -> Option<[f64; 4]> {
    let mut out = [0.0; 4];
    match dim {
        2 => {
            let (a, b, c) = (verts[0], verts[1], verts[2]);
            let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            if det == 0.0 {
                return None;
            }
            let l1 = ((x.x - a.x) * (c.y - a.y) - (c.x - a.x) * (x.y - a.y)) / det;
            let l2 = ((b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y)) / det;
            out[0] = 1.0 - l1 - l2;
            out[1] = l1;
            out[2] = l2;
        }
        _ => {
            let m = nalgebra::Matrix3::from_columns(&[verts[1] - verts[0], verts[2] - verts[0], verts[3] - verts[0]]);
            let l = m.lu().solve(&(x - verts[0]))?;
            out[0] = 1.0 - l.x - l.y - l.z;
            out[1] = l.x;
            out[2] = l.y;
            out[3] = l.z;
        }
    }
    Some(out)
}

//! Delaunay complexes in the plane and in space, and their alpha filtrations.

mod alpha;
mod triangulation;

pub use alpha::{AlphaComplex, CACHE_MAGIC, CACHE_VERSION};

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::sampling::PointCloud;

use triangulation::Triangulation;

/// All Delaunay simplices of a point set, with facet adjacency among d-simplices.
#[derive(Debug, Clone)]
pub struct DelaunayComplex {
    pub dim: usize,
    pub points: Arc<Vec<Point>>,
    /// d-simplices, sorted.
    pub cells: Vec<Simplex>,
    /// For each cell, the neighbor across the facet opposite each vertex (in
    /// sorted vertex order); None on the convex hull.
    pub neighbors: Vec<[Option<u32>; 4]>,
    /// Simplices per dimension 0..=dim, sorted.
    pub faces: Vec<Vec<Simplex>>,
    cell_index: HashMap<Simplex, u32>,
}

/// Delaunay complex of `cloud`. Ties are broken by symbolic perturbation keyed on input order.
pub fn delaunay(cloud: &PointCloud) -> Result<DelaunayComplex> {
    DelaunayComplex::build(cloud.dim, Arc::new(cloud.points.clone()))
}

/// Alpha filtration values of every Delaunay simplex.
pub fn alpha_values(d: DelaunayComplex, exec: crate::config::Execution) -> AlphaComplex {
    AlphaComplex::new(d, exec)
}

/// Simplices whose filtration radius is at most `alpha`.
pub fn alpha_complex(a: &AlphaComplex, alpha: f64) -> SimplicialComplex {
    a.complex(alpha)
}

impl DelaunayComplex {
    pub fn build(dim: usize, points: Arc<Vec<Point>>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Parse(format!("unsupported dimension {dim}")));
        }
        let tri = Triangulation::build(dim, &points)?;
        let raw: Vec<Simplex> = tri.finite_cells().map(|c| Simplex::new(&c.v[..=dim])).collect();
        Ok(Self::from_cells(dim, points.clone(), raw))
    }

    /// Rebuilds adjacency and faces from a list of d-simplices.
    pub fn from_cells(dim: usize, points: Arc<Vec<Point>>, mut raw: Vec<Simplex>) -> Self {
        raw.sort_unstable();
        let cell_index: HashMap<Simplex, u32> = raw.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        let mut neighbors = vec![[None; 4]; raw.len()];
        let mut open: HashMap<Simplex, (u32, usize)> = HashMap::new();
        for (ci, c) in raw.iter().enumerate() {
            for (slot, &v) in c.vertices().iter().enumerate() {
                let f = c.without(v).unwrap();
                if let Some((o, os)) = open.remove(&f) {
                    neighbors[ci][slot] = Some(o);
                    neighbors[o as usize][os] = Some(ci as u32);
                } else {
                    open.insert(f, (ci as u32, slot));
                }
            }
        }
        let mut faces: Vec<Vec<Simplex>> = vec![Vec::new(); dim + 1];
        let mut seen = std::collections::HashSet::new();
        for c in &raw {
            for f in c.faces() {
                if seen.insert(f) {
                    faces[f.dim()].push(f);
                }
            }
        }
        for f in &mut faces {
            f.sort_unstable();
        }
        DelaunayComplex { dim, points, cells: raw, neighbors, faces, cell_index }
    }

    /// Delaunay complex of at most dim affinely independent points: all subsets.
    pub fn small(dim: usize, points: Arc<Vec<Point>>) -> Result<Self> {
        if points.len() > dim {
            return Self::build(dim, points);
        }
        let n = points.len() as u32;
        let all: Vec<u32> = (0..n).collect();
        let mut faces: Vec<Vec<Simplex>> = vec![Vec::new(); dim + 1];
        if n > 0 {
            for f in Simplex::new(&all).faces() {
                faces[f.dim()].push(f);
            }
        }
        for f in &mut faces {
            f.sort_unstable();
        }
        Ok(DelaunayComplex { dim, points, cells: vec![], neighbors: vec![], faces, cell_index: HashMap::new() })
    }

    pub fn cell_id(&self, s: &Simplex) -> Option<u32> {
        self.cell_index.get(s).copied()
    }

    /// Map from (d-1)-simplex to incident d-simplex ids.
    pub fn facet_map(&self) -> HashMap<Simplex, Vec<u32>> {
        let mut m: HashMap<Simplex, Vec<u32>> = HashMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            for (_, f) in c.facets() {
                m.entry(f).or_default().push(i as u32);
            }
        }
        m
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.faces.iter().flatten()
    }

    pub fn to_complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_closure(self.dim, self.points.clone(), self.all_simplices().copied())
    }

    pub fn len(&self) -> usize {
        self.faces.iter().map(|f| f.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

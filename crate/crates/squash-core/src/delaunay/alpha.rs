use std::collections::HashMap;
use std::io::{BufRead, Read, Write};
use std::sync::Arc;

use super::DelaunayComplex;
use crate::complex::{Simplex, SimplicialComplex};
use crate::config::Execution;
use crate::error::{Error, Result};
use crate::geom::{circumcenter, Point};
use crate::par;

pub const CACHE_MAGIC: &[u8; 4] = b"SQAC";
pub const CACHE_VERSION: u32 = 1;

/// Delaunay complex with per-simplex filtration values, stored squared.
#[derive(Debug, Clone)]
pub struct AlphaComplex {
    pub delaunay: DelaunayComplex,
    /// Squared alpha per simplex, aligned with `delaunay.faces`.
    pub alpha2: Vec<Vec<f64>>,
    index: HashMap<Simplex, u32>,
}

fn build_index(d: &DelaunayComplex) -> HashMap<Simplex, u32> {
    let mut index = HashMap::new();
    for fs in &d.faces {
        for (i, s) in fs.iter().enumerate() {
            index.insert(*s, i as u32);
        }
    }
    index
}

impl AlphaComplex {
    /// Smallest r with V(sigma, P) meeting P + B(r), for every Delaunay simplex.
    /// Top simplices take their circumradius; a lower simplex takes the radius of
    /// its smallest circumsphere when no vertex of an incident top simplex lies
    /// strictly inside it, and otherwise the minimum over its immediate cofaces.
    pub fn new(delaunay: DelaunayComplex, exec: Execution) -> Self {
        let d = &delaunay;
        let index = build_index(d);
        let pts = &d.points;
        // maximal simplices: the cells, or the single simplex of a tiny input
        let tops: Vec<Simplex> = if d.cells.is_empty() {
            d.faces.iter().rev().find(|f| !f.is_empty()).cloned().unwrap_or_default()
        } else {
            d.cells.clone()
        };
        let top_dim = tops.first().map(|s| s.dim()).unwrap_or(0);
        let mut incident: HashMap<Simplex, Vec<u32>> = HashMap::new();
        for (i, c) in tops.iter().enumerate() {
            for f in c.faces() {
                if f != *c {
                    incident.entry(f).or_default().push(i as u32);
                }
            }
        }
        let mut alpha2: Vec<Vec<f64>> = d.faces.iter().map(|f| vec![f64::INFINITY; f.len()]).collect();
        for k in (0..=top_dim).rev() {
            let above = if k + 1 <= top_dim { Some(&alpha2[k + 1]) } else { None };
            let vals = par::map(exec, &d.faces[k], |s| {
                if k == 0 {
                    return 0.0;
                }
                let (z, r2) = match circumcenter(&s.points(pts)) {
                    Ok(c) => c,
                    Err(_) => return f64::INFINITY,
                };
                let Some(cells) = incident.get(s) else {
                    return r2;
                };
                let mut attached = false;
                let mut min_cof = f64::INFINITY;
                for &c in cells {
                    for &v in tops[c as usize].vertices() {
                        if s.contains(v) {
                            continue;
                        }
                        if (pts[v as usize] - z).norm_squared() < r2 {
                            attached = true;
                        }
                        let cof = s.with(v);
                        let a = above.unwrap()[index[&cof] as usize];
                        min_cof = min_cof.min(a);
                    }
                }
                if attached {
                    min_cof
                } else {
                    r2.min(min_cof)
                }
            });
            alpha2[k] = vals;
        }
        AlphaComplex { delaunay, alpha2, index }
    }

    pub fn alpha2(&self, s: &Simplex) -> Option<f64> {
        self.index.get(s).map(|&i| self.alpha2[s.dim()][i as usize])
    }

    /// Sublevel complex {sigma : alpha(sigma) <= alpha}, closed under faces.
    pub fn complex(&self, alpha: f64) -> SimplicialComplex {
        let a2 = if alpha.is_infinite() { f64::INFINITY } else { alpha * alpha };
        let keep = self
            .delaunay
            .faces
            .iter()
            .zip(&self.alpha2)
            .flat_map(|(fs, vs)| fs.iter().zip(vs).filter(|(_, &v)| v <= a2).map(|(s, _)| *s));
        SimplicialComplex::from_closure(self.delaunay.dim, self.delaunay.points.clone(), keep)
    }

    pub fn write_cache<W: Write>(&self, w: &mut W) -> Result<()> {
        let d = &self.delaunay;
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(d.dim as u32).to_le_bytes())?;
        w.write_all(&(d.points.len() as u64).to_le_bytes())?;
        for p in d.points.iter() {
            for c in p.iter() {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        for (fs, vs) in d.faces.iter().zip(&self.alpha2) {
            w.write_all(&(fs.len() as u64).to_le_bytes())?;
            for (s, v) in fs.iter().zip(vs) {
                for id in s.vertices() {
                    w.write_all(&id.to_le_bytes())?;
                }
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_cache<R: Read>(r: &mut R) -> Result<Self> {
        fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
            let mut b = [0u8; N];
            r.read_exact(&mut b)?;
            Ok(b)
        }
        if &take::<4, _>(r)? != CACHE_MAGIC {
            return Err(Error::Parse("not an alpha-complex cache".into()));
        }
        let version = u32::from_le_bytes(take(r)?);
        if version != CACHE_VERSION {
            return Err(Error::Parse(format!("cache version {version}, expected {CACHE_VERSION}")));
        }
        let dim = u32::from_le_bytes(take(r)?) as usize;
        if dim != 2 && dim != 3 {
            return Err(Error::Parse(format!("bad dimension {dim} in cache")));
        }
        let n = u64::from_le_bytes(take(r)?) as usize;
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let x = f64::from_le_bytes(take(r)?);
            let y = f64::from_le_bytes(take(r)?);
            let z = f64::from_le_bytes(take(r)?);
            points.push(Point::new(x, y, z));
        }
        let mut faces = Vec::new();
        let mut alpha2 = Vec::new();
        for k in 0..=dim {
            let m = u64::from_le_bytes(take(r)?) as usize;
            let mut fs = Vec::with_capacity(m);
            let mut vs = Vec::with_capacity(m);
            for _ in 0..m {
                let mut ids = [0u32; 4];
                for id in ids.iter_mut().take(k + 1) {
                    *id = u32::from_le_bytes(take(r)?);
                    if *id as usize >= n {
                        return Err(Error::Parse("vertex id out of range in cache".into()));
                    }
                }
                fs.push(Simplex::new(&ids[..=k]));
                vs.push(f64::from_le_bytes(take(r)?));
            }
            faces.push(fs);
            alpha2.push(vs);
        }
        let points = Arc::new(points);
        let mut delaunay = DelaunayComplex::from_cells(dim, points, faces[dim].clone());
        if faces[dim].is_empty() {
            delaunay.faces = faces.clone();
        }
        if delaunay.faces != faces {
            return Err(Error::Parse("cache simplices are not a sorted Delaunay complex".into()));
        }
        let index = build_index(&delaunay);
        Ok(AlphaComplex { delaunay, alpha2, index })
    }

    /// One line per simplex: `dim ids... alpha2`.
    pub fn write_listing<W: Write>(&self, w: &mut W) -> Result<()> {
        for (fs, vs) in self.delaunay.faces.iter().zip(&self.alpha2) {
            for (s, v) in fs.iter().zip(vs) {
                let ids: Vec<String> = s.vertices().iter().map(|i| i.to_string()).collect();
                writeln!(w, "{} {} {:e}", s.dim(), ids.join(" "), v)?;
            }
        }
        Ok(())
    }

    /// Parses a listing back into (simplex, alpha2) pairs.
    pub fn read_listing<R: BufRead>(r: R) -> Result<Vec<(Simplex, f64)>> {
        let mut out = Vec::new();
        for line in r.lines() {
            let line = line?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("bad listing line {line:?}"));
            let k: usize = toks[0].parse().map_err(|_| bad())?;
            if toks.len() != k + 3 {
                return Err(bad());
            }
            let ids: Vec<u32> = toks[1..=k + 1].iter().map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            let v: f64 = toks[k + 2].parse().map_err(|_| bad())?;
            out.push((Simplex::new(&ids), v));
        }
        Ok(out)
    }
}

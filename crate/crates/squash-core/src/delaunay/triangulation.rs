//! Incremental Bowyer-Watson with a vertex at infinity. Finite cells are kept
//! positively oriented; a ghost cell is oriented as if its infinite vertex were
//! a point far beyond its finite facet.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{in_sphere_perturbed, orient, Point};

pub const INF: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub v: [u32; 4],
    pub n: [u32; 4],
    pub alive: bool,
}

impl Cell {
    pub fn is_ghost(&self, dim: usize) -> bool {
        self.v[..=dim].contains(&INF)
    }
}

pub struct Triangulation<'a> {
    pub dim: usize,
    pub pts: &'a [Point],
    pub cells: Vec<Cell>,
    free: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    last: u32,
    rng: ChaCha8Rng,
}

fn collinear3(a: &Point, b: &Point, c: &Point) -> bool {
    let planes = [(0, 1), (1, 2), (2, 0)];
    planes.iter().all(|&(i, j)| {
        let pa = Point::new(a[i], a[j], 0.0);
        let pb = Point::new(b[i], b[j], 0.0);
        let pc = Point::new(c[i], c[j], 0.0);
        orient(2, &[pa, pb, pc]) == 0
    })
}

impl<'a> Triangulation<'a> {
    pub fn build(dim: usize, pts: &'a [Point]) -> Result<Self> {
        if pts.len() < dim + 1 {
            return Err(Error::TooFewPoints { needed: dim + 1, got: pts.len() });
        }
        let seed = Self::initial_simplex(dim, pts)?;
        let mut t = Triangulation {
            dim,
            pts,
            cells: Vec::new(),
            free: Vec::new(),
            mark: Vec::new(),
            epoch: 0,
            last: 0,
            rng: ChaCha8Rng::seed_from_u64(0x5eed),
        };
        t.start(&seed);
        for i in 0..pts.len() as u32 {
            if !seed.contains(&i) {
                t.insert(i);
            }
        }
        Ok(t)
    }

    fn initial_simplex(dim: usize, pts: &[Point]) -> Result<Vec<u32>> {
        let mut s = vec![0u32, 1];
        let n = pts.len() as u32;
        let third = (2..n).find(|&i| {
            if dim == 2 {
                orient(2, &[pts[0], pts[1], pts[i as usize]]) != 0
            } else {
                !collinear3(&pts[0], &pts[1], &pts[i as usize])
            }
        });
        let third = third.ok_or(Error::AllCoplanar)?;
        s.push(third);
        if dim == 3 {
            let fourth = (2..n)
                .filter(|&i| i != third)
                .find(|&i| orient(3, &[pts[0], pts[1], pts[third as usize], pts[i as usize]]) != 0)
                .ok_or(Error::AllCoplanar)?;
            s.push(fourth);
        }
        Ok(s)
    }

    fn point(&self, id: u32) -> Point {
        self.pts[id as usize]
    }

    fn alloc(&mut self, c: Cell) -> u32 {
        if let Some(i) = self.free.pop() {
            self.cells[i as usize] = c;
            i
        } else {
            self.cells.push(c);
            self.mark.push(0);
            (self.cells.len() - 1) as u32
        }
    }

    fn start(&mut self, seed: &[u32]) {
        let d = self.dim;
        let mut v = [NONE; 4];
        v[..=d].copy_from_slice(seed);
        let p: Vec<Point> = v[..=d].iter().map(|&i| self.point(i)).collect();
        if orient(d, &p) < 0 {
            v.swap(0, 1);
        }
        let c0 = self.alloc(Cell { v, n: [NONE; 4], alive: true });
        let mut created = vec![c0];
        for j in 0..=d {
            let mut g = v;
            g[j] = INF;
            // replacing v_j by a point beyond facet j flips the sign; swap to restore it
            let (a, b) = if j == 0 { (1, 2) } else if j == 1 { (0, 2) } else { (0, 1) };
            g.swap(a, b);
            let gi = self.alloc(Cell { v: g, n: [NONE; 4], alive: true });
            created.push(gi);
        }
        self.link_cells(&created);
        self.last = c0;
    }

    /// Sets mutual neighbor pointers among `cells` wherever they share a facet.
    fn link_cells(&mut self, cells: &[u32]) {
        let d = self.dim;
        let mut open: HashMap<[u32; 3], (u32, usize)> = HashMap::new();
        for &c in cells {
            for i in 0..=d {
                let key = self.facet_key(c, i);
                if let Some((o, j)) = open.remove(&key) {
                    self.cells[c as usize].n[i] = o;
                    self.cells[o as usize].n[j] = c;
                } else {
                    open.insert(key, (c, i));
                }
            }
        }
    }

    fn facet_key(&self, c: u32, i: usize) -> [u32; 3] {
        let d = self.dim;
        let cell = &self.cells[c as usize];
        let mut k = [NONE; 3];
        let mut m = 0;
        for j in 0..=d {
            if j != i {
                k[m] = cell.v[j];
                m += 1;
            }
        }
        k[..d].sort_unstable();
        k
    }

    fn cell_points(&self, c: u32, sub: Option<(usize, u32)>) -> [Point; 4] {
        let cell = &self.cells[c as usize];
        let mut out = [Point::zeros(); 4];
        for j in 0..=self.dim {
            let id = match sub {
                Some((k, q)) if k == j => q,
                _ => cell.v[j],
            };
            out[j] = self.point(id);
        }
        out
    }

    fn conflict(&self, c: u32, q: u32) -> bool {
        let d = self.dim;
        let cell = self.cells[c as usize];
        match cell.v[..=d].iter().position(|&v| v == INF) {
            None => {
                let p = self.cell_points(c, None);
                in_sphere_perturbed(d, &p[..=d], &cell.v[..=d], &self.point(q), q).unwrap_or(-1) > 0
            }
            Some(k) => {
                let p = self.cell_points(c, Some((k, q)));
                match orient(d, &p[..=d]) {
                    1 => true,
                    -1 => false,
                    _ => self.conflict(cell.n[k], q),
                }
            }
        }
    }

    /// Visibility walk to a cell in conflict with q.
    fn locate(&mut self, q: u32) -> u32 {
        let d = self.dim;
        let mut c = self.last;
        if !self.cells[c as usize].alive {
            c = self.cells.iter().position(|x| x.alive && !x.is_ghost(d)).unwrap() as u32;
        }
        if self.cells[c as usize].is_ghost(d) {
            let k = self.cells[c as usize].v.iter().position(|&v| v == INF).unwrap();
            c = self.cells[c as usize].n[k];
        }
        let mut prev = NONE;
        'walk: loop {
            let off = self.rng.gen_range(0..=d);
            for s in 0..=d {
                let i = (s + off) % (d + 1);
                let next = self.cells[c as usize].n[i];
                if next == prev {
                    continue;
                }
                let p = self.cell_points(c, Some((i, q)));
                if orient(d, &p[..=d]) < 0 {
                    prev = c;
                    c = next;
                    if self.cells[c as usize].is_ghost(d) {
                        return c;
                    }
                    continue 'walk;
                }
            }
            return c;
        }
    }

    fn insert(&mut self, q: u32) {
        let d = self.dim;
        let start = self.locate(q);
        debug_assert!(self.conflict(start, q));
        self.epoch += 1;
        let ep = self.epoch;
        let mut stack = vec![start];
        let mut cavity = vec![start];
        self.mark[start as usize] = ep;
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        while let Some(c) = stack.pop() {
            for i in 0..=d {
                let nb = self.cells[c as usize].n[i];
                if self.mark[nb as usize] == ep {
                    continue;
                }
                if self.mark[nb as usize] == ep.wrapping_neg() {
                    boundary.push((c, i));
                    continue;
                }
                if self.conflict(nb, q) {
                    self.mark[nb as usize] = ep;
                    stack.push(nb);
                    cavity.push(nb);
                } else {
                    self.mark[nb as usize] = ep.wrapping_neg();
                    boundary.push((c, i));
                }
            }
        }
        let mut created = Vec::with_capacity(boundary.len());
        for &(c, i) in &boundary {
            let old = self.cells[c as usize];
            let mut v = old.v;
            v[i] = q;
            let mut n = [NONE; 4];
            n[i] = old.n[i];
            let nc = self.alloc(Cell { v, n, alive: true });
            // the outside neighbor now points at the new cell
            let out = old.n[i];
            let slot = self.cells[out as usize].n[..=d].iter().position(|&x| x == c).unwrap();
            self.cells[out as usize].n[slot] = nc;
            created.push(nc);
        }
        for &c in &cavity {
            self.cells[c as usize].alive = false;
            self.free.push(c);
        }
        // internal adjacency: facets through q
        let mut open: HashMap<[u32; 3], (u32, usize)> = HashMap::new();
        for &c in &created {
            for i in 0..=d {
                if self.cells[c as usize].v[i] == q {
                    continue;
                }
                let key = self.facet_key(c, i);
                if let Some((o, j)) = open.remove(&key) {
                    self.cells[c as usize].n[i] = o;
                    self.cells[o as usize].n[j] = c;
                } else {
                    open.insert(key, (c, i));
                }
            }
        }
        debug_assert!(open.is_empty());
        for &c in &created {
            self.mark[c as usize] = 0;
        }
        self.last = *created.iter().find(|&&c| !self.cells[c as usize].is_ghost(d)).unwrap_or(&created[0]);
    }

    pub fn finite_cells(&self) -> impl Iterator<Item = &Cell> {
        let d = self.dim;
        self.cells.iter().filter(move |c| c.alive && !c.is_ghost(d))
    }
}

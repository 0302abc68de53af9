//! Uniform hash grid over points for nearest and range queries.

use std::collections::HashMap;

use crate::geom::Point;

type Key = (i64, i64, i64);

#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    buckets: HashMap<Key, Vec<u32>>,
    points: Vec<Point>,
    lo: Key,
    hi: Key,
}

impl PointIndex {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite());
        PointIndex {
            cell,
            buckets: HashMap::new(),
            points: Vec::new(),
            lo: (i64::MAX, i64::MAX, i64::MAX),
            hi: (i64::MIN, i64::MIN, i64::MIN),
        }
    }

    pub fn build(points: &[Point], cell: f64) -> Self {
        let mut idx = Self::new(cell);
        for p in points {
            idx.insert(*p);
        }
        idx
    }

    fn key(&self, p: &Point) -> Key {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn insert(&mut self, p: Point) -> usize {
        let k = self.key(&p);
        let id = self.points.len();
        self.points.push(p);
        self.buckets.entry(k).or_default().push(id as u32);
        self.lo = (self.lo.0.min(k.0), self.lo.1.min(k.1), self.lo.2.min(k.2));
        self.hi = (self.hi.0.max(k.0), self.hi.1.max(k.1), self.hi.2.max(k.2));
        id
    }

    fn visit_shell(&self, c: Key, r: i64, mut f: impl FnMut(u32)) {
        for i in c.0 - r..=c.0 + r {
            if i < self.lo.0 || i > self.hi.0 {
                continue;
            }
            for j in c.1 - r..=c.1 + r {
                if j < self.lo.1 || j > self.hi.1 {
                    continue;
                }
                for k in c.2 - r..=c.2 + r {
                    if k < self.lo.2 || k > self.hi.2 {
                        continue;
                    }
                    let on_shell = (i - c.0).abs() == r || (j - c.1).abs() == r || (k - c.2).abs() == r;
                    if !on_shell {
                        continue;
                    }
                    if let Some(b) = self.buckets.get(&(i, j, k)) {
                        for &id in b {
                            f(id);
                        }
                    }
                }
            }
        }
    }

    /// Index and distance of the nearest point.
    pub fn nearest(&self, q: &Point) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let c = self.key(q);
        let span = [
            (c.0 - self.lo.0).abs().max((self.hi.0 - c.0).abs()),
            (c.1 - self.lo.1).abs().max((self.hi.1 - c.1).abs()),
            (c.2 - self.lo.2).abs().max((self.hi.2 - c.2).abs()),
        ]
        .into_iter()
        .max()
        .unwrap();
        let mut best = (usize::MAX, f64::INFINITY);
        for r in 0..=span {
            self.visit_shell(c, r, |id| {
                let d = (self.points[id as usize] - q).norm_squared();
                if d < best.1 || (d == best.1 && (id as usize) < best.0) {
                    best = (id as usize, d);
                }
            });
            if best.0 != usize::MAX && best.1.sqrt() <= r as f64 * self.cell {
                break;
            }
        }
        Some((best.0, best.1.sqrt()))
    }

    /// Indices of points with |p - q| <= r, sorted.
    pub fn within(&self, q: &Point, r: f64) -> Vec<usize> {
        let lo = self.key(&(q - Point::repeat(r)));
        let hi = self.key(&(q + Point::repeat(r)));
        let r2 = r * r;
        let mut out = Vec::new();
        for i in lo.0.max(self.lo.0)..=hi.0.min(self.hi.0) {
            for j in lo.1.max(self.lo.1)..=hi.1.min(self.hi.1) {
                for k in lo.2.max(self.lo.2)..=hi.2.min(self.hi.2) {
                    if let Some(b) = self.buckets.get(&(i, j, k)) {
                        for &id in b {
                            if (self.points[id as usize] - q).norm_squared() <= r2 {
                                out.push(id as usize);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn any_within(&self, q: &Point, r: f64) -> bool {
        let lo = self.key(&(q - Point::repeat(r)));
        let hi = self.key(&(q + Point::repeat(r)));
        let r2 = r * r;
        for i in lo.0.max(self.lo.0)..=hi.0.min(self.hi.0) {
            for j in lo.1.max(self.lo.1)..=hi.1.min(self.hi.1) {
                for k in lo.2.max(self.lo.2)..=hi.2.min(self.hi.2) {
                    if let Some(b) = self.buckets.get(&(i, j, k)) {
                        if b.iter().any(|&id| (self.points[id as usize] - q).norm_squared() < r2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Uniform hash grid over axis-aligned boxes, for candidate lookups.
#[derive(Debug, Clone)]
pub struct BoxIndex {
    cell: f64,
    buckets: HashMap<Key, Vec<u32>>,
}

impl BoxIndex {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite());
        BoxIndex { cell, buckets: HashMap::new() }
    }

    fn range(&self, lo: &Point, hi: &Point) -> (Key, Key) {
        let k = |p: &Point| {
            ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64, (p.z / self.cell).floor() as i64)
        };
        (k(lo), k(hi))
    }

    pub fn insert(&mut self, id: u32, lo: &Point, hi: &Point) {
        let (a, b) = self.range(lo, hi);
        for i in a.0..=b.0 {
            for j in a.1..=b.1 {
                for k in a.2..=b.2 {
                    self.buckets.entry((i, j, k)).or_default().push(id);
                }
            }
        }
    }

    /// Ids of boxes that may overlap [lo, hi], sorted and deduplicated.
    pub fn query(&self, lo: &Point, hi: &Point) -> Vec<u32> {
        let (a, b) = self.range(lo, hi);
        let mut out = Vec::new();
        for i in a.0..=b.0 {
            for j in a.1..=b.1 {
                for k in a.2..=b.2 {
                    if let Some(v) = self.buckets.get(&(i, j, k)) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

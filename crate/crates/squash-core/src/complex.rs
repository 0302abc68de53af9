//! Mutable simplicial complexes: star, link, boundary, free faces, collapses and
//! surface-topology certificates.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orthonormalize, outward_normal, Point};
use crate::manifold::ExpectedTopology;

const UNUSED: u32 = u32::MAX;

/// A simplex as a sorted set of at most four vertex ids. Orders by dimension
/// first, then lexicographically by vertex ids.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    len: u8,
    v: [u32; 4],
}

impl Simplex {
    pub fn new(vertices: &[u32]) -> Simplex {
        assert!(!vertices.is_empty() && vertices.len() <= 4, "simplex needs 1..=4 vertices");
        let mut v = [UNUSED; 4];
        v[..vertices.len()].copy_from_slice(vertices);
        v[..vertices.len()].sort_unstable();
        for i in 1..vertices.len() {
            assert!(v[i - 1] != v[i], "repeated vertex in simplex");
        }
        Simplex { len: vertices.len() as u8, v }
    }

    pub fn vertex(id: u32) -> Simplex {
        Simplex::new(&[id])
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[u32] {
        &self.v[..self.len as usize]
    }

    pub fn contains(&self, id: u32) -> bool {
        self.vertices().contains(&id)
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.vertices().iter().all(|v| other.contains(*v))
    }

    /// The facet opposite `id`. None for vertices or if `id` is absent.
    pub fn without(&self, id: u32) -> Option<Simplex> {
        if self.len == 1 || !self.contains(id) {
            return None;
        }
        let vs: Vec<u32> = self.vertices().iter().copied().filter(|&v| v != id).collect();
        Some(Simplex::new(&vs))
    }

    pub fn with(&self, id: u32) -> Simplex {
        let mut vs = self.vertices().to_vec();
        vs.push(id);
        Simplex::new(&vs)
    }

    /// Pairs (opposite vertex, facet).
    pub fn facets(&self) -> Vec<(u32, Simplex)> {
        if self.len == 1 {
            return vec![];
        }
        self.vertices().iter().map(|&v| (v, self.without(v).unwrap())).collect()
    }

    /// All nonempty faces including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.len as usize;
        let vs = self.vertices();
        let mut out = Vec::with_capacity((1 << n) - 1);
        for mask in 1u32..(1 << n) {
            let sub: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| vs[i]).collect();
            out.push(Simplex::new(&sub));
        }
        out
    }

    pub fn intersection(&self, other: &Simplex) -> Option<Simplex> {
        let vs: Vec<u32> = self.vertices().iter().copied().filter(|v| other.contains(*v)).collect();
        if vs.is_empty() {
            None
        } else {
            Some(Simplex::new(&vs))
        }
    }

    pub fn minus(&self, other: &Simplex) -> Option<Simplex> {
        let vs: Vec<u32> = self.vertices().iter().copied().filter(|v| !other.contains(*v)).collect();
        if vs.is_empty() {
            None
        } else {
            Some(Simplex::new(&vs))
        }
    }

    pub fn points(&self, table: &[Point]) -> Vec<Point> {
        self.vertices().iter().map(|&v| table[v as usize]).collect()
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.vertices())
    }
}

impl Serialize for Simplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vertices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Simplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<u32> = Vec::deserialize(d)?;
        if v.is_empty() || v.len() > 4 {
            return Err(serde::de::Error::custom("simplex needs 1..=4 vertices"));
        }
        let mut s = v.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != v.len() {
            return Err(serde::de::Error::custom("repeated vertex in simplex"));
        }
        Ok(Simplex::new(&s))
    }
}

impl JsonSchema for Simplex {
    fn schema_name() -> String {
        "Simplex".into()
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        let mut s = <Vec<u32>>::json_schema(gen).into_object();
        if let Some(a) = s.array.as_mut() {
            a.min_items = Some(1);
            a.max_items = Some(4);
            a.unique_items = Some(true);
        }
        s.into()
    }
}

/// Simplicial complex over a shared coordinate table, embedded in R^dim.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    dim: usize,
    points: Arc<Vec<Point>>,
    cofaces: HashMap<Simplex, Vec<Simplex>>,
    counts: [usize; 4],
    log: Vec<Simplex>,
}

impl SimplicialComplex {
    pub fn empty(dim: usize, points: Arc<Vec<Point>>) -> Self {
        SimplicialComplex { dim, points, cofaces: HashMap::new(), counts: [0; 4], log: Vec::new() }
    }

    /// Closure of `simplices`, after checking the canonical embedding.
    pub fn new(dim: usize, points: Arc<Vec<Point>>, simplices: impl IntoIterator<Item = Simplex>) -> Result<Self> {
        let k = Self::from_closure(dim, points, simplices);
        k.certify_embedding()?;
        Ok(k)
    }

    /// Closure of `simplices` without the embedding check; for inputs that are
    /// subcomplexes of a Delaunay complex.
    pub fn from_closure(dim: usize, points: Arc<Vec<Point>>, simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut set: HashSet<Simplex> = HashSet::new();
        for s in simplices {
            assert!(s.dim() <= dim, "simplex {s:?} exceeds ambient dimension");
            if set.contains(&s) {
                continue;
            }
            for f in s.faces() {
                set.insert(f);
            }
        }
        let mut k = Self::empty(dim, points);
        for s in &set {
            k.cofaces.insert(*s, Vec::new());
            k.counts[s.dim()] += 1;
        }
        for s in &set {
            for (_, f) in s.facets() {
                k.cofaces.get_mut(&f).unwrap().push(*s);
            }
        }
        for v in k.cofaces.values_mut() {
            v.sort_unstable();
        }
        k
    }

    /// Checks that every simplex spans a flat of its own dimension and that
    /// d-simplices sharing a facet lie on opposite sides of it.
    pub fn certify_embedding(&self) -> Result<()> {
        for s in self.cofaces.keys() {
            if s.dim() == 0 {
                continue;
            }
            let p = s.points(&self.points);
            let dirs: Vec<_> = p[1..].iter().map(|q| q - p[0]).collect();
            if orthonormalize(&dirs).is_none() {
                return Err(Error::NotEmbedded(format!("{s:?} is degenerate")));
            }
        }
        for (f, cof) in &self.cofaces {
            if f.dim() + 1 != self.dim {
                continue;
            }
            let tops: Vec<&Simplex> = cof.iter().filter(|c| c.dim() == self.dim).collect();
            if tops.len() > 2 {
                return Err(Error::NotEmbedded(format!("{f:?} has {} d-cofaces", tops.len())));
            }
            if tops.len() == 2 {
                let fp = f.points(&self.points);
                let a = tops[0].minus(f).unwrap().vertices()[0];
                let b = tops[1].minus(f).unwrap().vertices()[0];
                let n = outward_normal(self.dim, &fp, &self.points[a as usize]).unwrap();
                if n.dot(&(self.points[b as usize] - fp[0])) <= 0.0 {
                    return Err(Error::NotEmbedded(format!("d-cofaces of {f:?} overlap")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &Arc<Vec<Point>> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.cofaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cofaces.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.cofaces.contains_key(s)
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// k-simplices in sorted order.
    pub fn simplices(&self, k: usize) -> Vec<Simplex> {
        let mut v: Vec<Simplex> = self.cofaces.keys().filter(|s| s.dim() == k).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn all_simplices(&self) -> BTreeSet<Simplex> {
        self.cofaces.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.cofaces.keys()
    }

    /// Cofaces of one dimension higher.
    pub fn immediate_cofaces(&self, s: &Simplex) -> Result<&[Simplex]> {
        self.cofaces.get(s).map(|v| v.as_slice()).ok_or(Error::SimplexNotFound(*s))
    }

    /// d-dimensional cofaces of s.
    pub fn top_cofaces(&self, s: &Simplex) -> Result<Vec<Simplex>> {
        Ok(self.star(s)?.into_iter().filter(|c| c.dim() == self.dim).collect())
    }

    /// All cofaces of tau including tau, sorted.
    pub fn star(&self, tau: &Simplex) -> Result<Vec<Simplex>> {
        if !self.contains(tau) {
            return Err(Error::SimplexNotFound(*tau));
        }
        let mut seen: BTreeSet<Simplex> = BTreeSet::new();
        let mut stack = vec![*tau];
        while let Some(s) = stack.pop() {
            if seen.insert(s) {
                stack.extend(self.cofaces[&s].iter().copied());
            }
        }
        Ok(seen.into_iter().collect())
    }

    pub fn link(&self, tau: &Simplex) -> Result<Vec<Simplex>> {
        let mut out: BTreeSet<Simplex> = BTreeSet::new();
        for s in self.star(tau)? {
            if let Some(r) = s.minus(tau) {
                out.insert(r);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Inclusion-maximal simplices of the star.
    pub fn maximal_cofaces(&self, tau: &Simplex) -> Result<Vec<Simplex>> {
        Ok(self.star(tau)?.into_iter().filter(|s| self.cofaces[s].is_empty()).collect())
    }

    /// The unique maximal proper coface if tau is free.
    pub fn is_free(&self, tau: &Simplex) -> Result<Option<Simplex>> {
        let maxes = self.maximal_cofaces(tau)?;
        Ok(match maxes.as_slice() {
            [only] if only != tau => Some(*only),
            _ => None,
        })
    }

    /// True iff every coface of tau is a face of sigma. With sigma in K this
    /// means tau is free with sigma as its maximal coface (or tau = sigma).
    pub fn star_within(&self, tau: &Simplex, sigma: &Simplex) -> bool {
        let mut stack = vec![*tau];
        let mut seen: HashSet<Simplex> = HashSet::new();
        while let Some(s) = stack.pop() {
            if !seen.insert(s) {
                continue;
            }
            match self.cofaces.get(&s) {
                None => return false,
                Some(c) => {
                    for x in c {
                        if !x.is_face_of(sigma) {
                            return false;
                        }
                        stack.push(*x);
                    }
                }
            }
        }
        true
    }

    /// Removes the star of a free simplex. Returns the removed simplices.
    pub fn collapse(&mut self, tau: &Simplex) -> Result<Vec<Simplex>> {
        if self.is_free(tau)?.is_none() {
            return Err(Error::NotFree(*tau));
        }
        Ok(self.remove_star(tau))
    }

    /// Removes tau and all its cofaces without checking freeness.
    pub fn remove_star(&mut self, tau: &Simplex) -> Vec<Simplex> {
        let star = match self.star(tau) {
            Ok(s) => s,
            Err(_) => return vec![],
        };
        let set: HashSet<Simplex> = star.iter().copied().collect();
        for s in star.iter().rev() {
            for (_, f) in s.facets() {
                if !set.contains(&f) {
                    if let Some(c) = self.cofaces.get_mut(&f) {
                        c.retain(|x| x != s);
                    }
                }
            }
        }
        for s in &star {
            self.cofaces.remove(s);
            self.counts[s.dim()] -= 1;
        }
        self.log.push(*tau);
        star
    }

    pub fn deletion_log(&self) -> &[Simplex] {
        &self.log
    }

    /// Replays a deletion log on a copy of `self`.
    pub fn replay(&self, log: &[Simplex]) -> SimplicialComplex {
        let mut k = self.clone();
        for t in log {
            k.remove_star(t);
        }
        k
    }

    pub fn same_simplices(&self, other: &SimplicialComplex) -> bool {
        self.len() == other.len() && self.cofaces.keys().all(|s| other.contains(s))
    }

    pub fn subcomplex(&self, simplices: impl IntoIterator<Item = Simplex>) -> SimplicialComplex {
        SimplicialComplex::from_closure(self.dim, self.points.clone(), simplices)
    }

    /// Boundary subcomplex: closure of the (d-1)-simplices without exactly two
    /// d-cofaces and of the simplices that are not faces of any d-simplex.
    pub fn boundary(&self) -> SimplicialComplex {
        let d = self.dim;
        let mut gens = Vec::new();
        let in_top = self.faces_of_top();
        for s in self.cofaces.keys() {
            if s.dim() == d {
                continue;
            }
            if !in_top.contains(s) {
                gens.push(*s);
            } else if s.dim() + 1 == d && self.cofaces[s].len() != 2 {
                gens.push(*s);
            }
        }
        self.subcomplex(gens)
    }

    fn faces_of_top(&self) -> HashSet<Simplex> {
        let mut out = HashSet::new();
        for s in self.cofaces.keys() {
            if s.dim() == self.dim {
                out.extend(s.faces());
            }
        }
        out
    }

    pub fn is_pure(&self, k: usize) -> bool {
        self.counts.iter().enumerate().all(|(j, &c)| j <= k || c == 0)
            && self.cofaces.iter().all(|(s, c)| s.dim() == k || !c.is_empty())
    }

    fn components(&self) -> usize {
        let verts = self.simplices(0);
        if verts.is_empty() {
            return 0;
        }
        let pos: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, v)| (v.vertices()[0], i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in self.cofaces.keys().filter(|s| s.dim() == 1) {
            let a = find(&mut parent, pos[&e.vertices()[0]]);
            let b = find(&mut parent, pos[&e.vertices()[1]]);
            parent[a] = b;
        }
        (0..verts.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    fn orientable_surface(&self) -> bool {
        let tris = self.simplices(2);
        let idx: HashMap<Simplex, usize> = tris.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        // orientation: false = sorted order, true = reversed
        let mut orient: Vec<Option<bool>> = vec![None; tris.len()];
        let directed = |t: &Simplex, flip: bool, a: u32, b: u32| -> bool {
            // whether edge (a,b) appears as a->b in the oriented cycle of t
            let v = t.vertices();
            let cyc = if flip { [v[0], v[2], v[1]] } else { [v[0], v[1], v[2]] };
            (0..3).any(|i| cyc[i] == a && cyc[(i + 1) % 3] == b)
        };
        for start in 0..tris.len() {
            if orient[start].is_some() {
                continue;
            }
            orient[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let t = tris[i];
                let fi = orient[i].unwrap();
                for (_, e) in t.facets() {
                    let (a, b) = (e.vertices()[0], e.vertices()[1]);
                    let t_ab = directed(&t, fi, a, b);
                    for n in &self.cofaces[&e] {
                        let j = idx[n];
                        if j == i {
                            continue;
                        }
                        // neighbor must traverse the shared edge the other way
                        let want = if directed(n, false, a, b) == t_ab { Some(true) } else { Some(false) };
                        match orient[j] {
                            None => {
                                orient[j] = want;
                                queue.push_back(j);
                            }
                            Some(o) if Some(o) != want => return false,
                            _ => {}
                        }
                    }
                }
            }
        }
        true
    }

    /// Closed-manifold, Euler characteristic, components and orientability of a
    /// (d-1)-dimensional complex, compared against the expected topology.
    pub fn certify_topology(&self, expected: Option<ExpectedTopology>) -> TopologyCertificate {
        let d = self.dim;
        let k = d - 1;
        let mut failures = Vec::new();
        let pure = self.count(k) > 0 && self.is_pure(k);
        if !pure {
            failures.push(format!("not pure ({k})"));
        }
        let chi = self.euler_characteristic();
        let comps = self.components();
        let mut closed = pure;
        let mut links_ok = pure;
        let mut orientable = pure;
        if pure && k == 2 {
            for e in self.simplices(1) {
                if self.cofaces[&e].len() != 2 {
                    closed = false;
                    failures.push(format!("edge {e:?} has {} triangles", self.cofaces[&e].len()));
                    break;
                }
            }
            for v in self.simplices(0) {
                if !vertex_link_is_cycle(self, &v) {
                    links_ok = false;
                    failures.push(format!("link of vertex {v:?} is not a single cycle"));
                    break;
                }
            }
            orientable = closed && self.orientable_surface();
        } else if pure && k == 1 {
            for v in self.simplices(0) {
                if self.cofaces[&v].len() != 2 {
                    closed = false;
                    links_ok = false;
                    failures.push(format!("vertex {v:?} has degree {}", self.cofaces[&v].len()));
                    break;
                }
            }
        }
        let is_closed_surface = pure && closed && links_ok;
        let genus = if is_closed_surface && orientable && k == 2 && comps == 1 { Some((2 - chi) / 2) } else { None };
        let matches_expected = match expected {
            None => is_closed_surface,
            Some(ExpectedTopology::Circle) => k == 1 && is_closed_surface && comps == 1,
            Some(e) => k == 2 && is_closed_surface && orientable && comps == 1 && chi == e.euler_characteristic(),
        };
        if !matches_expected {
            failures.push(format!("expected {expected:?}, got chi={chi}, components={comps}"));
        }
        TopologyCertificate {
            is_closed_surface,
            euler_characteristic: chi,
            num_components: comps,
            orientable,
            vertex_links_ok: links_ok,
            pure,
            genus,
            matches_expected,
            failures,
        }
    }
}

fn vertex_link_is_cycle(k: &SimplicialComplex, v: &Simplex) -> bool {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    let id = v.vertices()[0];
    for e in &k.cofaces[v] {
        for t in &k.cofaces[e] {
            let rest = t.without(id).unwrap();
            let (a, b) = (rest.vertices()[0], rest.vertices()[1]);
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    if adj.is_empty() {
        return false;
    }
    for nb in adj.values_mut() {
        nb.sort_unstable();
        nb.dedup();
        if nb.len() != 2 {
            return false;
        }
    }
    let start = *adj.keys().min().unwrap();
    let mut prev = start;
    let mut cur = adj[&start][0];
    let mut steps = 1;
    while cur != start {
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
        steps += 1;
        if steps > adj.len() {
            return false;
        }
    }
    steps == adj.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TopologyCertificate {
    pub is_closed_surface: bool,
    pub euler_characteristic: i64,
    pub num_components: usize,
    pub orientable: bool,
    pub vertex_links_ok: bool,
    pub pure: bool,
    pub genus: Option<i64>,
    pub matches_expected: bool,
    pub failures: Vec<String>,
}

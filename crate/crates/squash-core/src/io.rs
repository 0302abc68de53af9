//! Point cloud and mesh files: XYZ, ascii PLY, OFF and a plain edge list.
//!
//! Meshes are written as their maximal simplices, so isolated vertices and
//! dangling edges appear as one- and two-vertex faces and a complex of
//! dimension at most two reads back unchanged. Coordinates use the shortest
//! decimal form that parses back to the same `f64`.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::sampling::PointCloud;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn coords(p: &Point, dim: usize) -> String {
    if dim == 2 {
        format!("{} {}", p.x, p.y)
    } else {
        format!("{} {} {}", p.x, p.y, p.z)
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|e| parse_err(line, format!("{tok:?}: {e}")))
}

fn parse_index(tok: &str, line: usize, n: usize) -> Result<u32> {
    let i: usize = tok.parse().map_err(|e| parse_err(line, format!("{tok:?}: {e}")))?;
    if i >= n {
        return Err(parse_err(line, format!("vertex index {i} out of range for {n} vertices")));
    }
    Ok(i as u32)
}

/// Data lines with comments (`#`) and blank lines dropped, numbered from 1.
fn data_lines<R: BufRead>(r: R) -> Result<Vec<(usize, String)>> {
    let mut out = vec![];
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.split('#').next().unwrap_or("").trim();
        if !t.is_empty() {
            out.push((i + 1, t.to_string()));
        }
    }
    Ok(out)
}

pub fn write_xyz<W: Write>(w: &mut W, cloud: &PointCloud) -> Result<()> {
    for p in cloud.points.iter() {
        writeln!(w, "{}", coords(p, cloud.dim))?;
    }
    Ok(())
}

/// Two columns read as a planar cloud, three as a spatial one.
pub fn read_xyz<R: BufRead>(r: R) -> Result<PointCloud> {
    let lines = data_lines(r)?;
    let mut dim = 0;
    let mut pts = Vec::with_capacity(lines.len());
    for (no, l) in &lines {
        let vals: Vec<f64> = l.split_whitespace().map(|t| parse_f64(t, *no)).collect::<Result<_>>()?;
        if dim == 0 {
            dim = vals.len();
            if dim != 2 && dim != 3 {
                return Err(parse_err(*no, format!("expected 2 or 3 columns, got {dim}")));
            }
        } else if vals.len() != dim {
            return Err(parse_err(*no, format!("expected {dim} columns, got {}", vals.len())));
        }
        pts.push(Point::new(vals[0], vals[1], if dim == 3 { vals[2] } else { 0.0 }));
    }
    if pts.is_empty() {
        return Err(Error::Parse("no points".into()));
    }
    PointCloud::external(dim, pts)
}

/// Simplices of K with no coface, sorted.
pub fn maximal_simplices(k: &SimplicialComplex) -> Vec<Simplex> {
    let mut out: Vec<Simplex> = k.iter().copied().filter(|s| k.immediate_cofaces(s).map(|c| c.is_empty()).unwrap_or(false)).collect();
    out.sort_unstable();
    out
}

fn maximal_faces(k: &SimplicialComplex) -> Result<Vec<Simplex>> {
    if let Some(s) = k.iter().find(|s| s.dim() > 2) {
        return Err(Error::Io(format!("mesh formats hold at most 2-simplices, found {s:?}")));
    }
    Ok(maximal_simplices(k))
}

fn faces_to_complex(dim: usize, points: Vec<Point>, faces: Vec<Simplex>) -> SimplicialComplex {
    SimplicialComplex::from_closure(dim, Arc::new(points), faces)
}

pub fn write_off<W: Write>(w: &mut W, k: &SimplicialComplex) -> Result<()> {
    let faces = maximal_faces(k)?;
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", k.points().len(), faces.len())?;
    for p in k.points().iter() {
        writeln!(w, "{}", coords(p, 3))?;
    }
    for f in &faces {
        write_face(w, f)?;
    }
    Ok(())
}

fn write_face<W: Write>(w: &mut W, f: &Simplex) -> Result<()> {
    let ids: Vec<String> = f.vertices().iter().map(|v| v.to_string()).collect();
    writeln!(w, "{} {}", ids.len(), ids.join(" "))?;
    Ok(())
}

fn parse_face(l: &str, no: usize, n: usize) -> Result<Simplex> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    let c: usize = toks.first().ok_or_else(|| parse_err(no, "empty face"))?.parse().map_err(|e| parse_err(no, e))?;
    if !(1..=3).contains(&c) || toks.len() < c + 1 {
        return Err(parse_err(no, format!("face must list 1 to 3 vertices, got {c}")));
    }
    let ids: Vec<u32> = toks[1..=c].iter().map(|t| parse_index(t, no, n)).collect::<Result<_>>()?;
    if (1..ids.len()).any(|i| ids[..i].contains(&ids[i])) {
        return Err(parse_err(no, "repeated vertex in face"));
    }
    Ok(Simplex::new(&ids))
}

/// Reads an OFF mesh; `dim` is 2 when all z coordinates are zero.
pub fn read_off<R: BufRead>(r: R) -> Result<SimplicialComplex> {
    let lines = data_lines(r)?;
    let mut it = lines.iter();
    let (no, head) = it.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let mut rest = head.strip_prefix("OFF").ok_or_else(|| parse_err(*no, "missing OFF header"))?.trim().to_string();
    let mut count_no = *no;
    if rest.is_empty() {
        let (n2, l) = it.next().ok_or_else(|| Error::Parse("missing OFF counts".into()))?;
        rest = l.clone();
        count_no = *n2;
    }
    let counts: Vec<usize> = rest.split_whitespace().map(|t| t.parse().map_err(|e| parse_err(count_no, e))).collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(count_no, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut pts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, l) = it.next().ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let v: Vec<f64> = l.split_whitespace().take(3).map(|t| parse_f64(t, *no)).collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(parse_err(*no, "expected 3 coordinates"));
        }
        pts.push(Point::new(v[0], v[1], v[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (no, l) = it.next().ok_or_else(|| Error::Parse("truncated face list".into()))?;
        faces.push(parse_face(l, *no, nv)?);
    }
    let dim = if pts.iter().all(|p| p.z == 0.0) { 2 } else { 3 };
    Ok(faces_to_complex(dim, pts, faces))
}

fn write_ply<W: Write>(w: &mut W, dim: usize, pts: &[Point], faces: &[Simplex]) -> Result<()> {
    writeln!(w, "ply\nformat ascii 1.0\nelement vertex {}", pts.len())?;
    let axes = if dim == 2 { &["x", "y"][..] } else { &["x", "y", "z"][..] };
    for a in axes {
        writeln!(w, "property double {a}")?;
    }
    if !faces.is_empty() {
        writeln!(w, "element face {}\nproperty list uchar int vertex_indices", faces.len())?;
    }
    writeln!(w, "end_header")?;
    for p in pts {
        writeln!(w, "{}", coords(p, dim))?;
    }
    for f in faces {
        write_face(w, f)?;
    }
    Ok(())
}

pub fn write_ply_cloud<W: Write>(w: &mut W, cloud: &PointCloud) -> Result<()> {
    write_ply(w, cloud.dim, &cloud.points, &[])
}

pub fn write_ply_mesh<W: Write>(w: &mut W, k: &SimplicialComplex) -> Result<()> {
    let faces = maximal_faces(k)?;
    write_ply(w, k.dim(), k.points(), &faces)
}

/// Points and faces of an ascii PLY file, and whether it has a z property.
pub fn read_ply<R: BufRead>(r: R) -> Result<(usize, Vec<Point>, Vec<Simplex>)> {
    let lines = data_lines(r)?;
    let mut it = lines.iter();
    match it.next() {
        Some((_, l)) if l == "ply" => {}
        _ => return Err(Error::Parse("missing ply magic".into())),
    }
    let mut nv = 0;
    let mut nf = 0;
    let mut props: Vec<String> = vec![];
    let mut current = String::new();
    for (no, l) in it.by_ref() {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["format", "ascii", _] => {}
            ["format", ..] => return Err(parse_err(*no, "only ascii PLY is supported")),
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", name, n] => {
                let n: usize = n.parse().map_err(|e| parse_err(*no, e))?;
                match *name {
                    "vertex" => nv = n,
                    "face" => nf = n,
                    _ if n == 0 => {}
                    _ => return Err(parse_err(*no, format!("unsupported element {name}"))),
                }
                current = name.to_string();
            }
            ["property", "list", ..] => {}
            ["property", _, name] if current == "vertex" => props.push(name.to_string()),
            ["property", ..] => {}
            ["end_header"] => break,
            _ => return Err(parse_err(*no, format!("unexpected header line {l:?}"))),
        }
    }
    let axis = |a: &str| props.iter().position(|p| p == a);
    let (Some(ix), Some(iy)) = (axis("x"), axis("y")) else {
        return Err(Error::Parse("vertex element needs x and y".into()));
    };
    let iz = axis("z");
    let mut pts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, l) = it.next().ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let v: Vec<f64> = l.split_whitespace().map(|t| parse_f64(t, *no)).collect::<Result<_>>()?;
        if v.len() != props.len() {
            return Err(parse_err(*no, format!("expected {} values, got {}", props.len(), v.len())));
        }
        pts.push(Point::new(v[ix], v[iy], iz.map_or(0.0, |i| v[i])));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (no, l) = it.next().ok_or_else(|| Error::Parse("truncated face list".into()))?;
        faces.push(parse_face(l, *no, nv)?);
    }
    Ok((if iz.is_some() { 3 } else { 2 }, pts, faces))
}

pub fn read_ply_cloud<R: BufRead>(r: R) -> Result<PointCloud> {
    let (dim, pts, _) = read_ply(r)?;
    PointCloud::external(dim, pts)
}

pub fn read_ply_mesh<R: BufRead>(r: R) -> Result<SimplicialComplex> {
    let (dim, pts, faces) = read_ply(r)?;
    Ok(faces_to_complex(dim, pts, faces))
}

/// `v x y [z]` lines for every point, then `e i j` for each edge and `p i`
/// for each vertex with no edge.
pub fn write_edge_list<W: Write>(w: &mut W, k: &SimplicialComplex) -> Result<()> {
    if k.count(2) > 0 || k.count(3) > 0 {
        return Err(Error::Io("edge list holds at most 1-simplices".into()));
    }
    for p in k.points().iter() {
        writeln!(w, "v {}", coords(p, k.dim()))?;
    }
    for s in maximal_faces(k)? {
        match s.vertices() {
            [a] => writeln!(w, "p {a}")?,
            [a, b] => writeln!(w, "e {a} {b}")?,
            _ => unreachable!(),
        }
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<SimplicialComplex> {
    let lines = data_lines(r)?;
    let mut pts = vec![];
    let mut dim = 0;
    let mut raw: Vec<(usize, Vec<String>)> = vec![];
    for (no, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.split_first() {
            Some((&"v", rest)) => {
                let v: Vec<f64> = rest.iter().map(|t| parse_f64(t, no)).collect::<Result<_>>()?;
                if dim == 0 {
                    dim = v.len();
                }
                if v.len() != dim || !(2..=3).contains(&dim) {
                    return Err(parse_err(no, "inconsistent coordinate count"));
                }
                pts.push(Point::new(v[0], v[1], if dim == 3 { v[2] } else { 0.0 }));
            }
            Some((&"e", _)) | Some((&"p", _)) => raw.push((no, toks.iter().map(|s| s.to_string()).collect())),
            _ => return Err(parse_err(no, format!("unexpected line {l:?}"))),
        }
    }
    let n = pts.len();
    let mut faces = vec![];
    for (no, toks) in raw {
        let want = if toks[0] == "e" { 3 } else { 2 };
        if toks.len() != want {
            return Err(parse_err(no, "wrong number of indices"));
        }
        let ids: Vec<u32> = toks[1..].iter().map(|t| parse_index(t, no, n)).collect::<Result<_>>()?;
        if ids.len() == 2 && ids[0] == ids[1] {
            return Err(parse_err(no, "edge joins a vertex to itself"));
        }
        faces.push(Simplex::new(&ids));
    }
    Ok(faces_to_complex(dim.max(2), pts, faces))
}

//! Plain-text mesh format.
//!
//! ```text
//! polymesh 1
//! nv ne nf nc
//! x y z                  (nv lines)
//! v0 v1                  (ne lines, 1-based)
//! k ±e1 ... ±ek          (nf lines, signed 1-based edges in loop order)
//! k ±f1 ... ±fk          (nc lines, signed 1-based faces, + = outward)
//! ```

use super::{Cell, Face, PolyMesh, Signed};
use crate::scalar::Scalar;
use crate::{Error, Result};
use nalgebra::Vector3;
use std::io::{BufRead, Write};

struct Lines<R> {
    inner: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    /// Next non-empty line, split into tokens.
    fn next(&mut self, what: &str) -> Result<Vec<String>> {
        loop {
            self.buf.clear();
            self.line += 1;
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Err(self.err(format!("unexpected end of file, expected {what}")));
            }
            let toks: Vec<String> = self.buf.split_whitespace().map(str::to_owned).collect();
            if !toks.is_empty() {
                return Ok(toks);
            }
        }
    }

    fn err(&self, message: String) -> Error {
        Error::Parse { line: self.line, message }
    }

    fn parse<T: std::str::FromStr>(&self, tok: &str, what: &str) -> Result<T> {
        tok.parse().map_err(|_| self.err(format!("invalid {what} `{tok}`")))
    }

    fn counted(&mut self, what: &str) -> Result<Vec<i64>> {
        let toks = self.next(what)?;
        let k: usize = self.parse(&toks[0], "entry count")?;
        if toks.len() != k + 1 {
            return Err(self.err(format!("{what}: expected {k} entries, found {}", toks.len() - 1)));
        }
        toks[1..].iter().map(|t| self.parse(t, "signed index")).collect()
    }

    fn signed(&self, raw: i64, bound: usize, what: &str) -> Result<Signed> {
        let idx = raw.unsigned_abs() as usize;
        if raw == 0 || idx > bound {
            return Err(self.err(format!("{what} index {raw} out of range 1..={bound}")));
        }
        Ok(Signed::new(idx - 1, if raw > 0 { 1 } else { -1 }))
    }
}

pub fn read_poly_mesh<S: Scalar, R: BufRead>(reader: R) -> Result<PolyMesh<S>> {
    let mut r = Lines { inner: reader, line: 0, buf: String::new() };
    let head = r.next("header")?;
    if head.len() != 2 || head[0] != "polymesh" || head[1] != "1" {
        return Err(r.err("expected header `polymesh 1`".into()));
    }
    let counts = r.next("entity counts")?;
    if counts.len() != 4 {
        return Err(r.err("expected four counts `nv ne nf nc`".into()));
    }
    let c: Vec<usize> = counts.iter().map(|t| r.parse(t, "count")).collect::<Result<_>>()?;
    let (nv, ne, nf, nc) = (c[0], c[1], c[2], c[3]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let t = r.next("vertex")?;
        if t.len() != 3 {
            return Err(r.err("vertex line needs three coordinates".into()));
        }
        let p: Vec<f64> = t.iter().map(|s| r.parse(s, "coordinate")).collect::<Result<_>>()?;
        vertices.push(Vector3::new(S::lit(p[0]), S::lit(p[1]), S::lit(p[2])));
    }

    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let t = r.next("edge")?;
        if t.len() != 2 {
            return Err(r.err("edge line needs two vertex indices".into()));
        }
        let mut e = [0usize; 2];
        for (k, s) in t.iter().enumerate() {
            let v: usize = r.parse(s, "vertex index")?;
            if v == 0 || v > nv {
                return Err(r.err(format!("vertex index {v} out of range 1..={nv}")));
            }
            e[k] = v - 1;
        }
        if e[0] == e[1] {
            return Err(r.err("degenerate edge".into()));
        }
        edges.push(e);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let raw = r.counted("face")?;
        if raw.len() < 3 {
            return Err(r.err("a face needs at least three edges".into()));
        }
        let signed: Vec<Signed> = raw.iter().map(|&x| r.signed(x, ne, "edge")).collect::<Result<_>>()?;
        let ends = |s: &Signed| {
            let e = edges[s.index];
            if s.sign > 0 {
                (e[0], e[1])
            } else {
                (e[1], e[0])
            }
        };
        let mut loop_vertices = Vec::with_capacity(signed.len());
        let (start, mut cur) = ends(&signed[0]);
        loop_vertices.push(start);
        for s in &signed[1..] {
            let (a, b) = ends(s);
            if a != cur {
                return Err(r.err(format!("open face loop at edge {}", s.index + 1)));
            }
            loop_vertices.push(a);
            cur = b;
        }
        if cur != start {
            return Err(r.err("open face loop: last edge does not return to the first vertex".into()));
        }
        faces.push(Face { vertices: loop_vertices, edges: signed });
    }

    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let raw = r.counted("cell")?;
        if raw.len() < 4 {
            return Err(r.err("a cell needs at least four faces".into()));
        }
        let fs = raw.iter().map(|&x| r.signed(x, nf, "face")).collect::<Result<_>>()?;
        cells.push(Cell { faces: fs });
    }

    PolyMesh::from_parts(vertices, edges, faces, cells)
}

pub fn write_poly_mesh<S: Scalar, W: Write>(mesh: &PolyMesh<S>, mut w: W) -> Result<()> {
    writeln!(w, "polymesh 1")?;
    writeln!(w, "{} {} {} {}", mesh.num_vertices(), mesh.num_edges(), mesh.num_faces(), mesh.num_cells())?;
    for v in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", v.x.as_f64(), v.y.as_f64(), v.z.as_f64())?;
    }
    for e in mesh.edges() {
        writeln!(w, "{} {}", e[0] + 1, e[1] + 1)?;
    }
    let signed = |s: &Signed| (s.index as i64 + 1) * s.sign as i64;
    for f in mesh.faces() {
        write!(w, "{}", f.edges.len())?;
        for s in &f.edges {
            write!(w, " {}", signed(s))?;
        }
        writeln!(w)?;
    }
    for c in mesh.cells() {
        write!(w, "{}", c.faces.len())?;
        for s in &c.faces {
            write!(w, " {}", signed(s))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

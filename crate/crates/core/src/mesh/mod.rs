//! Polyhedral meshes with signed incidence.
//!
//! Edges are stored as ordered vertex pairs, faces as counter-clockwise vertex
//! loops (with respect to the stored face normal) together with the signed list
//! of their edges, and cells as signed face lists where a positive sign means
//! that the stored face normal points out of the cell.

mod boundary;
mod generate;
mod io;
mod validate;

pub use boundary::{classify_boundary, BoundaryTags};
pub use generate::{build_cube_mesh, build_tet_mesh};
pub use io::{read_poly_mesh, write_poly_mesh};
pub use validate::{validate, ValidationReport, Violation};

use crate::scalar::Scalar;
use nalgebra::Vector3;
use std::collections::HashMap;

/// Index of a mesh entity paired with an orientation sign (`+1` or `-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signed {
    pub index: usize,
    pub sign: i8,
}

impl Signed {
    pub fn new(index: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { index, sign }
    }

    pub fn positive(index: usize) -> Self {
        Self { index, sign: 1 }
    }

    #[inline]
    pub fn sign_as<S: Scalar>(&self) -> S {
        if self.sign > 0 {
            S::one()
        } else {
            -S::one()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Vertex loop, counter-clockwise around the stored normal.
    pub vertices: Vec<usize>,
    /// `edges[i]` joins `vertices[i]` and `vertices[i + 1]`; the sign is `+1`
    /// when the loop traverses the edge in its stored direction.
    pub edges: Vec<Signed>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub faces: Vec<Signed>,
}

/// Cell-local numbering of vertices and edges, derived from the face lists.
#[derive(Clone, Debug, PartialEq)]
pub struct CellTopology {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// For each cell face, the local indices of its loop vertices.
    pub face_vertices: Vec<Vec<usize>>,
    /// For each cell face, the local indices of its edges (loop order).
    pub face_edges: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct PolyMesh<S: Scalar> {
    vertices: Vec<Vector3<S>>,
    edges: Vec<[usize; 2]>,
    faces: Vec<Face>,
    cells: Vec<Cell>,
    topology: Vec<CellTopology>,
}

impl<S: Scalar> PolyMesh<S> {
    /// Assembles a mesh from raw incidence data. Only index ranges are
    /// checked here; orientation and closure are the job of [`validate`].
    pub fn from_parts(
        vertices: Vec<Vector3<S>>,
        edges: Vec<[usize; 2]>,
        faces: Vec<Face>,
        cells: Vec<Cell>,
    ) -> crate::Result<Self> {
        let nv = vertices.len();
        for (i, e) in edges.iter().enumerate() {
            if e[0] >= nv || e[1] >= nv || e[0] == e[1] {
                return Err(crate::Error::InvalidMesh(format!("edge {i} has invalid vertices {e:?}")));
            }
        }
        for (i, f) in faces.iter().enumerate() {
            if f.vertices.len() < 3 || f.vertices.len() != f.edges.len() {
                return Err(crate::Error::InvalidMesh(format!("face {i} is not a polygon")));
            }
            for (k, se) in f.edges.iter().enumerate() {
                let Some(e) = edges.get(se.index) else {
                    return Err(crate::Error::InvalidMesh(format!("face {i} references missing edge {}", se.index)));
                };
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % f.vertices.len()]);
                let ok = if se.sign > 0 { *e == [a, b] } else { *e == [b, a] };
                if !ok {
                    return Err(crate::Error::InvalidMesh(format!(
                        "face {i}: edge {} does not join loop vertices {a} and {b}",
                        se.index
                    )));
                }
            }
        }
        for (i, c) in cells.iter().enumerate() {
            if c.faces.is_empty() || c.faces.iter().any(|f| f.index >= faces.len()) {
                return Err(crate::Error::InvalidMesh(format!("cell {i} references missing faces")));
            }
        }
        let topology = cells.iter().map(|c| cell_topology(c, &faces)).collect();
        Ok(Self { vertices, edges, faces, cells, topology })
    }

    pub fn vertices(&self) -> &[Vector3<S>] {
        &self.vertices
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
    pub fn cell_topology(&self, cell: usize) -> &CellTopology {
        &self.topology[cell]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Reverses the stored orientation of a face and updates every cell sign
    /// that refers to it, so the mesh stays consistent.
    pub fn flip_face(&mut self, face: usize) {
        reverse_loop(&mut self.faces[face]);
        for c in &mut self.cells {
            for f in &mut c.faces {
                if f.index == face {
                    f.sign = -f.sign;
                }
            }
        }
        self.topology = self.cells.iter().map(|c| cell_topology(c, &self.faces)).collect();
    }

    /// Cells incident to each face, with the sign they use for it.
    pub fn face_cells(&self) -> Vec<Vec<(usize, i8)>> {
        let mut out = vec![Vec::new(); self.faces.len()];
        for (c, cell) in self.cells.iter().enumerate() {
            for f in &cell.faces {
                out[f.index].push((c, f.sign));
            }
        }
        out
    }

    /// Largest cell diameter.
    pub fn mesh_size(&self) -> S {
        (0..self.num_cells())
            .map(|c| {
                let vs = &self.topology[c].vertices;
                let mut d = S::zero();
                for (i, &a) in vs.iter().enumerate() {
                    for &b in &vs[i + 1..] {
                        d = d.max((self.vertices[a] - self.vertices[b]).norm());
                    }
                }
                d
            })
            .fold(S::zero(), |a, b| a.max(b))
    }
}

/// Reverses a face loop in place without touching cell signs.
pub(crate) fn reverse_loop(face: &mut Face) {
    let n = face.vertices.len();
    // Loop v0 v1 ... v_{n-1} becomes v0 v_{n-1} ... v1; edge k of the new loop
    // joins v_{n-k} and v_{n-k-1}, i.e. old edge n-1-k traversed backwards.
    let verts: Vec<usize> = std::iter::once(face.vertices[0]).chain(face.vertices[1..].iter().rev().copied()).collect();
    let edges: Vec<Signed> = (0..n)
        .map(|k| {
            let old = face.edges[n - 1 - k];
            Signed::new(old.index, -old.sign)
        })
        .collect();
    face.vertices = verts;
    face.edges = edges;
}

fn cell_topology(cell: &Cell, faces: &[Face]) -> CellTopology {
    let mut vertices = Vec::new();
    let mut vmap = HashMap::new();
    let mut edges = Vec::new();
    let mut emap = HashMap::new();
    let mut face_vertices = Vec::with_capacity(cell.faces.len());
    let mut face_edges = Vec::with_capacity(cell.faces.len());
    for sf in &cell.faces {
        let f = &faces[sf.index];
        let fv = f
            .vertices
            .iter()
            .map(|&v| {
                *vmap.entry(v).or_insert_with(|| {
                    vertices.push(v);
                    vertices.len() - 1
                })
            })
            .collect();
        let fe = f
            .edges
            .iter()
            .map(|se| {
                *emap.entry(se.index).or_insert_with(|| {
                    edges.push(se.index);
                    edges.len() - 1
                })
            })
            .collect();
        face_vertices.push(fv);
        face_edges.push(fe);
    }
    CellTopology { vertices, edges, face_vertices, face_edges }
}

/// Incremental construction of a [`PolyMesh`] from cells given as outward
/// oriented vertex loops. Shared faces and edges are detected by their vertex
/// sets; edges are stored from the lower to the higher vertex index and each
/// face keeps the orientation of the first cell that introduced it.
#[derive(Debug)]
pub struct MeshBuilder<S: Scalar> {
    vertices: Vec<Vector3<S>>,
    edges: Vec<[usize; 2]>,
    edge_map: HashMap<[usize; 2], usize>,
    faces: Vec<Face>,
    face_map: HashMap<Vec<usize>, usize>,
    cells: Vec<Cell>,
}

impl<S: Scalar> MeshBuilder<S> {
    pub fn new(vertices: Vec<Vector3<S>>) -> Self {
        Self {
            vertices,
            edges: Vec::new(),
            edge_map: HashMap::new(),
            faces: Vec::new(),
            face_map: HashMap::new(),
            cells: Vec::new(),
        }
    }

    fn edge(&mut self, a: usize, b: usize) -> Signed {
        let key = if a < b { [a, b] } else { [b, a] };
        let idx = *self.edge_map.entry(key).or_insert_with(|| {
            self.edges.push(key);
            self.edges.len() - 1
        });
        Signed::new(idx, if a < b { 1 } else { -1 })
    }

    /// Adds a cell; every loop must be oriented with its normal pointing out.
    pub fn add_cell(&mut self, outward_loops: &[Vec<usize>]) -> usize {
        let mut cell_faces = Vec::with_capacity(outward_loops.len());
        for lp in outward_loops {
            let mut key = lp.clone();
            key.sort_unstable();
            if let Some(&f) = self.face_map.get(&key) {
                // The stored loop is a rotation of either `lp` or its reverse.
                let stored = &self.faces[f].vertices;
                let pos = stored.iter().position(|&v| v == lp[0]).expect("shared face vertex");
                let next = stored[(pos + 1) % stored.len()];
                let sign = if next == lp[1] { 1 } else { -1 };
                cell_faces.push(Signed::new(f, sign));
            } else {
                let n = lp.len();
                let edges = (0..n).map(|k| self.edge(lp[k], lp[(k + 1) % n])).collect();
                self.faces.push(Face { vertices: lp.clone(), edges });
                let f = self.faces.len() - 1;
                self.face_map.insert(key, f);
                cell_faces.push(Signed::positive(f));
            }
        }
        self.cells.push(Cell { faces: cell_faces });
        self.cells.len() - 1
    }

    pub fn build(self) -> crate::Result<PolyMesh<S>> {
        PolyMesh::from_parts(self.vertices, self.edges, self.faces, self.cells)
    }
}

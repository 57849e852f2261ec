use super::PolyMesh;
use crate::geometry::{cell_geometry, face_geometry, FaceGeometry};
use crate::scalar::Scalar;
use nalgebra::{Vector2, Vector3};
use std::collections::BTreeMap;
use std::fmt;

/// Relative tolerance for face planarity (scaled by the face diameter).
pub const PLANARITY_TOL: f64 = 1e-12;
/// Relative tolerance for the closure of a cell surface.
pub const CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DegenerateFace {
        face: usize,
        message: String,
    },
    NonPlanarFace {
        face: usize,
        warp: f64,
        tolerance: f64,
    },
    SelfIntersectingFace {
        face: usize,
    },
    FaceIncidence {
        face: usize,
        cells: Vec<(usize, i8)>,
    },
    /// An edge of the cell is not traversed in opposite directions by its two faces.
    Orientation {
        cell: usize,
        edge: usize,
        balance: i32,
        uses: usize,
    },
    EulerCharacteristic {
        cell: usize,
        value: i64,
    },
    OpenSurface {
        cell: usize,
        residual: f64,
    },
    DegenerateCell {
        cell: usize,
        message: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegenerateFace { face, message } => write!(f, "face {face}: {message}"),
            Violation::NonPlanarFace { face, warp, tolerance } => {
                write!(f, "face {face}: out of plane by {warp:.3e} (tolerance {tolerance:.3e})")
            }
            Violation::SelfIntersectingFace { face } => write!(f, "face {face}: self-intersecting loop"),
            Violation::FaceIncidence { face, cells } => write!(f, "face {face}: bad cell incidence {cells:?}"),
            Violation::Orientation { cell, edge, balance, uses } => write!(
                f,
                "cell {cell}: inconsistent orientation at edge {edge} (used {uses} times, net traversal {balance})"
            ),
            Violation::EulerCharacteristic { cell, value } => write!(f, "cell {cell}: V - E + F = {value}"),
            Violation::OpenSurface { cell, residual } => {
                write!(f, "cell {cell}: signed area vectors do not cancel (relative residual {residual:.3e})")
            }
            Violation::DegenerateCell { cell, message } => write!(f, "cell {cell}: {message}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport<S: Scalar> {
    pub violations: Vec<Violation>,
    /// Per cell, the smallest ratio h_F / h_P over its faces.
    pub face_to_cell: Vec<S>,
    /// Per face, the smallest ratio h_e / h_F over its edges.
    pub edge_to_face: Vec<S>,
    /// Cells whose centroid fan contains inverted tetrahedra.
    pub inverted_fans: Vec<usize>,
}

impl<S: Scalar> ValidationReport<S> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn min_face_to_cell(&self) -> S {
        self.face_to_cell.iter().fold(S::max_value().unwrap(), |a, &b| a.min(b))
    }

    pub fn min_edge_to_face(&self) -> S {
        self.edge_to_face.iter().fold(S::max_value().unwrap(), |a, &b| a.min(b))
    }
}

fn segments_cross<S: Scalar>(a: Vector2<S>, b: Vector2<S>, c: Vector2<S>, d: Vector2<S>) -> bool {
    let orient = |p: Vector2<S>, q: Vector2<S>, r: Vector2<S>| (q - p).perp(&(r - p));
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    let z = S::zero();
    ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z))
}

fn self_intersecting<S: Scalar>(g: &FaceGeometry<S>, verts: &[usize]) -> bool {
    let mut sorted = verts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return true;
    }
    let p: Vec<Vector2<S>> = g.points.iter().map(|x| g.frame.to_local(x)).collect();
    let k = p.len();
    for i in 0..k {
        for j in i + 2..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            if segments_cross(p[i], p[(i + 1) % k], p[j], p[(j + 1) % k]) {
                return true;
            }
        }
    }
    false
}

/// Checks every mesh invariant and collects shape-quality metrics. Never
/// fails; problems are listed in the report.
pub fn validate<S: Scalar>(mesh: &PolyMesh<S>) -> ValidationReport<S> {
    let mut violations = Vec::new();
    let edge_len: Vec<S> =
        mesh.edges().iter().map(|e| (mesh.vertices()[e[1]] - mesh.vertices()[e[0]]).norm()).collect();

    let mut faces = Vec::with_capacity(mesh.num_faces());
    let mut edge_to_face = Vec::with_capacity(mesh.num_faces());
    for f in 0..mesh.num_faces() {
        match face_geometry(mesh, f) {
            Ok(g) => {
                let tol = S::lit(PLANARITY_TOL) * g.diameter;
                if g.warp > tol {
                    violations.push(Violation::NonPlanarFace {
                        face: f,
                        warp: g.warp.as_f64(),
                        tolerance: tol.as_f64(),
                    });
                }
                if self_intersecting(&g, &mesh.faces()[f].vertices) {
                    violations.push(Violation::SelfIntersectingFace { face: f });
                }
                let he = mesh.faces()[f].edges.iter().fold(S::max_value().unwrap(), |a, e| a.min(edge_len[e.index]));
                edge_to_face.push(he / g.diameter);
                faces.push(Some(g));
            }
            Err(e) => {
                violations.push(Violation::DegenerateFace { face: f, message: e.to_string() });
                edge_to_face.push(S::zero());
                faces.push(None);
            }
        }
    }

    for (f, cells) in mesh.face_cells().into_iter().enumerate() {
        let ok = match cells.as_slice() {
            [_] => true,
            [(a, s), (b, t)] => a != b && s + t == 0,
            _ => false,
        };
        if !ok {
            violations.push(Violation::FaceIncidence { face: f, cells });
        }
    }

    let all_faces: Option<Vec<FaceGeometry<S>>> = faces.iter().cloned().collect();
    let mut face_to_cell = Vec::with_capacity(mesh.num_cells());
    let mut inverted_fans = Vec::new();
    for (c, cell) in mesh.cells().iter().enumerate() {
        let mut balance: BTreeMap<usize, (i32, usize)> = BTreeMap::new();
        for sf in &cell.faces {
            for se in &mesh.faces()[sf.index].edges {
                let entry = balance.entry(se.index).or_insert((0, 0));
                entry.0 += (sf.sign * se.sign) as i32;
                entry.1 += 1;
            }
        }
        for (&edge, &(b, uses)) in &balance {
            if b != 0 || uses != 2 {
                violations.push(Violation::Orientation { cell: c, edge, balance: b, uses });
            }
        }
        let t = mesh.cell_topology(c);
        let chi = t.vertices.len() as i64 - t.edges.len() as i64 + cell.faces.len() as i64;
        if chi != 2 {
            violations.push(Violation::EulerCharacteristic { cell: c, value: chi });
        }

        if cell.faces.iter().any(|sf| faces[sf.index].is_none()) {
            face_to_cell.push(S::zero());
            continue;
        }
        let mut sum = Vector3::zeros();
        let mut total = S::zero();
        for sf in &cell.faces {
            let g = faces[sf.index].as_ref().unwrap();
            sum += g.frame.n * (g.area * sf.sign_as::<S>());
            total += g.area;
        }
        let residual = sum.norm() / total;
        if residual > S::lit(CLOSURE_TOL) {
            violations.push(Violation::OpenSurface { cell: c, residual: residual.as_f64() });
        }
        let Some(all) = all_faces.as_ref() else {
            face_to_cell.push(S::zero());
            continue;
        };
        match cell_geometry(mesh, all, c) {
            Ok(cg) => {
                let hf = cell
                    .faces
                    .iter()
                    .fold(S::max_value().unwrap(), |a, sf| a.min(faces[sf.index].as_ref().unwrap().diameter));
                face_to_cell.push(hf / cg.diameter);
                if cg.inverted_fan {
                    inverted_fans.push(c);
                }
            }
            Err(e) => {
                violations.push(Violation::DegenerateCell { cell: c, message: e.to_string() });
                face_to_cell.push(S::zero());
            }
        }
    }

    ValidationReport { violations, face_to_cell, edge_to_face, inverted_fans }
}

use super::PolyMesh;
use crate::scalar::Scalar;

/// Entities lying on the domain boundary, as sorted index lists and masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryTags {
    pub boundary_vertices: Vec<usize>,
    pub boundary_edges: Vec<usize>,
    pub boundary_faces: Vec<usize>,
    pub vertex_mask: Vec<bool>,
    pub edge_mask: Vec<bool>,
    pub face_mask: Vec<bool>,
}

/// A face is on the boundary iff exactly one cell uses it; vertices and
/// edges are on the boundary iff they belong to a boundary face.
pub fn classify_boundary<S: Scalar>(mesh: &PolyMesh<S>) -> BoundaryTags {
    let mut face_mask = vec![false; mesh.num_faces()];
    let mut vertex_mask = vec![false; mesh.num_vertices()];
    let mut edge_mask = vec![false; mesh.num_edges()];
    for (f, cells) in mesh.face_cells().iter().enumerate() {
        if cells.len() == 1 {
            face_mask[f] = true;
            let face = &mesh.faces()[f];
            for &v in &face.vertices {
                vertex_mask[v] = true;
            }
            for e in &face.edges {
                edge_mask[e.index] = true;
            }
        }
    }
    let idx = |m: &[bool]| m.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    BoundaryTags {
        boundary_vertices: idx(&vertex_mask),
        boundary_edges: idx(&edge_mask),
        boundary_faces: idx(&face_mask),
        vertex_mask,
        edge_mask,
        face_mask,
    }
}

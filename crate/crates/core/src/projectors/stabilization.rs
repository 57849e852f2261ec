use crate::geometry::Geometry;
use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};

/// Diagonal dofi-dofi stabilizations of one cell, together with the maps
/// that evaluate the DoFs of polynomial coefficient vectors.
#[derive(Clone, Debug)]
pub struct Stabilization<S: Scalar> {
    /// DoFs of `e_i m_α`, `n_dofs × 12`.
    pub velocity_dofs: DMatrix<S>,
    /// DoFs of the constant fields `e_l`, `n_edges × 3`.
    pub edge_dofs: DMatrix<S>,
    /// DoFs of the constant fields `e_l`, `n_faces × 3`.
    pub face_dofs: DMatrix<S>,
    pub s_a: DVector<S>,
    pub s_m: DVector<S>,
    pub s_edge: DVector<S>,
    pub s_face: DVector<S>,
}

pub fn stabilization<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>, cell: usize) -> Stabilization<S> {
    let topo = mesh.cell_topology(cell);
    let cfaces = &mesh.cells()[cell].faces;
    let cg = &geom.cells[cell];
    let h = cg.diameter;
    let nvl = topo.vertices.len();
    let nd = 3 * nvl + cfaces.len();

    let mut velocity_dofs = DMatrix::zeros(nd, 12);
    let mono = |x: &nalgebra::Vector3<S>| {
        let d = (x - cg.centroid) / h;
        [S::one(), d.x, d.y, d.z]
    };
    for (lv, &v) in topo.vertices.iter().enumerate() {
        let m = mono(&mesh.vertices()[v]);
        for i in 0..3 {
            for a in 0..4 {
                velocity_dofs[(3 * lv + i, 4 * i + a)] = m[a];
            }
        }
    }
    let mut face_dofs = DMatrix::zeros(cfaces.len(), 3);
    let mut s_face = DVector::zeros(cfaces.len());
    for (lf, sf) in cfaces.iter().enumerate() {
        let fg = &geom.faces[sf.index];
        let n = fg.normal();
        let m = mono(&fg.centroid);
        for i in 0..3 {
            for a in 0..4 {
                velocity_dofs[(3 * nvl + lf, 4 * i + a)] = n[i] * m[a];
            }
            face_dofs[(lf, i)] = n[i];
        }
        s_face[lf] = h * fg.area;
    }

    let mut multiplicity = vec![0usize; topo.edges.len()];
    for fe in &topo.face_edges {
        for &le in fe {
            multiplicity[le] += 1;
        }
    }
    let mut edge_dofs = DMatrix::zeros(topo.edges.len(), 3);
    let mut s_edge = DVector::zeros(topo.edges.len());
    for (le, &e) in topo.edges.iter().enumerate() {
        let eg = &geom.edges[e];
        edge_dofs.row_mut(le).copy_from(&eg.tangent.transpose());
        s_edge[le] = h * h * S::from_count(multiplicity[le]) * eg.length;
    }

    Stabilization {
        velocity_dofs,
        edge_dofs,
        face_dofs,
        s_a: DVector::from_element(nd, h),
        s_m: DVector::from_element(nd, h * h * h),
        s_edge,
        s_face,
    }
}

/// `(I − D Π)ᵀ diag(s) (I − D Π)`.
pub fn stabilized<S: Scalar>(dofs: &DMatrix<S>, projector: &DMatrix<S>, s: &DVector<S>) -> DMatrix<S> {
    let n = projector.ncols();
    let r = DMatrix::identity(n, n) - dofs * projector;
    let sr = DMatrix::from_diagonal(s) * &r;
    r.transpose() * sr
}

use crate::geometry::{face_quadrature, Geometry};
use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use nalgebra::{DMatrix, Matrix2, Vector2, Vector3};

/// `Π0` of the local edge space as a `3 × n_edges` matrix.
///
/// For each direction `e_l`, `∫_P E·e_l = −Σ_F ∫_F E_τ·p_F` with the in-plane
/// field `p_F = ½ (e_l × x_P) × ν_F`. Splitting `p_F` into a rotated gradient
/// `curl_F q` plus a multiple of `x_F`, the second part is annihilated by the
/// face constraint and the first reduces to edge data through Stokes' theorem.
pub fn edge_projector<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>, cell: usize) -> DMatrix<S> {
    let topo = mesh.cell_topology(cell);
    let cg = &geom.cells[cell];
    let half = S::lit(0.5);
    let mut out = DMatrix::zeros(3, topo.edges.len());
    for (lf, sf) in mesh.cells()[cell].faces.iter().enumerate() {
        let face = &mesh.faces()[sf.index];
        let fg = &geom.faces[sf.index];
        let fr = &fg.frame;
        let nu = fr.n * sf.sign_as::<S>();
        let d0 = fg.centroid - cg.centroid;
        let fq = face_quadrature(fg, 2);
        let loc: Vec<Vector2<S>> = fg.points.iter().map(|p| fr.to_local(p)).collect();
        let k = loc.len();
        for l in 0..3 {
            let el = Vector3::ith(l, S::one());
            let field = |v: &Vector3<S>| {
                let p = el.cross(v).cross(&nu) * half;
                Vector2::new(p.dot(&fr.t1), p.dot(&fr.t2))
            };
            let p0 = field(&d0);
            let g = Matrix2::from_columns(&[field(&fr.t1), field(&fr.t2)]);
            let g = g - Matrix2::identity() * (g.trace() * half);
            let (a, b) = (-p0.y, p0.x);
            let (alpha, beta, gamma) = (-g[(1, 0)] * half, g[(0, 0)], g[(0, 1)] * half);
            let q =
                |xi: &Vector2<S>| a * xi.x + b * xi.y + alpha * xi.x * xi.x + beta * xi.x * xi.y + gamma * xi.y * xi.y;
            let q_face = fq.integrate(|x| q(&fr.to_local(x)));
            for (j, se) in face.edges.iter().enumerate() {
                let (pa, pb) = (loc[j], loc[(j + 1) % k]);
                let he = geom.edges[se.index].length;
                let q_edge = he * (q(&pa) + q(&((pa + pb) * half)) * S::lit(4.0) + q(&pb)) / S::lit(6.0);
                let s = se.sign_as::<S>();
                let le = topo.face_edges[lf][j];
                out[(l, le)] -= (s * he / fg.area * q_face - s * q_edge) / cg.volume;
            }
        }
    }
    out
}

/// `Π0` of the local face space as a `3 × n_faces` matrix.
pub fn face_projector<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>, cell: usize) -> DMatrix<S> {
    let cg = &geom.cells[cell];
    let faces = &mesh.cells()[cell].faces;
    let mut out = DMatrix::zeros(3, faces.len());
    for (lf, sf) in faces.iter().enumerate() {
        let fg = &geom.faces[sf.index];
        let col = (fg.centroid - cg.centroid) * (sf.sign_as::<S>() * fg.area / cg.volume);
        out.column_mut(lf).copy_from(&col);
    }
    out
}

/// Local edge-to-face curl: `(curl E)_F = (1/|F|) Σ_e s_{F,e} |e| E_e`.
pub fn local_curl<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>, cell: usize) -> DMatrix<S> {
    let topo = mesh.cell_topology(cell);
    let faces = &mesh.cells()[cell].faces;
    let mut out = DMatrix::zeros(faces.len(), topo.edges.len());
    for (lf, sf) in faces.iter().enumerate() {
        let area = geom.faces[sf.index].area;
        for (j, se) in mesh.faces()[sf.index].edges.iter().enumerate() {
            out[(lf, topo.face_edges[lf][j])] += se.sign_as::<S>() * geom.edges[se.index].length / area;
        }
    }
    out
}

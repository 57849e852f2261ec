//! Computable polynomial projections of the local virtual element spaces and
//! the dofi-dofi stabilizations.
//!
//! Every matrix acts on cell-local DoF vectors. Local velocity DoFs are the
//! three components at each vertex of the cell topology followed by the
//! normal moments of the cell faces; local edge and face DoFs follow the cell
//! topology and the cell face list.

mod electromagnetic;
mod face;
mod stabilization;
mod velocity;

pub use electromagnetic::{edge_projector, face_projector, local_curl};
pub use face::FaceNodalProjector;
pub use stabilization::{stabilization, stabilized, Stabilization};
pub use velocity::{linear_gram, velocity_projectors, VelocityProjectors};

use crate::geometry::Geometry;
use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use crate::spaces::{local_edge_dofs, local_face_dofs, local_velocity_dofs};
use crate::Result;
use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct ElementOperators<S: Scalar> {
    pub cell: usize,
    pub volume: S,
    pub diameter: S,
    pub centroid: Vector3<S>,
    /// Global indices of the local DoFs.
    pub velocity_dofs: Vec<usize>,
    pub edge_dofs: Vec<usize>,
    pub face_dofs: Vec<usize>,
    pub velocity: VelocityProjectors<S>,
    pub pi_zero_edge: DMatrix<S>,
    pub pi_zero_face: DMatrix<S>,
    /// Local edge-to-face curl, `n_faces × n_edges`.
    pub curl: DMatrix<S>,
    pub stabilization: Stabilization<S>,
}

impl<S: Scalar> ElementOperators<S> {
    pub fn build(mesh: &PolyMesh<S>, geom: &Geometry<S>, faces: &[FaceNodalProjector<S>], cell: usize) -> Result<Self> {
        let cg = &geom.cells[cell];
        Ok(Self {
            cell,
            volume: cg.volume,
            diameter: cg.diameter,
            centroid: cg.centroid,
            velocity_dofs: local_velocity_dofs(mesh, cell),
            edge_dofs: local_edge_dofs(mesh, cell),
            face_dofs: local_face_dofs(mesh, cell),
            velocity: velocity_projectors(mesh, geom, cell, faces)?,
            pi_zero_edge: edge_projector(mesh, geom, cell),
            pi_zero_face: face_projector(mesh, geom, cell),
            curl: local_curl(mesh, geom, cell),
            stabilization: stabilization(mesh, geom, cell),
        })
    }

    /// `Π0_0` of the velocity: the `α = 0` rows of `Π0_1`, `3 × n_dofs`.
    pub fn velocity_mean(&self) -> DMatrix<S> {
        let p = &self.velocity.pi_zero;
        DMatrix::from_fn(3, p.ncols(), |i, j| p[(4 * i, j)])
    }
}

pub fn face_projectors<S: Scalar>(geom: &Geometry<S>) -> Result<Vec<FaceNodalProjector<S>>> {
    geom.faces.par_iter().enumerate().map(|(f, g)| FaceNodalProjector::new(f, g)).collect()
}

/// Element operators of every cell, in cell order.
pub fn element_operators<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>) -> Result<Vec<ElementOperators<S>>> {
    let faces = face_projectors(geom)?;
    (0..mesh.num_cells()).into_par_iter().map(|c| ElementOperators::build(mesh, geom, &faces, c)).collect()
}

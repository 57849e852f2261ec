//! Degree-of-freedom layouts, interpolants and the exact discrete
//! divergence and curl.
//!
//! Global orderings follow entity indices:
//! * velocity: `3 v + i` for component `i` at vertex `v`, then `3 #V + f` for
//!   the normal moment on face `f`;
//! * pressure: one value per cell;
//! * edge: one tangential average per edge, along the stored edge direction;
//! * face: one normal average per face, along the stored face normal.

use crate::geometry::{cell_quadrature, edge_quadrature, face_quadrature, Geometry};
use crate::mesh::{BoundaryTags, PolyMesh};
use crate::scalar::Scalar;
use crate::{Error, Result};
use nalgebra::{DVector, Vector3};
use rayon::prelude::*;

/// Quadrature degree used by the face and cell interpolants.
pub const INTERPOLATION_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Velocity,
    Pressure,
    Edge,
    Face,
}

/// Size and boundary mask of one discrete space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayout {
    pub space: Space,
    pub boundary: Vec<bool>,
}

impl DofLayout {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayouts {
    pub velocity: DofLayout,
    pub pressure: DofLayout,
    pub edge: DofLayout,
    pub face: DofLayout,
    pub num_vertices: usize,
}

impl DofLayouts {
    pub fn get(&self, space: Space) -> &DofLayout {
        match space {
            Space::Velocity => &self.velocity,
            Space::Pressure => &self.pressure,
            Space::Edge => &self.edge,
            Space::Face => &self.face,
        }
    }

    /// Global index of the velocity face moment on face `f`.
    pub fn velocity_face_dof(&self, f: usize) -> usize {
        3 * self.num_vertices + f
    }
}

pub fn build_dof_layouts<S: Scalar>(mesh: &PolyMesh<S>, tags: &BoundaryTags) -> DofLayouts {
    let mut velocity = Vec::with_capacity(3 * mesh.num_vertices() + mesh.num_faces());
    for &b in &tags.vertex_mask {
        velocity.extend([b; 3]);
    }
    velocity.extend_from_slice(&tags.face_mask);
    DofLayouts {
        velocity: DofLayout { space: Space::Velocity, boundary: velocity },
        pressure: DofLayout { space: Space::Pressure, boundary: vec![false; mesh.num_cells()] },
        edge: DofLayout { space: Space::Edge, boundary: tags.edge_mask.clone() },
        face: DofLayout { space: Space::Face, boundary: tags.face_mask.clone() },
        num_vertices: mesh.num_vertices(),
    }
}

/// Coefficient vector of a discrete field together with its space.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCoefficients<S: Scalar> {
    pub space: Space,
    pub values: DVector<S>,
}

impl<S: Scalar> FieldCoefficients<S> {
    pub fn new(space: Space, values: DVector<S>) -> Self {
        Self { space, values }
    }

    pub fn zeros(layouts: &DofLayouts, space: Space) -> Self {
        Self { space, values: DVector::zeros(layouts.get(space).len()) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Vertex values and normal face moments of `w`.
pub fn interpolate_velocity<S, F>(mesh: &PolyMesh<S>, geom: &Geometry<S>, w: F) -> FieldCoefficients<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> Vector3<S> + Sync,
{
    let nv = mesh.num_vertices();
    let mut values = DVector::zeros(3 * nv + mesh.num_faces());
    for (v, x) in mesh.vertices().iter().enumerate() {
        let wx = w(x);
        for i in 0..3 {
            values[3 * v + i] = wx[i];
        }
    }
    let moments = normal_means(geom, &w);
    values.rows_mut(3 * nv, mesh.num_faces()).copy_from(&moments);
    FieldCoefficients::new(Space::Velocity, values)
}

/// Normal averages `(1/|F|) ∫_F B·n_F`.
pub fn interpolate_face<S, F>(geom: &Geometry<S>, b: F) -> FieldCoefficients<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> Vector3<S> + Sync,
{
    FieldCoefficients::new(Space::Face, normal_means(geom, &b))
}

fn normal_means<S, F>(geom: &Geometry<S>, field: &F) -> DVector<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> Vector3<S> + Sync,
{
    let v: Vec<S> = geom
        .faces
        .par_iter()
        .map(|g| {
            let n = g.normal();
            face_quadrature(g, INTERPOLATION_DEGREE).integrate(|x| field(x).dot(&n)) / g.area
        })
        .collect();
    DVector::from_vec(v)
}

/// Tangential averages `(1/|e|) ∫_e E·t_e` by three-point Gauss quadrature.
pub fn interpolate_edge<S, F>(mesh: &PolyMesh<S>, geom: &Geometry<S>, e: F) -> FieldCoefficients<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> Vector3<S> + Sync,
{
    let v: Vec<S> = (0..mesh.num_edges())
        .into_par_iter()
        .map(|k| {
            let [a, b] = mesh.edges()[k];
            let g = &geom.edges[k];
            let q = edge_quadrature(&mesh.vertices()[a], &mesh.vertices()[b]);
            q.integrate(|x| e(x).dot(&g.tangent)) / g.length
        })
        .collect();
    FieldCoefficients::new(Space::Edge, DVector::from_vec(v))
}

/// Cell means of `p`.
pub fn interpolate_pressure<S, F>(mesh: &PolyMesh<S>, geom: &Geometry<S>, p: F) -> FieldCoefficients<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> S + Sync,
{
    let v: Vec<S> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| cell_quadrature(mesh, geom, c, INTERPOLATION_DEGREE).integrate(&p) / geom.cells[c].volume)
        .collect();
    FieldCoefficients::new(Space::Pressure, DVector::from_vec(v))
}

/// Cellwise divergence `(1/|P|) Σ_F σ_F |F| d_F` from normal face values `d`.
pub fn cell_divergence<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>, normal: &[S]) -> Vec<S> {
    mesh.cells()
        .iter()
        .zip(&geom.cells)
        .map(|(cell, cg)| {
            cell.faces
                .iter()
                .fold(S::zero(), |acc, sf| acc + sf.sign_as::<S>() * geom.faces[sf.index].area * normal[sf.index])
                / cg.volume
        })
        .collect()
}

/// Exact cellwise divergence of a velocity or face field.
pub fn divergence_from_dofs<S: Scalar>(
    mesh: &PolyMesh<S>,
    geom: &Geometry<S>,
    field: &FieldCoefficients<S>,
) -> Result<Vec<S>> {
    let nf = mesh.num_faces();
    let normal = match field.space {
        Space::Velocity => field.values.rows(3 * mesh.num_vertices(), nf),
        Space::Face => field.values.rows(0, nf),
        other => return Err(Error::InvalidArgument(format!("no divergence defined on the {other:?} space"))),
    };
    let normal: Vec<S> = normal.iter().copied().collect();
    Ok(cell_divergence(mesh, geom, &normal))
}

/// L2 norm of a cellwise constant function.
pub fn piecewise_l2_norm<S: Scalar>(geom: &Geometry<S>, values: &[S]) -> S {
    values.iter().zip(&geom.cells).fold(S::zero(), |a, (&v, c)| a + c.volume * v * v).sqrt()
}

/// Face normal values of `curl E` from edge circulations.
pub fn curl_edge_to_face<S: Scalar>(
    mesh: &PolyMesh<S>,
    geom: &Geometry<S>,
    e: &FieldCoefficients<S>,
) -> Result<FieldCoefficients<S>> {
    if e.space != Space::Edge || e.len() != mesh.num_edges() {
        return Err(Error::InvalidArgument("curl expects edge coefficients".into()));
    }
    let v: Vec<S> =
        mesh.faces()
            .iter()
            .zip(&geom.faces)
            .map(|(f, g)| {
                f.edges.iter().fold(S::zero(), |acc, se| {
                    acc + se.sign_as::<S>() * geom.edges[se.index].length * e.values[se.index]
                }) / g.area
            })
            .collect();
    Ok(FieldCoefficients::new(Space::Face, DVector::from_vec(v)))
}

/// Global indices of the local velocity DoFs of a cell: the three components
/// at each cell vertex, then the normal moments of the cell faces.
pub fn local_velocity_dofs<S: Scalar>(mesh: &PolyMesh<S>, cell: usize) -> Vec<usize> {
    let topo = mesh.cell_topology(cell);
    let nv = mesh.num_vertices();
    let mut out = Vec::with_capacity(3 * topo.vertices.len() + mesh.cells()[cell].faces.len());
    for &v in &topo.vertices {
        out.extend([3 * v, 3 * v + 1, 3 * v + 2]);
    }
    out.extend(mesh.cells()[cell].faces.iter().map(|sf| 3 * nv + sf.index));
    out
}

pub fn local_edge_dofs<S: Scalar>(mesh: &PolyMesh<S>, cell: usize) -> Vec<usize> {
    mesh.cell_topology(cell).edges.clone()
}

pub fn local_face_dofs<S: Scalar>(mesh: &PolyMesh<S>, cell: usize) -> Vec<usize> {
    mesh.cells()[cell].faces.iter().map(|sf| sf.index).collect()
}

/// Restriction of a global coefficient vector to the given indices.
pub fn gather<S: Scalar>(global: &DVector<S>, dofs: &[usize]) -> DVector<S> {
    DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| global[d]))
}

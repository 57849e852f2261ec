//! Measures, centroids, diameters and face frames.
//!
//! Face quantities are computed in the plane spanned by the face frame: the
//! vertices are orthogonally projected onto the plane through their mean with
//! the Newell normal. For planar faces this is the identity; slightly warped
//! faces are thereby replaced by their projection.

mod monomials;
mod quadrature;

pub use monomials::{monomial_gram, ScaledMonomialBasis};
pub use quadrature::{cell_quadrature, edge_quadrature, face_quadrature, Quadrature};

use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use crate::{Error, Result};
use nalgebra::{Vector2, Vector3};
use rayon::prelude::*;

/// Right-handed orthonormal frame of a face, centred at its centroid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceFrame<S: Scalar> {
    pub origin: Vector3<S>,
    pub t1: Vector3<S>,
    pub t2: Vector3<S>,
    pub n: Vector3<S>,
}

impl<S: Scalar> FaceFrame<S> {
    pub fn to_local(&self, x: &Vector3<S>) -> Vector2<S> {
        let d = x - self.origin;
        Vector2::new(d.dot(&self.t1), d.dot(&self.t2))
    }

    pub fn to_global(&self, xi: &Vector2<S>) -> Vector3<S> {
        self.origin + self.t1 * xi.x + self.t2 * xi.y
    }
}

#[derive(Clone, Debug)]
pub struct EdgeGeometry<S: Scalar> {
    pub length: S,
    pub midpoint: Vector3<S>,
    /// Unit tangent in the stored edge direction.
    pub tangent: Vector3<S>,
}

#[derive(Clone, Debug)]
pub struct FaceGeometry<S: Scalar> {
    pub area: S,
    pub centroid: Vector3<S>,
    pub diameter: S,
    pub frame: FaceFrame<S>,
    /// Loop vertices projected onto the face plane.
    pub points: Vec<Vector3<S>>,
    /// Largest distance of an original vertex from the face plane.
    pub warp: S,
}

impl<S: Scalar> FaceGeometry<S> {
    pub fn normal(&self) -> Vector3<S> {
        self.frame.n
    }

    pub fn perimeter(&self) -> S {
        let n = self.points.len();
        (0..n).map(|k| (self.points[(k + 1) % n] - self.points[k]).norm()).fold(S::zero(), |a, b| a + b)
    }
}

#[derive(Clone, Debug)]
pub struct CellGeometry<S: Scalar> {
    pub volume: S,
    pub centroid: Vector3<S>,
    pub diameter: S,
    /// Set when the centroid fan contains a tetrahedron of non-positive volume.
    pub inverted_fan: bool,
}

#[derive(Clone, Debug)]
pub struct Geometry<S: Scalar> {
    pub edges: Vec<EdgeGeometry<S>>,
    pub faces: Vec<FaceGeometry<S>>,
    pub cells: Vec<CellGeometry<S>>,
}

impl<S: Scalar> Geometry<S> {
    pub fn surface_area(&self, mesh: &PolyMesh<S>, cell: usize) -> S {
        mesh.cells()[cell].faces.iter().fold(S::zero(), |a, f| a + self.faces[f.index].area)
    }
}

fn triple<S: Scalar>(a: &Vector3<S>, b: &Vector3<S>, c: &Vector3<S>) -> S {
    a.dot(&b.cross(c))
}

pub fn edge_geometry<S: Scalar>(mesh: &PolyMesh<S>, e: usize) -> EdgeGeometry<S> {
    let [a, b] = mesh.edges()[e];
    let (xa, xb) = (mesh.vertices()[a], mesh.vertices()[b]);
    let d = xb - xa;
    let length = d.norm();
    EdgeGeometry { length, midpoint: (xa + xb) * S::lit(0.5), tangent: d / length }
}

pub fn face_geometry<S: Scalar>(mesh: &PolyMesh<S>, f: usize) -> Result<FaceGeometry<S>> {
    let face = &mesh.faces()[f];
    let x: Vec<Vector3<S>> = face.vertices.iter().map(|&v| mesh.vertices()[v]).collect();
    let k = x.len();
    let mean = x.iter().fold(Vector3::zeros(), |a, p| a + p) / S::from_count(k);
    let mut newell = Vector3::zeros();
    for i in 0..k {
        newell += (x[i] - mean).cross(&(x[(i + 1) % k] - mean));
    }
    let nn = newell.norm();
    let scale = x.iter().fold(S::zero(), |a, p| a.max((p - mean).norm()));
    if !(nn > S::eps() * S::lit(16.0) * scale * scale) {
        return Err(Error::Geometry(format!("face {f} has zero area")));
    }
    let n = newell / nn;
    let points: Vec<Vector3<S>> = x.iter().map(|p| p - n * (p - mean).dot(&n)).collect();
    let warp = x.iter().fold(S::zero(), |a, p| a.max((p - mean).dot(&n).abs()));

    let mut t1 = points[1] - points[0];
    t1 /= t1.norm();
    let t2 = n.cross(&t1);

    // shoelace in the plane, relative to the vertex mean
    let mut area = S::zero();
    let mut first = Vector2::zeros();
    let loc: Vec<Vector2<S>> = points.iter().map(|p| Vector2::new((p - mean).dot(&t1), (p - mean).dot(&t2))).collect();
    for i in 0..k {
        let (p, q) = (loc[i], loc[(i + 1) % k]);
        let c = p.x * q.y - q.x * p.y;
        area += c;
        first += (p + q) * c;
    }
    area *= S::lit(0.5);
    if !(area > S::zero()) {
        return Err(Error::Geometry(format!("face {f} has non-positive oriented area")));
    }
    let cl = first / (S::lit(6.0) * area);
    let centroid = mean + t1 * cl.x + t2 * cl.y;

    let mut diameter = S::zero();
    for i in 0..k {
        for j in i + 1..k {
            diameter = diameter.max((x[i] - x[j]).norm());
        }
    }
    Ok(FaceGeometry { area, centroid, diameter, frame: FaceFrame { origin: centroid, t1, t2, n }, points, warp })
}

pub fn cell_geometry<S: Scalar>(mesh: &PolyMesh<S>, faces: &[FaceGeometry<S>], c: usize) -> Result<CellGeometry<S>> {
    let cell = &mesh.cells()[c];
    let topo = mesh.cell_topology(c);
    let xs: Vec<Vector3<S>> = topo.vertices.iter().map(|&v| mesh.vertices()[v]).collect();
    let mean = xs.iter().fold(Vector3::zeros(), |a, p| a + p) / S::from_count(xs.len());

    let mut volume = S::zero();
    let mut fan_volume = S::zero();
    let mut moment = Vector3::zeros();
    let six = S::lit(6.0);
    for sf in &cell.faces {
        let g = &faces[sf.index];
        let s = sf.sign_as::<S>();
        volume += s * g.area * g.centroid.dot(&g.frame.n);
        let a = g.centroid - mean;
        let k = g.points.len();
        for i in 0..k {
            let (p, q) = (g.points[i] - g.centroid, g.points[(i + 1) % k] - g.centroid);
            let v = s * triple(&a, &p, &q) / six;
            fan_volume += v;
            // centroid of the tet (mean, b_F, p_i, p_{i+1}) relative to `mean`
            moment += (a * S::lit(3.0) + p + q) * (v / S::lit(4.0));
        }
    }
    volume /= S::lit(3.0);
    if !(volume > S::zero()) || !(fan_volume > S::zero()) {
        return Err(Error::Geometry(format!("cell {c} has non-positive volume")));
    }
    let centroid = mean + moment / fan_volume;

    let mut inverted_fan = false;
    for sf in &cell.faces {
        let g = &faces[sf.index];
        let a = g.centroid - centroid;
        let k = g.points.len();
        for i in 0..k {
            let (p, q) = (g.points[i] - g.centroid, g.points[(i + 1) % k] - g.centroid);
            if sf.sign_as::<S>() * triple(&a, &p, &q) <= S::zero() {
                inverted_fan = true;
            }
        }
    }

    let mut diameter = S::zero();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            diameter = diameter.max((xs[i] - xs[j]).norm());
        }
    }
    Ok(CellGeometry { volume, centroid, diameter, inverted_fan })
}

/// Lengths, areas, volumes, centroids, diameters and face frames of every
/// entity of the mesh.
pub fn entity_measures<S: Scalar>(mesh: &PolyMesh<S>) -> Result<Geometry<S>> {
    let edges = (0..mesh.num_edges()).into_par_iter().map(|e| edge_geometry(mesh, e)).collect();
    let faces: Vec<FaceGeometry<S>> =
        (0..mesh.num_faces()).into_par_iter().map(|f| face_geometry(mesh, f)).collect::<Result<_>>()?;
    let cells = (0..mesh.num_cells()).into_par_iter().map(|c| cell_geometry(mesh, &faces, c)).collect::<Result<_>>()?;
    Ok(Geometry { edges, faces, cells })
}

//! Simplex-fan quadrature on polygons and polyhedra.

use super::{FaceGeometry, Geometry};
use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use nalgebra::Vector3;

/// Highest polynomial degree integrated exactly by the simplex rules.
pub const MAX_DEGREE: usize = 5;

#[derive(Clone, Debug)]
pub struct Quadrature<S: Scalar> {
    pub points: Vec<Vector3<S>>,
    pub weights: Vec<S>,
}

impl<S: Scalar> Quadrature<S> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<T, F>(&self, f: F) -> T
    where
        F: Fn(&Vector3<S>) -> T,
        T: std::ops::Add<Output = T> + std::ops::Mul<S, Output = T> + num_traits::Zero,
    {
        self.points.iter().zip(&self.weights).fold(T::zero(), |acc, (x, &w)| acc + f(x) * w)
    }

    pub fn measure(&self) -> S {
        self.weights.iter().fold(S::zero(), |a, &w| a + w)
    }
}

/// Barycentric triangle rule as (λ1, λ2, weight) with λ0 = 1 − λ1 − λ2; weights sum to 1.
fn triangle_rule(degree: usize) -> Vec<(f64, f64, f64)> {
    match degree {
        0 | 1 => vec![(1.0 / 3.0, 1.0 / 3.0, 1.0)],
        2 => vec![
            (1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0),
            (2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0),
            (1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0),
        ],
        _ => {
            let r = 15f64.sqrt();
            let mut out = vec![(1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0)];
            for (a, w) in [((6.0 - r) / 21.0, (155.0 - r) / 1200.0), ((6.0 + r) / 21.0, (155.0 + r) / 1200.0)] {
                let b = 1.0 - 2.0 * a;
                out.extend([(a, a, w), (b, a, w), (a, b, w)]);
            }
            out
        }
    }
}

/// Barycentric tetrahedron rule as (λ1, λ2, λ3, weight); weights sum to 1.
fn tet_rule(degree: usize) -> Vec<([f64; 3], f64)> {
    match degree {
        0 | 1 => vec![([0.25; 3], 1.0)],
        2 => {
            let a = (5.0 - 5f64.sqrt()) / 20.0;
            let b = 1.0 - 3.0 * a;
            vec![([a, a, a], 0.25), ([b, a, a], 0.25), ([a, b, a], 0.25), ([a, a, b], 0.25)]
        }
        _ => {
            let mut out = Vec::with_capacity(14);
            for (a, w) in [
                (0.310_885_919_263_300_6, 0.112_687_925_718_015_85),
                (0.092_735_250_310_891_23, 0.073_493_043_116_361_95),
            ] {
                let b = 1.0 - 3.0 * a;
                out.extend([([a, a, a], w), ([b, a, a], w), ([a, b, a], w), ([a, a, b], w)]);
            }
            let (a, w) = (0.045_503_704_125_649_65, 0.042_546_020_777_081_466);
            let b = 0.5 - a;
            for l in [[a, a, b], [a, b, a], [b, a, a], [b, b, a], [b, a, b], [a, b, b]] {
                out.push((l, w));
            }
            out
        }
    }
}

fn check_degree(degree: usize) {
    assert!(degree <= MAX_DEGREE, "quadrature degree {degree} exceeds {MAX_DEGREE}");
}

/// Fan triangulation of the face from its centroid.
pub fn face_quadrature<S: Scalar>(face: &FaceGeometry<S>, degree: usize) -> Quadrature<S> {
    check_degree(degree);
    let rule = triangle_rule(degree);
    let k = face.points.len();
    let b = face.centroid;
    let mut q = Quadrature { points: Vec::with_capacity(k * rule.len()), weights: Vec::with_capacity(k * rule.len()) };
    for i in 0..k {
        let (p, r) = (face.points[i], face.points[(i + 1) % k]);
        let area = (p - b).cross(&(r - b)).dot(&face.frame.n) * S::lit(0.5);
        for &(l1, l2, w) in &rule {
            q.points.push(b + (p - b) * S::lit(l1) + (r - b) * S::lit(l2));
            q.weights.push(area * S::lit(w));
        }
    }
    q
}

/// Fan tetrahedralization of the cell from its centroid over the face fans.
/// Tetrahedra with negative orientation contribute negative weights.
pub fn cell_quadrature<S: Scalar>(mesh: &PolyMesh<S>, geom: &Geometry<S>, cell: usize, degree: usize) -> Quadrature<S> {
    check_degree(degree);
    let rule = tet_rule(degree);
    let c = geom.cells[cell].centroid;
    let mut q = Quadrature { points: Vec::new(), weights: Vec::new() };
    for sf in &mesh.cells()[cell].faces {
        let f = &geom.faces[sf.index];
        let b = f.centroid;
        let k = f.points.len();
        for i in 0..k {
            let (p, r) = (f.points[i], f.points[(i + 1) % k]);
            let vol = sf.sign_as::<S>() * (b - c).dot(&(p - c).cross(&(r - c))) / S::lit(6.0);
            for &(l, w) in &rule {
                q.points.push(c + (b - c) * S::lit(l[0]) + (p - c) * S::lit(l[1]) + (r - c) * S::lit(l[2]));
                q.weights.push(vol * S::lit(w));
            }
        }
    }
    q
}

/// Three-point Gauss-Legendre rule on a segment (exact to degree 5).
pub fn edge_quadrature<S: Scalar>(a: &Vector3<S>, b: &Vector3<S>) -> Quadrature<S> {
    let len = (b - a).norm();
    let s = S::lit(0.6f64.sqrt() * 0.5);
    let half = S::lit(0.5);
    let m = (a + b) * half;
    let d = b - a;
    Quadrature {
        points: vec![m - d * s, m, m + d * s],
        weights: vec![len * S::lit(5.0 / 18.0), len * S::lit(8.0 / 18.0), len * S::lit(5.0 / 18.0)],
    }
}

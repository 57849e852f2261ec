use crate::geometry::{FaceFrame, FaceGeometry};
use crate::scalar::Scalar;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, Vector2, Vector3};

/// Elliptic projection onto `P1(F)` of the lowest-order nodal space on a
/// face, acting on scalar vertex values in loop order.
///
/// Coefficients refer to the scaled monomials `(1, ξ/h_F, η/h_F)` in the face
/// frame centred at the face centroid.
#[derive(Clone, Debug)]
pub struct FaceNodalProjector<S: Scalar> {
    pub frame: FaceFrame<S>,
    pub h: S,
    pub area: S,
    /// `3 × k` map from vertex values to monomial coefficients.
    pub coeffs: DMatrix<S>,
}

impl<S: Scalar> FaceNodalProjector<S> {
    pub fn new(face: usize, g: &FaceGeometry<S>) -> Result<Self> {
        let k = g.points.len();
        let h = g.diameter;
        let loc: Vec<Vector2<S>> = g.points.iter().map(|p| g.frame.to_local(p)).collect();
        let half = S::lit(0.5);
        let mut coeffs = DMatrix::zeros(3, k);
        let mut boundary = DVector::<S>::zeros(k);
        let mut mono = [S::zero(); 2];
        let mut perimeter = S::zero();
        for a in 0..k {
            let b = (a + 1) % k;
            let d = loc[b] - loc[a];
            let len = d.norm();
            // outward normal times length for a counter-clockwise loop
            let nh = [d.y, -d.x];
            for r in 0..2 {
                let c = h / g.area * nh[r] * half;
                coeffs[(1 + r, a)] += c;
                coeffs[(1 + r, b)] += c;
                mono[r] += len * (loc[a][r] + loc[b][r]) * half / h;
            }
            boundary[a] += len * half;
            boundary[b] += len * half;
            perimeter += len;
        }
        if !(g.area > S::zero()) || !(perimeter > S::zero()) {
            return Err(Error::SingularLocal { entity: format!("face {face}") });
        }
        for j in 0..k {
            coeffs[(0, j)] = (boundary[j] - mono[0] * coeffs[(1, j)] - mono[1] * coeffs[(2, j)]) / perimeter;
        }
        Ok(Self { frame: g.frame, h, area: g.area, coeffs })
    }

    /// Scaled monomials `(1, ξ/h, η/h)` at `x`.
    pub fn basis(&self, x: &Vector3<S>) -> Vector3<S> {
        let l = self.frame.to_local(x) / self.h;
        Vector3::new(S::one(), l.x, l.y)
    }

    /// Row vector `∫_F Π∇,F v` in terms of the vertex values.
    pub fn mean_row(&self) -> DVector<S> {
        self.coeffs.row(0).transpose() * self.area
    }
}

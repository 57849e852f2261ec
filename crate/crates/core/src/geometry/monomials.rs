use super::{FaceFrame, Quadrature};
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector, Vector3};

/// Scaled monomials `(x − b)/h` on a cell, or `(ξ, η)/h` in a face frame.
///
/// Ordering: `1`, the linear monomials, then the products `m_i m_j` with
/// `i ≤ j` in lexicographic order.
#[derive(Clone, Debug)]
pub struct ScaledMonomialBasis<S: Scalar> {
    pub center: Vector3<S>,
    pub h: S,
    pub degree: usize,
    pub frame: Option<FaceFrame<S>>,
}

impl<S: Scalar> ScaledMonomialBasis<S> {
    pub fn cell(center: Vector3<S>, h: S, degree: usize) -> Self {
        assert!(degree <= 2);
        Self { center, h, degree, frame: None }
    }

    /// Face basis centred at the frame origin.
    pub fn face(frame: FaceFrame<S>, h: S, degree: usize) -> Self {
        assert!(degree <= 2);
        Self { center: frame.origin, h, degree, frame: Some(frame) }
    }

    pub fn dim(&self) -> usize {
        if self.frame.is_some() {
            2
        } else {
            3
        }
    }

    pub fn len(&self) -> usize {
        let d = self.dim();
        match self.degree {
            0 => 1,
            1 => 1 + d,
            _ => 1 + d + d * (d + 1) / 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scaled coordinates of `x`.
    pub fn coords(&self, x: &Vector3<S>) -> [S; 3] {
        match &self.frame {
            Some(fr) => {
                let l = fr.to_local(x);
                [l.x / self.h, l.y / self.h, S::zero()]
            }
            None => {
                let d = (x - self.center) / self.h;
                [d.x, d.y, d.z]
            }
        }
    }

    pub fn eval(&self, x: &Vector3<S>) -> DVector<S> {
        let m = self.coords(x);
        let d = self.dim();
        let mut out = DVector::zeros(self.len());
        out[0] = S::one();
        if self.degree >= 1 {
            for i in 0..d {
                out[1 + i] = m[i];
            }
        }
        if self.degree >= 2 {
            let mut k = 1 + d;
            for i in 0..d {
                for j in i..d {
                    out[k] = m[i] * m[j];
                    k += 1;
                }
            }
        }
        out
    }
}

/// Gram matrix `∫ m_i m_j` of the basis under the given quadrature.
pub fn monomial_gram<S: Scalar>(basis: &ScaledMonomialBasis<S>, quad: &Quadrature<S>) -> DMatrix<S> {
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for (x, &w) in quad.points.iter().zip(&quad.weights) {
        let v = basis.eval(x);
        g += &v * v.transpose() * w;
    }
    g
}

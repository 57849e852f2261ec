//! Elemental matrices of the discrete bilinear and trilinear forms.
//!
//! Row indices refer to test functions and column indices to trial
//! functions, both in cell-local DoF order.

use crate::geometry::{cell_quadrature, Geometry};
use crate::mesh::PolyMesh;
use crate::projectors::{linear_gram, stabilized, ElementOperators};
use crate::scalar::Scalar;
use crate::spaces::INTERPOLATION_DEGREE;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

#[derive(Clone, Debug)]
pub struct LocalForms<S: Scalar> {
    /// `a_h^P(u, v)`.
    pub a: DMatrix<S>,
    /// `m_h^P(u, v)`.
    pub m: DMatrix<S>,
    /// `b^P(v, q) = −|P| q div v` for `q = 1`.
    pub bdiv: DVector<S>,
    pub medge: DMatrix<S>,
    pub mface: DMatrix<S>,
    /// `[C, curl F]_{face,P}` with face tests `C` and edge trials `F`.
    pub curl: DMatrix<S>,
}

/// Block-diagonal Gram matrix of `[P1]³` in the `4 i + α` ordering.
fn vector_gram<S: Scalar>(op: &ElementOperators<S>) -> DMatrix<S> {
    let h = linear_gram(op.volume, op.diameter, &op.velocity.second_moments);
    let mut g = DMatrix::zeros(12, 12);
    for i in 0..3 {
        g.view_mut((4 * i, 4 * i), (4, 4)).copy_from(&h);
    }
    g
}

pub fn local_bilinear_forms<S: Scalar>(op: &ElementOperators<S>) -> LocalForms<S> {
    let st = &op.stabilization;
    let v = &op.velocity;
    let mut grad_gram = DMatrix::zeros(12, 12);
    let c = op.volume / (op.diameter * op.diameter);
    for i in 0..3 {
        for k in 1..4 {
            grad_gram[(4 * i + k, 4 * i + k)] = c;
        }
    }
    let a = v.pi_nabla.transpose() * grad_gram * &v.pi_nabla + stabilized(&st.velocity_dofs, &v.pi_nabla, &st.s_a);
    let m = v.pi_zero.transpose() * vector_gram(op) * &v.pi_zero + stabilized(&st.velocity_dofs, &v.pi_zero, &st.s_m);
    let bdiv = &v.divergence * (-op.volume);
    let medge = op.pi_zero_edge.transpose() * &op.pi_zero_edge * op.volume
        + stabilized(&st.edge_dofs, &op.pi_zero_edge, &st.s_edge);
    let mface = op.pi_zero_face.transpose() * &op.pi_zero_face * op.volume
        + stabilized(&st.face_dofs, &op.pi_zero_face, &st.s_face);
    let curl = &mface * &op.curl;
    LocalForms { a: symmetrize(a), m: symmetrize(m), bdiv, medge: symmetrize(medge), mface: symmetrize(mface), curl }
}

fn symmetrize<S: Scalar>(m: DMatrix<S>) -> DMatrix<S> {
    (&m + m.transpose()) * S::lit(0.5)
}

/// `c_h^P(ū; u, w) = ∫_P (Π0∇u) Π0_1 ū · Π0_1 w` as a matrix indexed `[w, u]`.
pub fn local_convection<S: Scalar>(op: &ElementOperators<S>, ubar: &DVector<S>) -> DMatrix<S> {
    let v = &op.velocity;
    let h = linear_gram(op.volume, op.diameter, &v.second_moments);
    let coeffs = &v.pi_zero * ubar;
    // z[(i, α), 3 i + j] = ∫ m_α Π0_1 ū_j
    let mut z = DMatrix::zeros(12, 9);
    for j in 0..3 {
        let cj = h * coeffs.fixed_rows::<4>(4 * j);
        for i in 0..3 {
            for a in 0..4 {
                z[(4 * i + a, 3 * i + j)] = cj[a];
            }
        }
    }
    v.pi_zero.transpose() * z * &v.grad_zero
}

/// Skew-symmetric advection `½ (c_h(ū; u, w) − c_h(ū; w, u))` indexed `[w, u]`.
pub fn local_advection<S: Scalar>(op: &ElementOperators<S>, ubar: &DVector<S>) -> DMatrix<S> {
    let c = local_convection(op, ubar);
    (&c - c.transpose()) * S::lit(0.5)
}

/// Couplings through `χ_h(v, B̄) = Π0_0 v × Π0 B̄`.
#[derive(Clone, Debug)]
pub struct LorentzBlocks<S: Scalar> {
    /// `⟨E, χ_h(v, B̄)⟩`, velocity tests × edge trials.
    pub edge_to_velocity: DMatrix<S>,
    /// `⟨χ_h(u, B̄), χ_h(v, B̄)⟩`, velocity tests × velocity trials.
    pub velocity: DMatrix<S>,
    /// `⟨χ_h(u, B̄), F⟩`, edge tests × velocity trials.
    pub velocity_to_edge: DMatrix<S>,
}

/// Map from local velocity DoFs to the constant `χ_h(v, B̄)`, `3 × n_dofs`.
pub fn chi_matrix<S: Scalar>(op: &ElementOperators<S>, bbar: &DVector<S>) -> DMatrix<S> {
    let b = &op.pi_zero_face * bbar;
    let b = Vector3::new(b[0], b[1], b[2]);
    let cross: Matrix3<S> = b.cross_matrix();
    let cross = DMatrix::from_fn(3, 3, |i, j| cross[(i, j)]);
    -cross * op.velocity_mean()
}

pub fn local_lorentz<S: Scalar>(op: &ElementOperators<S>, bbar: &DVector<S>) -> LorentzBlocks<S> {
    let chi = chi_matrix(op, bbar);
    let edge_to_velocity = chi.transpose() * &op.pi_zero_edge * op.volume;
    let velocity = chi.transpose() * &chi * op.volume;
    let velocity_to_edge = edge_to_velocity.transpose();
    LorentzBlocks { edge_to_velocity, velocity, velocity_to_edge }
}

/// `(f, Π0_1 v)` over the local velocity DoFs.
pub fn momentum_load<S, F>(mesh: &PolyMesh<S>, geom: &Geometry<S>, op: &ElementOperators<S>, f: F) -> DVector<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> Vector3<S>,
{
    let q = cell_quadrature(mesh, geom, op.cell, INTERPOLATION_DEGREE);
    let mut r = DVector::zeros(12);
    for (x, &w) in q.points.iter().zip(&q.weights) {
        let fx = f(x);
        let d = (x - op.centroid) / op.diameter;
        let m = [S::one(), d.x, d.y, d.z];
        for i in 0..3 {
            for a in 0..4 {
                r[4 * i + a] += w * fx[i] * m[a];
            }
        }
    }
    op.velocity.pi_zero.transpose() * r
}

/// `(g, Π0 F)` over the local edge DoFs.
pub fn ohm_load<S, F>(mesh: &PolyMesh<S>, geom: &Geometry<S>, op: &ElementOperators<S>, g: F) -> DVector<S>
where
    S: Scalar,
    F: Fn(&Vector3<S>) -> Vector3<S>,
{
    let q = cell_quadrature(mesh, geom, op.cell, INTERPOLATION_DEGREE);
    let total = q.integrate(|x| g(x));
    op.pi_zero_edge.transpose() * total
}

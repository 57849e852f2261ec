use super::face::FaceNodalProjector;
use crate::geometry::{cell_quadrature, face_quadrature, Geometry};
use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// Levi-Civita symbol.
pub(crate) fn levi_civita<S: Scalar>(i: usize, j: usize, k: usize) -> S {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => S::one(),
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -S::one(),
        _ => S::zero(),
    }
}

/// Projections of the local velocity space of one cell. Polynomial
/// coefficients are indexed `4 i + α` for component `i` and scaled monomial
/// `m_α ∈ {1, (x − b_P)/h_P}`.
#[derive(Clone, Debug)]
pub struct VelocityProjectors<S: Scalar> {
    pub pi_nabla: DMatrix<S>,
    pub pi_zero: DMatrix<S>,
    /// Cellwise mean of `∇w`, row `3 i + j` holding `∂_j w_i`.
    pub grad_zero: DMatrix<S>,
    /// `∫_F w` for every cell face, `3 × n_dofs` each.
    pub face_integrals: Vec<DMatrix<S>>,
    /// Cellwise divergence as a row over the local DoFs.
    pub divergence: DVector<S>,
    /// `∫_P (x − b_P)(x − b_P)ᵀ`.
    pub second_moments: Matrix3<S>,
}

/// Gram matrix of the scaled monomials `m_0, …, m_3` on the cell.
pub fn linear_gram<S: Scalar>(volume: S, h: S, second_moments: &Matrix3<S>) -> nalgebra::Matrix4<S> {
    let mut g = nalgebra::Matrix4::zeros();
    g[(0, 0)] = volume;
    for a in 0..3 {
        for b in 0..3 {
            g[(1 + a, 1 + b)] = second_moments[(a, b)] / (h * h);
        }
    }
    g
}

pub fn velocity_projectors<S: Scalar>(
    mesh: &PolyMesh<S>,
    geom: &Geometry<S>,
    cell: usize,
    faces: &[FaceNodalProjector<S>],
) -> Result<VelocityProjectors<S>> {
    let topo = mesh.cell_topology(cell);
    let cfaces = &mesh.cells()[cell].faces;
    let cg = &geom.cells[cell];
    let (vol, h, bp) = (cg.volume, cg.diameter, cg.centroid);
    let nvl = topo.vertices.len();
    let nd = 3 * nvl + cfaces.len();

    let quad = cell_quadrature(mesh, geom, cell, 2);
    let m2 = quad.integrate(|x| {
        let d = x - bp;
        d * d.transpose()
    });

    let mut face_integrals = Vec::with_capacity(cfaces.len());
    let mut divergence = DVector::zeros(nd);
    let mut surface = S::zero();
    for (lf, sf) in cfaces.iter().enumerate() {
        let fg = &geom.faces[sf.index];
        let n = fg.normal();
        let tang = Matrix3::identity() - n * n.transpose();
        let mean = faces[sf.index].mean_row();
        let mut fi = DMatrix::zeros(3, nd);
        for (j, &lv) in topo.face_vertices[lf].iter().enumerate() {
            for i in 0..3 {
                for r in 0..3 {
                    fi[(r, 3 * lv + i)] += tang[(r, i)] * mean[j];
                }
            }
        }
        for r in 0..3 {
            fi[(r, 3 * nvl + lf)] = n[r] * fg.area;
        }
        divergence[3 * nvl + lf] = sf.sign_as::<S>() * fg.area / vol;
        surface += fg.area;
        face_integrals.push(fi);
    }

    let mut grad_zero = DMatrix::zeros(9, nd);
    for (lf, sf) in cfaces.iter().enumerate() {
        let n = geom.faces[sf.index].normal() * sf.sign_as::<S>();
        for i in 0..3 {
            for j in 0..3 {
                let mut row = grad_zero.row_mut(3 * i + j);
                row += face_integrals[lf].row(i) * (n[j] / vol);
            }
        }
    }

    // boundary integrals of the linear monomials
    let mut mono = Vector3::zeros();
    for sf in cfaces {
        let fg = &geom.faces[sf.index];
        mono += (fg.centroid - bp) * (fg.area / h);
    }
    let mut pi_nabla = DMatrix::zeros(12, nd);
    for i in 0..3 {
        for k in 0..3 {
            let row = grad_zero.row(3 * i + k) * h;
            pi_nabla.row_mut(4 * i + 1 + k).copy_from(&row);
        }
        let mut row0 = DMatrix::zeros(1, nd);
        for fi in &face_integrals {
            row0 += fi.row(i);
        }
        for k in 0..3 {
            row0 -= pi_nabla.row(4 * i + 1 + k) * mono[k];
        }
        pi_nabla.row_mut(4 * i).copy_from(&(row0 / surface));
    }

    // moments ∫_P w·(e_i m_α)
    let mut rhs = DMatrix::zeros(12, nd);
    // by-parts potential s of each test field and the rotational part c
    let potential = |i: usize, a: usize, d: &Vector3<S>| -> S {
        if a == 0 {
            d[i]
        } else {
            d[i] * d[a - 1] / (S::lit(2.0) * h)
        }
    };
    for i in 0..3 {
        for a in 1..4 {
            let k = a - 1;
            let row = 4 * i + a;
            let s_mean = m2[(i, k)] / (S::lit(2.0) * h);
            let mut r = rhs.row_mut(row);
            r -= divergence.transpose() * s_mean;
            // c_n = ε_{i k n} / (2h)
            for n in 0..3 {
                let cn = levi_civita::<S>(i, k, n) / (S::lit(2.0) * h);
                if cn == S::zero() {
                    continue;
                }
                // ∫ Π∇w · (x_P × c) = Σ_{a',b} (coef_{a' b}/h) ε_{a' m n} c_n M2_{m b}
                for ap in 0..3 {
                    for b in 0..3 {
                        let mut w = S::zero();
                        for m in 0..3 {
                            w += levi_civita::<S>(ap, m, n) * m2[(m, b)];
                        }
                        if w != S::zero() {
                            let mut r = rhs.row_mut(row);
                            r += pi_nabla.row(4 * ap + 1 + b) * (cn * w / h);
                        }
                    }
                }
            }
        }
    }
    for (lf, sf) in cfaces.iter().enumerate() {
        let fg = &geom.faces[sf.index];
        let fp = &faces[sf.index];
        let n = fg.normal();
        let sigma = sf.sign_as::<S>();
        let fq = face_quadrature(fg, 3);
        let k = topo.face_vertices[lf].len();
        // t[(test, j)] = ∫_F (s − s(b_F)) Π∇,F(φ_j), with φ_j the vertex basis
        let mut t = DMatrix::<S>::zeros(12, k);
        let db = fg.centroid - bp;
        for (x, &w) in fq.points.iter().zip(&fq.weights) {
            let phi = fp.coeffs.transpose() * fp.basis(x);
            let d = x - bp;
            for i in 0..3 {
                for a in 0..4 {
                    let ds = potential(i, a, &d) - potential(i, a, &db);
                    let mut r = t.row_mut(4 * i + a);
                    r += phi.transpose() * (w * ds);
                }
            }
        }
        for i in 0..3 {
            for a in 0..4 {
                let row = 4 * i + a;
                rhs[(row, 3 * nvl + lf)] += sigma * potential(i, a, &db) * fg.area;
                for (j, &lv) in topo.face_vertices[lf].iter().enumerate() {
                    for c in 0..3 {
                        rhs[(row, 3 * lv + c)] += sigma * t[(row, j)] * n[c];
                    }
                }
            }
        }
    }

    let gram = linear_gram(vol, h, &m2);
    let lu = gram.lu();
    let mut pi_zero = DMatrix::zeros(12, nd);
    for i in 0..3 {
        let block = rhs.rows(4 * i, 4).into_owned();
        let sol = lu.solve(&block).ok_or_else(|| Error::SingularLocal { entity: format!("cell {cell}") })?;
        pi_zero.rows_mut(4 * i, 4).copy_from(&sol);
    }

    Ok(VelocityProjectors { pi_nabla, pi_zero, grad_zero, face_integrals, divergence, second_moments: m2 })
}

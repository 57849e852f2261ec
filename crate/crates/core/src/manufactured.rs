//! Manufactured solution on the unit cube with closed-form sources, error
//! quantities, and the space-time convergence driver.

use crate::geometry::cell_quadrature;
use crate::mesh::PolyMesh;
use crate::mhd::{run_transient, Discretization, LinearSolver, MhdParams, MhdState, PicardConfig, Problem, TimeGrid};
use crate::scalar::Scalar;
use crate::spaces::{gather, INTERPOLATION_DEGREE};
use crate::Result;
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

/// Exact fields and sources for given physical parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactSolution<S: Scalar> {
    pub params: MhdParams<S>,
}

struct Trig<S> {
    sx: S,
    sy: S,
    sz: S,
    cx: S,
    cy: S,
    cz: S,
}

impl<S: Scalar> Trig<S> {
    fn at(x: &Vector3<S>) -> Self {
        let pi = S::pi();
        let (a, b, c) = (pi * x.x, pi * x.y, pi * x.z);
        Self { sx: a.sin(), sy: b.sin(), sz: c.sin(), cx: a.cos(), cy: b.cos(), cz: c.cos() }
    }
}

impl<S: Scalar> ExactSolution<S> {
    pub fn new(params: MhdParams<S>) -> Self {
        Self { params }
    }

    fn shape(x: &Vector3<S>) -> Vector3<S> {
        let k = Trig::at(x);
        Vector3::new(k.sx * k.cy * k.cz, k.cx * k.sy * k.cz, -S::lit(2.0) * k.cx * k.cy * k.sz)
    }

    pub fn velocity(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        Self::shape(x) * t.cos()
    }

    /// `∇u` with entry `(i, j) = ∂_j u_i`.
    pub fn velocity_gradient(&self, x: &Vector3<S>, t: S) -> Matrix3<S> {
        let k = Trig::at(x);
        let two = S::lit(2.0);
        let m = Matrix3::new(
            k.cx * k.cy * k.cz,
            -k.sx * k.sy * k.cz,
            -k.sx * k.cy * k.sz,
            -k.sx * k.sy * k.cz,
            k.cx * k.cy * k.cz,
            -k.cx * k.sy * k.sz,
            two * k.sx * k.cy * k.sz,
            two * k.cx * k.sy * k.sz,
            -two * k.cx * k.cy * k.cz,
        );
        m * (S::pi() * t.cos())
    }

    pub fn velocity_laplacian(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        self.velocity(x, t) * (-S::lit(3.0) * S::pi() * S::pi())
    }

    pub fn pressure(&self, x: &Vector3<S>, t: S) -> S {
        (x.x * x.x + x.y * x.z + x.z - S::lit(13.0 / 12.0)) * t.cos()
    }

    pub fn pressure_gradient(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        Vector3::new(S::lit(2.0) * x.x, x.z, x.y + S::one()) * t.cos()
    }

    pub fn electric(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        let (c6, c12, c24) = (S::lit(6.0), S::lit(12.0), S::lit(24.0));
        Vector3::new(c6 * x.y, c12 * x.z * x.z - c24 * t, c12 * x.y * x.y - c24 * t + c6 * x.x)
    }

    pub fn magnetic(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        let (c3, c4, c6, c24) = (S::lit(3.0), S::lit(4.0), S::lit(6.0), S::lit(24.0));
        Vector3::new(
            c4 * x.y.powi(3) - c4 * x.z.powi(3) - t * (c24 * x.y - c24 * x.z),
            -c3 * x.x * x.x + c6 * t,
            -c3 * x.y * x.y + c6 * t,
        )
    }

    pub fn magnetic_curl(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        let (c6, c12, c24) = (S::lit(6.0), S::lit(12.0), S::lit(24.0));
        Vector3::new(-c6 * x.y, -c12 * x.z * x.z + c24 * t, -c6 * x.x - c12 * x.y * x.y + c24 * t)
    }

    /// `j = E + u × B`.
    pub fn current(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        self.electric(x, t) + self.velocity(x, t).cross(&self.magnetic(x, t))
    }

    /// `f = u_t + (∇u) u − Re⁻¹ Δu − s j × B + ∇p`.
    pub fn momentum_source(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        let u = self.velocity(x, t);
        let ut = Self::shape(x) * (-t.sin());
        let p = &self.params;
        ut + self.velocity_gradient(x, t) * u
            - self.velocity_laplacian(x, t) / p.re
            - self.current(x, t).cross(&self.magnetic(x, t)) * p.hartmann
            + self.pressure_gradient(x, t)
    }

    /// `g = j − Re_m⁻¹ curl B`.
    pub fn ohm_source(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        self.current(x, t) - self.magnetic_curl(x, t) / self.params.rem
    }
}

impl<S: Scalar> Problem<S> for ExactSolution<S> {
    fn velocity(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        ExactSolution::velocity(self, x, t)
    }
    fn electric(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        ExactSolution::electric(self, x, t)
    }
    fn magnetic(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        ExactSolution::magnetic(self, x, t)
    }
    fn pressure(&self, x: &Vector3<S>, t: S) -> S {
        ExactSolution::pressure(self, x, t)
    }
    fn momentum_source(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        ExactSolution::momentum_source(self, x, t)
    }
    fn ohm_source(&self, x: &Vector3<S>, t: S) -> Vector3<S> {
        ExactSolution::ohm_source(self, x, t)
    }
}

/// Relative L2 errors of `Π0_1 u_h`, `Π0 E_h`, `Π0 B_h` and `p_h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms<S: Scalar> {
    pub u: S,
    pub e: S,
    pub b: S,
    pub p: S,
}

pub fn error_norms<S: Scalar>(
    disc: &Discretization<S>,
    exact: &ExactSolution<S>,
    state: &MhdState<S>,
) -> ErrorNorms<S> {
    let t = state.t;
    // per cell: squared errors and squared exact norms of the four fields
    let parts: Vec<[S; 8]> = disc
        .operators
        .par_iter()
        .map(|op| {
            let q = cell_quadrature(&disc.mesh, &disc.geometry, op.cell, INTERPOLATION_DEGREE);
            let uc = &op.velocity.pi_zero * gather(&state.u.values, &op.velocity_dofs);
            let ec = &op.pi_zero_edge * gather(&state.e.values, &op.edge_dofs);
            let bc = &op.pi_zero_face * gather(&state.b.values, &op.face_dofs);
            let ec = Vector3::new(ec[0], ec[1], ec[2]);
            let bc = Vector3::new(bc[0], bc[1], bc[2]);
            let ph = state.p.values[op.cell];
            let mut acc = [S::zero(); 8];
            for (x, &w) in q.points.iter().zip(&q.weights) {
                let d = (x - op.centroid) / op.diameter;
                let m = [S::one(), d.x, d.y, d.z];
                let uh = Vector3::from_fn(|i, _| (0..4).fold(S::zero(), |a, k| a + uc[4 * i + k] * m[k]));
                let (u, e, b, p) =
                    (exact.velocity(x, t), exact.electric(x, t), exact.magnetic(x, t), exact.pressure(x, t));
                acc[0] += w * (u - uh).norm_squared();
                acc[1] += w * u.norm_squared();
                acc[2] += w * (e - ec).norm_squared();
                acc[3] += w * e.norm_squared();
                acc[4] += w * (b - bc).norm_squared();
                acc[5] += w * b.norm_squared();
                acc[6] += w * (p - ph) * (p - ph);
                acc[7] += w * p * p;
            }
            acc
        })
        .collect();
    let mut s = [S::zero(); 8];
    for a in parts {
        for k in 0..8 {
            s[k] += a[k];
        }
    }
    let rel = |num: S, den: S| if den > S::zero() { (num / den).sqrt() } else { num.sqrt() };
    ErrorNorms { u: rel(s[0], s[1]), e: rel(s[2], s[3]), b: rel(s[4], s[5]), p: rel(s[6], s[7]) }
}

/// One refinement level of a convergence study.
#[derive(Clone, Debug)]
pub struct LevelSpec<S: Scalar> {
    pub label: String,
    pub mesh: PolyMesh<S>,
    pub dt: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow<S: Scalar> {
    pub level: usize,
    pub label: String,
    pub h: S,
    pub dt: S,
    pub errors: ErrorNorms<S>,
    /// Largest divergence norms over all steps of the level.
    pub div_u: S,
    pub div_b: S,
    pub max_picard: usize,
}

/// Runs the manufactured problem on every level from `t = 0` to `t_final`.
pub fn convergence_study<S: Scalar>(
    levels: Vec<LevelSpec<S>>,
    exact: &ExactSolution<S>,
    picard: &PicardConfig<S>,
    t_final: S,
    solver: &dyn LinearSolver<S>,
) -> Result<Vec<ConvergenceRow<S>>> {
    let mut rows = Vec::with_capacity(levels.len());
    for (k, level) in levels.into_iter().enumerate() {
        let h = level.mesh.mesh_size();
        let disc = Discretization::new(level.mesh)?;
        let grid = TimeGrid { t0: S::zero(), t_final, dt: level.dt };
        let initial = MhdState::interpolate(&disc, exact, S::zero());
        let (state, reports) = run_transient(&disc, &exact.params, picard, exact, &grid, initial, solver, |_, _| {})?;
        let errors = error_norms(&disc, exact, &state);
        let div_u = reports.iter().fold(S::zero(), |a, r| a.max(r.div_u));
        let div_b = reports.iter().fold(S::zero(), |a, r| a.max(r.div_b));
        let max_picard = reports.iter().map(|r| r.picard_iterations).max().unwrap_or(0);
        log::info!(
            "level {} ({}): errors u {:.3e} E {:.3e} B {:.3e} p {:.3e}",
            k + 1,
            level.label,
            errors.u.as_f64(),
            errors.e.as_f64(),
            errors.b.as_f64(),
            errors.p.as_f64()
        );
        rows.push(ConvergenceRow {
            level: k + 1,
            label: level.label,
            h,
            dt: level.dt,
            errors,
            div_u,
            div_b,
            max_picard,
        });
    }
    Ok(rows)
}

/// `log2(err_l / err_{l+1})` between consecutive rows, per field `(u, E, B, p)`.
pub fn convergence_rates<S: Scalar>(rows: &[ConvergenceRow<S>]) -> Vec<[f64; 4]> {
    rows.windows(2)
        .map(|w| {
            let (a, b) = (&w[0].errors, &w[1].errors);
            let r = |x: S, y: S| (x.as_f64() / y.as_f64()).log2();
            [r(a.u, b.u), r(a.e, b.e), r(a.b, b.b), r(a.p, b.p)]
        })
        .collect()
}

//! Global assembly, implicit Euler time stepping with Picard linearization,
//! and per-step diagnostics.
//!
//! The unknowns of a step are ordered `[u | p | E | B | λ]`, where `λ` is the
//! multiplier of the zero-mean pressure constraint `Σ_P |P| p_P = 0`.
//! Velocity, edge and face DoFs on the boundary are prescribed and eliminated.

mod assembly;
mod solver;

pub use assembly::{assemble_step, boundary_lift, Offsets, SparseSystem, StepInputs};
pub use solver::{CooMatrix, LinearSolver, SparseLu};

use crate::forms::{local_bilinear_forms, LocalForms};
use crate::geometry::{entity_measures, Geometry};
use crate::mesh::{classify_boundary, BoundaryTags, PolyMesh};
use crate::projectors::{element_operators, ElementOperators};
use crate::scalar::Scalar;
use crate::spaces::{
    build_dof_layouts, divergence_from_dofs, gather, interpolate_edge, interpolate_face, interpolate_pressure,
    interpolate_velocity, piecewise_l2_norm, DofLayouts, FieldCoefficients, Space,
};
use crate::{Error, Result};
use nalgebra::{DVector, Vector3};
use rayon::prelude::*;

/// Mesh together with every quantity that does not change in time.
#[derive(Clone, Debug)]
pub struct Discretization<S: Scalar> {
    pub mesh: PolyMesh<S>,
    pub geometry: Geometry<S>,
    pub tags: BoundaryTags,
    pub layouts: DofLayouts,
    pub operators: Vec<ElementOperators<S>>,
    pub forms: Vec<LocalForms<S>>,
}

impl<S: Scalar> Discretization<S> {
    pub fn new(mesh: PolyMesh<S>) -> Result<Self> {
        let geometry = entity_measures(&mesh)?;
        let tags = classify_boundary(&mesh);
        let layouts = build_dof_layouts(&mesh, &tags);
        let operators = element_operators(&mesh, &geometry)?;
        let forms = operators.par_iter().map(local_bilinear_forms).collect();
        Ok(Self { mesh, geometry, tags, layouts, operators, forms })
    }

    /// `Σ_P v_Pᵀ M_P v_P` for the velocity mass form.
    pub fn velocity_energy(&self, u: &DVector<S>) -> S {
        self.operators.iter().zip(&self.forms).fold(S::zero(), |acc, (op, f)| {
            let v = gather(u, &op.velocity_dofs);
            acc + v.dot(&(&f.m * &v))
        })
    }

    /// `Σ_P B_Pᵀ M_P B_P` for the face inner product.
    pub fn face_energy(&self, b: &DVector<S>) -> S {
        self.operators.iter().zip(&self.forms).fold(S::zero(), |acc, (op, f)| {
            let v = gather(b, &op.face_dofs);
            acc + v.dot(&(&f.mface * &v))
        })
    }

    /// `Σ_P E_Pᵀ M_P E_P` for the edge inner product.
    pub fn edge_energy(&self, e: &DVector<S>) -> S {
        self.operators.iter().zip(&self.forms).fold(S::zero(), |acc, (op, f)| {
            let v = gather(e, &op.edge_dofs);
            acc + v.dot(&(&f.medge * &v))
        })
    }
}

/// Physical parameters of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MhdParams<S: Scalar> {
    pub re: S,
    pub rem: S,
    /// Coupling coefficient `s` of the Lorentz force.
    pub hartmann: S,
    /// When false the convection and `χ_h` couplings are dropped, leaving a
    /// Stokes problem and a decoupled magnetic problem.
    pub nonlinear: bool,
}

impl<S: Scalar> Default for MhdParams<S> {
    fn default() -> Self {
        Self { re: S::one(), rem: S::one(), hartmann: S::one(), nonlinear: true }
    }
}

impl<S: Scalar> MhdParams<S> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("re", self.re), ("rem", self.rem), ("hartmann", self.hartmann)] {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardConfig<S: Scalar> {
    pub tol: S,
    pub max_iterations: usize,
}

impl<S: Scalar> Default for PicardConfig<S> {
    fn default() -> Self {
        Self { tol: S::lit(1e-8), max_iterations: 20 }
    }
}

/// Boundary data, sources and (optionally) initial data of a problem.
pub trait Problem<S: Scalar>: Sync {
    fn velocity(&self, x: &Vector3<S>, t: S) -> Vector3<S>;
    fn electric(&self, x: &Vector3<S>, t: S) -> Vector3<S>;
    fn magnetic(&self, x: &Vector3<S>, t: S) -> Vector3<S>;

    fn pressure(&self, _x: &Vector3<S>, _t: S) -> S {
        S::zero()
    }

    fn momentum_source(&self, _x: &Vector3<S>, _t: S) -> Vector3<S> {
        Vector3::zeros()
    }

    fn ohm_source(&self, _x: &Vector3<S>, _t: S) -> Vector3<S> {
        Vector3::zeros()
    }

    /// False skips source quadrature entirely.
    fn has_sources(&self) -> bool {
        true
    }

    /// True when every boundary trace vanishes.
    fn homogeneous_boundary(&self) -> bool {
        false
    }
}

/// Zero sources and homogeneous boundary conditions.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unforced;

impl<S: Scalar> Problem<S> for Unforced {
    fn velocity(&self, _: &Vector3<S>, _: S) -> Vector3<S> {
        Vector3::zeros()
    }
    fn electric(&self, _: &Vector3<S>, _: S) -> Vector3<S> {
        Vector3::zeros()
    }
    fn magnetic(&self, _: &Vector3<S>, _: S) -> Vector3<S> {
        Vector3::zeros()
    }
    fn has_sources(&self) -> bool {
        false
    }
    fn homogeneous_boundary(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MhdState<S: Scalar> {
    pub t: S,
    pub u: FieldCoefficients<S>,
    pub p: FieldCoefficients<S>,
    pub e: FieldCoefficients<S>,
    pub b: FieldCoefficients<S>,
}

impl<S: Scalar> MhdState<S> {
    pub fn zeros(layouts: &DofLayouts, t: S) -> Self {
        Self {
            t,
            u: FieldCoefficients::zeros(layouts, Space::Velocity),
            p: FieldCoefficients::zeros(layouts, Space::Pressure),
            e: FieldCoefficients::zeros(layouts, Space::Edge),
            b: FieldCoefficients::zeros(layouts, Space::Face),
        }
    }

    /// DoF interpolant of the problem fields at time `t`.
    pub fn interpolate<P: Problem<S> + ?Sized>(disc: &Discretization<S>, problem: &P, t: S) -> Self {
        let (m, g) = (&disc.mesh, &disc.geometry);
        Self {
            t,
            u: interpolate_velocity(m, g, |x| problem.velocity(x, t)),
            p: interpolate_pressure(m, g, |x| problem.pressure(x, t)),
            e: interpolate_edge(m, g, |x| problem.electric(x, t)),
            b: interpolate_face(g, |x| problem.magnetic(x, t)),
        }
    }

    fn from_solution(full: &DVector<S>, off: &Offsets, t: S) -> Self {
        let part = |a: usize, b: usize| full.rows(a, b - a).into_owned();
        Self {
            t,
            u: FieldCoefficients::new(Space::Velocity, part(off.u, off.p)),
            p: FieldCoefficients::new(Space::Pressure, part(off.p, off.e)),
            e: FieldCoefficients::new(Space::Edge, part(off.e, off.b)),
            b: FieldCoefficients::new(Space::Face, part(off.b, off.lambda)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<S: Scalar> {
    pub step: usize,
    pub t: S,
    pub picard_iterations: usize,
    pub final_increment: S,
    pub increments: Vec<S>,
    pub div_u: S,
    pub div_b: S,
    pub energy: S,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<S: Scalar> {
    pub div_u: S,
    pub div_b: S,
    pub energy: S,
}

/// Divergence norms and the discrete energy `m_h(u,u) + s Re_m⁻¹ [B,B]_face`.
pub fn diagnostics<S: Scalar>(
    disc: &Discretization<S>,
    params: &MhdParams<S>,
    state: &MhdState<S>,
) -> Result<Diagnostics<S>> {
    let (m, g) = (&disc.mesh, &disc.geometry);
    let du = divergence_from_dofs(m, g, &state.u)?;
    let db = divergence_from_dofs(m, g, &state.b)?;
    Ok(Diagnostics {
        div_u: piecewise_l2_norm(g, &du),
        div_b: piecewise_l2_norm(g, &db),
        energy: disc.velocity_energy(&state.u.values)
            + params.hartmann / params.rem * disc.face_energy(&state.b.values),
    })
}

fn relative_increment<S: Scalar>(
    disc: &Discretization<S>,
    new: &MhdState<S>,
    old_u: &DVector<S>,
    old_b: &DVector<S>,
) -> S {
    let du = &new.u.values - old_u;
    let db = &new.b.values - old_b;
    let num = (disc.velocity_energy(&du) + disc.face_energy(&db)).max(S::zero()).sqrt();
    let den = (disc.velocity_energy(&new.u.values) + disc.face_energy(&new.b.values)).max(S::zero()).sqrt();
    if den > S::zero() {
        num / den
    } else {
        num
    }
}

/// One implicit Euler step from `previous` to `previous.t + dt` with Picard
/// iteration on the lagged velocity and magnetic field.
#[allow(clippy::too_many_arguments)]
pub fn solve_time_step<S: Scalar, P: Problem<S> + ?Sized>(
    disc: &Discretization<S>,
    params: &MhdParams<S>,
    picard: &PicardConfig<S>,
    problem: &P,
    previous: &MhdState<S>,
    dt: S,
    step: usize,
    solver: &dyn LinearSolver<S>,
) -> Result<(MhdState<S>, StepReport<S>)> {
    let time = previous.t + dt;
    let mut lag_u = previous.u.values.clone();
    let mut lag_b = previous.b.values.clone();
    let mut history = Vec::new();
    let max = picard.max_iterations.max(1);
    for k in 1..=max {
        let inputs = StepInputs { previous, lag_u: &lag_u, lag_b: &lag_b, dt, time };
        let system = assemble_step(disc, params, problem, &inputs)?;
        let x = solver.solve(&system.matrix, &system.rhs).map_err(|message| Error::Solver { step, message })?;
        let state = MhdState::from_solution(&system.expand(&x), &system.offsets, time);
        let inc = relative_increment(disc, &state, &lag_u, &lag_b);
        history.push(inc);
        log::debug!("step {step} Picard iteration {k}: increment {inc:e}");
        if !params.nonlinear || inc <= picard.tol {
            let d = diagnostics(disc, params, &state)?;
            let report = StepReport {
                step,
                t: time,
                picard_iterations: k,
                final_increment: inc,
                increments: history,
                div_u: d.div_u,
                div_b: d.div_b,
                energy: d.energy,
            };
            return Ok((state, report));
        }
        lag_u = state.u.values;
        lag_b = state.b.values;
    }
    Err(Error::NonConvergence {
        step,
        time: time.as_f64(),
        iterations: max,
        history: history.iter().map(|v| v.as_f64()).collect(),
    })
}

/// Time interval and step of a transient run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<S: Scalar> {
    pub t0: S,
    pub t_final: S,
    pub dt: S,
}

impl<S: Scalar> TimeGrid<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > S::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > self.t0) {
            return Err(Error::InvalidArgument(format!("T must exceed the start time, got {}", self.t_final)));
        }
        if self.dt > self.t_final - self.t0 {
            return Err(Error::InvalidArgument(format!("dt = {} exceeds the interval length", self.dt)));
        }
        Ok(())
    }

    /// Number of steps; the last step is shortened to land on `t_final`.
    pub fn num_steps(&self) -> usize {
        let r = ((self.t_final - self.t0) / self.dt).as_f64();
        (r - 1e-9).ceil().max(1.0) as usize
    }

    pub fn time(&self, step: usize) -> S {
        if step >= self.num_steps() {
            self.t_final
        } else {
            self.t0 + self.dt * S::from_count(step)
        }
    }
}

/// Runs implicit Euler from `initial` until `grid.t_final`, calling
/// `observer` after every accepted step.
#[allow(clippy::too_many_arguments)]
pub fn run_transient<S, P, F>(
    disc: &Discretization<S>,
    params: &MhdParams<S>,
    picard: &PicardConfig<S>,
    problem: &P,
    grid: &TimeGrid<S>,
    initial: MhdState<S>,
    solver: &dyn LinearSolver<S>,
    mut observer: F,
) -> Result<(MhdState<S>, Vec<StepReport<S>>)>
where
    S: Scalar,
    P: Problem<S> + ?Sized,
    F: FnMut(&StepReport<S>, &MhdState<S>),
{
    params.validate()?;
    grid.validate()?;
    let mut state = initial;
    let mut reports = Vec::with_capacity(grid.num_steps());
    for step in 1..=grid.num_steps() {
        let dt = grid.time(step) - state.t;
        let t = state.t;
        let (next, report) = solve_time_step(disc, params, picard, problem, &state, dt, step, solver)
            .map_err(|e| Error::Step { step, time: (t + dt).as_f64(), source: Box::new(e) })?;
        log::info!(
            "step {step} t = {:.6}: {} Picard iterations, div u = {:.3e}, div B = {:.3e}",
            report.t.as_f64(),
            report.picard_iterations,
            report.div_u.as_f64(),
            report.div_b.as_f64()
        );
        observer(&report, &next);
        reports.push(report);
        state = next;
    }
    Ok((state, reports))
}

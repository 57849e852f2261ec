use super::solver::CooMatrix;
use super::{Discretization, MhdParams, MhdState, Problem};
use crate::forms::{local_advection, local_lorentz, momentum_load, ohm_load};
use crate::scalar::Scalar;
use crate::spaces::{gather, interpolate_edge, interpolate_face, interpolate_velocity};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Offsets of the unknown blocks `[u | p | E | B | λ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Offsets {
    pub u: usize,
    pub p: usize,
    pub e: usize,
    pub b: usize,
    pub lambda: usize,
    pub total: usize,
}

impl Offsets {
    pub fn new<S: Scalar>(disc: &Discretization<S>) -> Self {
        let l = &disc.layouts;
        let p = l.velocity.len();
        let e = p + l.pressure.len();
        let b = e + l.edge.len();
        let lambda = b + l.face.len();
        Self { u: 0, p, e, b, lambda, total: lambda + 1 }
    }
}

/// Linearized step system after elimination of the Dirichlet DoFs.
#[derive(Clone, Debug)]
pub struct SparseSystem<S: Scalar> {
    pub matrix: CooMatrix<S>,
    pub rhs: Vec<S>,
    pub offsets: Offsets,
    /// Full index of each reduced unknown.
    pub unknowns: Vec<usize>,
    /// Prescribed values on Dirichlet DoFs (zero elsewhere), full length.
    pub lift: DVector<S>,
}

impl<S: Scalar> SparseSystem<S> {
    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    /// Full solution vector from the reduced one.
    pub fn expand(&self, x: &[S]) -> DVector<S> {
        let mut full = self.lift.clone();
        for (k, &i) in self.unknowns.iter().enumerate() {
            full[i] = x[k];
        }
        full
    }
}

/// Inputs of one linearized solve.
pub struct StepInputs<'a, S: Scalar> {
    pub previous: &'a MhdState<S>,
    pub lag_u: &'a DVector<S>,
    pub lag_b: &'a DVector<S>,
    pub dt: S,
    /// Time level of the unknowns.
    pub time: S,
}

type Contribution<S> = (Vec<(usize, usize, S)>, Vec<(usize, S)>);

fn push_block<S: Scalar>(
    out: &mut Vec<(usize, usize, S)>,
    rows: &[usize],
    cols: &[usize],
    ro: usize,
    co: usize,
    m: &DMatrix<S>,
) {
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            let v = m[(a, b)];
            if v != S::zero() {
                out.push((ro + r, co + c, v));
            }
        }
    }
}

fn cell_contribution<S: Scalar, P: Problem<S> + ?Sized>(
    disc: &Discretization<S>,
    params: &MhdParams<S>,
    problem: &P,
    inputs: &StepInputs<'_, S>,
    off: &Offsets,
    c: usize,
) -> Contribution<S> {
    let op = &disc.operators[c];
    let lf = &disc.forms[c];
    let (vd, ed, fd) = (&op.velocity_dofs, &op.edge_dofs, &op.face_dofs);
    let inv_dt = S::one() / inputs.dt;
    let s = params.hartmann;
    let mut t = Vec::new();
    let mut r = Vec::new();

    let mut momentum = &lf.m * inv_dt + &lf.a / params.re;
    let mut ohm_velocity = DMatrix::zeros(ed.len(), vd.len());
    let mut momentum_edge = DMatrix::zeros(vd.len(), ed.len());
    if params.nonlinear {
        let ubar = gather(inputs.lag_u, vd);
        momentum += local_advection(op, &ubar);
        let bbar = gather(inputs.lag_b, fd);
        let lor = local_lorentz(op, &bbar);
        momentum += lor.velocity * s;
        momentum_edge = lor.edge_to_velocity * s;
        ohm_velocity = lor.velocity_to_edge;
    }
    push_block(&mut t, vd, vd, off.u, off.u, &momentum);
    push_block(&mut t, vd, ed, off.u, off.e, &momentum_edge);
    for (a, &v) in vd.iter().enumerate() {
        if lf.bdiv[a] != S::zero() {
            t.push((off.u + v, off.p + c, lf.bdiv[a]));
            t.push((off.p + c, off.u + v, lf.bdiv[a]));
        }
    }
    t.push((off.p + c, off.lambda, op.volume));
    t.push((off.lambda, off.p + c, op.volume));

    push_block(&mut t, ed, vd, off.e, off.u, &ohm_velocity);
    push_block(&mut t, ed, ed, off.e, off.e, &lf.medge);
    push_block(&mut t, ed, fd, off.e, off.b, &(lf.curl.transpose() * (-S::one() / params.rem)));

    push_block(&mut t, fd, fd, off.b, off.b, &(&lf.mface * inv_dt));
    push_block(&mut t, fd, ed, off.b, off.e, &lf.curl);

    let un = gather(&inputs.previous.u.values, vd);
    let mut rhs_u = &lf.m * un * inv_dt;
    if problem.has_sources() {
        let time = inputs.time;
        rhs_u += momentum_load(&disc.mesh, &disc.geometry, op, |x| problem.momentum_source(x, time));
        let rhs_e = ohm_load(&disc.mesh, &disc.geometry, op, |x| problem.ohm_source(x, time));
        r.extend(ed.iter().zip(rhs_e.iter()).map(|(&i, &v)| (off.e + i, v)));
    }
    r.extend(vd.iter().zip(rhs_u.iter()).map(|(&i, &v)| (off.u + i, v)));
    let bn = gather(&inputs.previous.b.values, fd);
    let rhs_b = &lf.mface * bn * inv_dt;
    r.extend(fd.iter().zip(rhs_b.iter()).map(|(&i, &v)| (off.b + i, v)));
    (t, r)
}

/// Dirichlet values of the three constrained fields at `time`.
pub fn boundary_lift<S: Scalar, P: Problem<S> + ?Sized>(disc: &Discretization<S>, problem: &P, time: S) -> DVector<S> {
    let off = Offsets::new(disc);
    let (m, g) = (&disc.mesh, &disc.geometry);
    let mut lift = DVector::zeros(off.total);
    if problem.homogeneous_boundary() {
        return lift;
    }
    let u = interpolate_velocity(m, g, |x| problem.velocity(x, time));
    let e = interpolate_edge(m, g, |x| problem.electric(x, time));
    let b = interpolate_face(g, |x| problem.magnetic(x, time));
    let l = &disc.layouts;
    for (i, &bd) in l.velocity.boundary.iter().enumerate() {
        if bd {
            lift[off.u + i] = u.values[i];
        }
    }
    for (i, &bd) in l.edge.boundary.iter().enumerate() {
        if bd {
            lift[off.e + i] = e.values[i];
        }
    }
    for (i, &bd) in l.face.boundary.iter().enumerate() {
        if bd {
            lift[off.b + i] = b.values[i];
        }
    }
    lift
}

/// Assembles the linearized system of one implicit Euler step.
pub fn assemble_step<S: Scalar, P: Problem<S> + ?Sized>(
    disc: &Discretization<S>,
    params: &MhdParams<S>,
    problem: &P,
    inputs: &StepInputs<'_, S>,
) -> Result<SparseSystem<S>> {
    if !(inputs.dt > S::zero()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {}", inputs.dt)));
    }
    let l = &disc.layouts;
    let prev = inputs.previous;
    if prev.u.len() != l.velocity.len()
        || prev.b.len() != l.face.len()
        || inputs.lag_u.len() != l.velocity.len()
        || inputs.lag_b.len() != l.face.len()
    {
        return Err(Error::InvalidArgument("state lengths do not match the DoF layouts".into()));
    }
    let off = Offsets::new(disc);
    let parts: Vec<Contribution<S>> = (0..disc.mesh.num_cells())
        .into_par_iter()
        .map(|c| cell_contribution(disc, params, problem, inputs, &off, c))
        .collect();

    let lift = boundary_lift(disc, problem, inputs.time);
    let mut fixed = vec![false; off.total];
    for (i, &b) in l.velocity.boundary.iter().enumerate() {
        fixed[off.u + i] = b;
    }
    for (i, &b) in l.edge.boundary.iter().enumerate() {
        fixed[off.e + i] = b;
    }
    for (i, &b) in l.face.boundary.iter().enumerate() {
        fixed[off.b + i] = b;
    }
    let mut reduced = vec![usize::MAX; off.total];
    let mut unknowns = Vec::new();
    for i in 0..off.total {
        if !fixed[i] {
            reduced[i] = unknowns.len();
            unknowns.push(i);
        }
    }

    let n = unknowns.len();
    let mut rhs = vec![S::zero(); n];
    let mut triplets = Vec::new();
    for (t, r) in parts {
        for (i, v) in r {
            if !fixed[i] {
                rhs[reduced[i]] += v;
            }
        }
        for (i, j, v) in t {
            if fixed[i] {
                continue;
            }
            if fixed[j] {
                rhs[reduced[i]] -= v * lift[j];
            } else {
                triplets.push((reduced[i], reduced[j], v));
            }
        }
    }
    Ok(SparseSystem { matrix: CooMatrix::from_triplets(n, triplets), rhs, offsets: off, unknowns, lift })
}

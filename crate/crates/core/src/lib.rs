//! Lowest-order virtual element discretization of incompressible resistive
//! MHD on general polyhedral meshes.
//!
//! The unknowns are a nodal-plus-face velocity, a cellwise constant pressure,
//! an edge electric field and a face magnetic field. Velocity and magnetic
//! field are divergence free cell by cell at every accepted time step.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forms;
pub mod geometry;
pub mod manufactured;
pub mod mesh;
pub mod mhd;
pub mod projectors;
pub mod scalar;
pub mod spaces;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PolyMesh = mesh::PolyMesh<f64>;
pub type Geometry = geometry::Geometry<f64>;
pub type ElementOperators = projectors::ElementOperators<f64>;
pub type LocalForms = forms::LocalForms<f64>;
pub type FieldCoefficients = spaces::FieldCoefficients<f64>;
pub type Discretization = mhd::Discretization<f64>;
pub type MhdParams = mhd::MhdParams<f64>;
pub type MhdState = mhd::MhdState<f64>;
pub type PicardConfig = mhd::PicardConfig<f64>;
pub type StepReport = mhd::StepReport<f64>;
pub type ExactSolution = manufactured::ExactSolution<f64>;
pub type ConvergenceRow = manufactured::ConvergenceRow<f64>;

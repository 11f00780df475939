//! Galerkin discretization on the parametric square.

mod dofs;
mod edges;
mod matrices;
pub mod mms;
mod quadrature;
mod space;
mod system;

pub use dofs::{classify_dofs, DofPartition, DofSlot};
pub use edges::{edge_points, Edge, EdgePoint};
pub use matrices::{assemble, GlobalMatrices};
pub use mms::{boundary_load, dirichlet_projection, l2_error, mms_residual_source, PlaneWave};
pub use quadrature::{gauss_legendre, span_rules, QuadratureRule, SpanRule};
pub use space::{align_breakpoints, DiscreteSpace, SpaceSpec};
pub use system::{build_system, build_system_with, LinearSystem, SystemMatrices};

use crate::geometry::GeometryError;
use crate::solver::SolverError;
use crate::spline::SplineError;

#[derive(Debug, thiserror::Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("nonpositive Jacobian determinant {det:e} at (xi, eta) = ({xi}, {eta})")]
    NonPositiveJacobian { xi: f64, eta: f64, det: f64 },
    #[error("no basis function is active on the aperture")]
    NoDirichletDofs,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

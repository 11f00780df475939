//! Isogeometric Galerkin discretization of the 2D acoustic radiation problem.
//!
//! The pipeline is: exact NURBS geometry of the semicircle ([`geometry`]),
//! B-spline spaces on the unit square ([`spline`]), Galerkin assembly of the
//! Helmholtz system with mixed boundary conditions ([`assembly`]), and a
//! GMRES solve preconditioned by the complex shifted Laplacian ([`solver`]).
//! [`app`] ties the stages together for the command line.

pub mod assembly;
pub mod geometry;
pub mod spline;
pub mod solver;
pub mod app;

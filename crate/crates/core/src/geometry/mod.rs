//! Exact geometry of the semicircular domain: rational boundary arcs, the
//! Coons-patch map `F(ξ, η)` onto the unit square, and its Jacobian quality.

mod boundary;
mod coons;
mod config;
mod curve;
mod quality;

pub use boundary::{make_semicircle_boundary, SemicircleBoundary};
pub use coons::{coons_patch, CoonsSurface, JacobianData, MapEval};
pub use config::{near_field_length, DomainConfig};
pub use curve::{make_arc, make_segment, RationalCurve};
pub use quality::{quality_map, QualityMap, QualitySample};

use crate::spline::SplineError;
use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("invalid domain configuration: {0}")]
    InvalidConfig(String),
    #[error("arc sweep must lie in (0, 2π), got {0}")]
    InvalidSweep(f64),
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("corner {corner} mismatch of {gap:e}")]
    CornerMismatch { corner: &'static str, gap: f64 },
    #[error("boundary curves have incompatible knot vectors in {0}")]
    IncompatibleKnots(&'static str),
    #[error("parameter ({0}, {1}) outside the unit square")]
    OutOfDomain(f64, f64),
}

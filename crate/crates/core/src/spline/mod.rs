//! Univariate and tensor-product B-spline machinery.

mod curve;
mod knots;
mod tensor;

pub use curve::{degree_elevate_curve, eval_curve, refine_knots_curve};
pub use knots::{BasisEval, KnotVector};
pub use tensor::TensorProductSpace;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("spline order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("a clamped knot vector of order {order} needs at least {order} basis functions, got {num_basis}")]
    TooFewBasis { order: usize, num_basis: usize },
    #[error("malformed knot vector: {0}")]
    MalformedKnots(String),
    #[error("knot {knot} would exceed the allowed multiplicity {max}")]
    MultiplicityExceeded { knot: f64, max: usize },
    #[error("parameter {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("expected {expected} control points, got {got}")]
    ControlCount { expected: usize, got: usize },
    #[error("singular collocation matrix during degree elevation")]
    SingularCollocation,
}

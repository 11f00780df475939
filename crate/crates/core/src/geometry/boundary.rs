use std::f64::consts::PI;

use super::{make_arc, make_segment, DomainConfig, GeometryError, RationalCurve};

/// The four boundary curves of the semicircle, oriented so that
/// `F(0,0) = (-r, 0)`, `F(1,0) = (r, 0)`, ξ runs left to right and η runs
/// from the diameter up to the top arc.
#[derive(Debug, Clone)]
pub struct SemicircleBoundary {
    /// Diameter `(-r, 0) → (r, 0)`, quadratic on the top arc's knots.
    pub bottom: RationalCurve,
    /// Arc over polar angles `[θ, π - θ]`, traversed from `π - θ` to `θ`.
    pub top: RationalCurve,
    /// Arc over `[π - θ, π]`, traversed from `π` to `π - θ`.
    pub left: RationalCurve,
    /// Arc over `[0, θ]`, traversed from `0` to `θ`.
    pub right: RationalCurve,
}

pub fn make_semicircle_boundary(cfg: &DomainConfig) -> Result<SemicircleBoundary, GeometryError> {
    cfg.validate()?;
    let (r, theta) = (cfg.r, cfg.theta);
    let o = [0.0, 0.0];
    let right = make_arc(o, r, 0.0, theta)?;
    let left = make_arc(o, r, PI - theta, PI)?.reversed();
    let top = make_arc(o, r, theta, PI - theta)?.reversed();

    let bottom = make_segment([-r, 0.0], [r, 0.0]).degree_elevate()?;
    let interior: Vec<f64> = {
        let k = top.knots().knots();
        k[3..k.len() - 3].to_vec()
    };
    let bottom = bottom.refine(&interior)?;
    if bottom.knots() != top.knots() {
        return Err(GeometryError::IncompatibleKnots("xi"));
    }
    if left.knots() != right.knots() {
        return Err(GeometryError::IncompatibleKnots("eta"));
    }
    Ok(SemicircleBoundary { bottom, top, left, right })
}

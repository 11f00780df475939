use crate::geometry::Point;

use super::quadrature::span_rules;
use super::{AssemblyError, DiscreteSpace};

/// Sides of the parametric square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `η = 0`, the diameter (aperture plus baffle).
    Bottom,
    /// `ξ = 1`.
    Right,
    /// `η = 1`.
    Top,
    /// `ξ = 0`.
    Left,
}

impl Edge {
    /// The three sides mapped onto the arc `Γ_R`.
    pub const ROBIN: [Edge; 3] = [Edge::Left, Edge::Top, Edge::Right];
}

/// Quadrature point on a physical boundary curve.
#[derive(Debug, Clone)]
pub struct EdgePoint {
    pub xi: f64,
    pub eta: f64,
    pub point: Point,
    /// Outward unit normal.
    pub normal: Point,
    /// Gauss weight times arc-length factor.
    pub weight: f64,
    /// Nonzero basis functions on the edge as `(flat index, value)`.
    pub dofs: Vec<(usize, f64)>,
}

/// Gauss points along one edge, `points` per nonempty span.
pub fn edge_points(ds: &DiscreteSpace, edge: Edge, points: usize) -> Result<Vec<EdgePoint>, AssemblyError> {
    let sp = &ds.space;
    let along_xi = matches!(edge, Edge::Bottom | Edge::Top);
    let kv = if along_xi { &sp.xi } else { &sp.eta };
    let mut out = Vec::new();
    for rule in span_rules(kv, points) {
        for (&t, &w) in rule.points.iter().zip(&rule.weights) {
            let (xi, eta) = match edge {
                Edge::Bottom => (t, 0.0),
                Edge::Top => (t, 1.0),
                Edge::Left => (0.0, t),
                Edge::Right => (1.0, t),
            };
            let ev = ds.geometry.eval(xi, eta)?;
            let tan = if along_xi { ev.jac.d_xi() } else { ev.jac.d_eta() };
            let speed = tan[0].hypot(tan[1]);
            // bottom and right are traversed counter-clockwise, top and left clockwise
            let normal = match edge {
                Edge::Bottom | Edge::Right => [tan[1] / speed, -tan[0] / speed],
                Edge::Top | Edge::Left => [-tan[1] / speed, tan[0] / speed],
            };
            let be = kv.eval_basis_in_span(rule.span, t, 0);
            let dofs = be
                .indexed_values()
                .map(|(k, v)| {
                    let q = match edge {
                        Edge::Bottom => sp.flat_index(k, 0),
                        Edge::Top => sp.flat_index(k, sp.m() - 1),
                        Edge::Left => sp.flat_index(0, k),
                        Edge::Right => sp.flat_index(sp.n() - 1, k),
                    };
                    (q, v)
                })
                .collect();
            out.push(EdgePoint { xi, eta, point: ev.point, normal, weight: w * speed, dofs });
        }
    }
    Ok(out)
}

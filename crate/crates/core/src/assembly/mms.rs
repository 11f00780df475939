//! Manufactured plane-wave solutions: boundary data that makes
//! `u*(x) = A exp(ik d·x)` the exact solution, and the error of a discrete
//! solution against it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::solver::{direct_solve, SparseComplex};

use super::edges::{edge_points, Edge};
use super::quadrature::span_rules;
use super::system::{build_system_with, LinearSystem, SystemMatrices};
use super::{AssemblyError, DiscreteSpace};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub k: f64,
    /// Unit propagation direction.
    pub direction: [f64; 2],
    pub amplitude: C,
}

impl PlaneWave {
    pub fn new(k: f64, direction: [f64; 2]) -> Self {
        let len = direction[0].hypot(direction[1]);
        Self { k, direction: [direction[0] / len, direction[1] / len], amplitude: C::new(1.0, 0.0) }
    }

    pub fn value(&self, p: Point) -> C {
        let phase = self.k * (self.direction[0] * p[0] + self.direction[1] * p[1]);
        self.amplitude * C::new(0.0, phase).exp()
    }

    pub fn gradient(&self, p: Point) -> [C; 2] {
        let u = self.value(p) * C::new(0.0, self.k);
        [u * self.direction[0], u * self.direction[1]]
    }

    pub fn normal_derivative(&self, p: Point, n: Point) -> C {
        let g = self.gradient(p);
        g[0] * n[0] + g[1] * n[1]
    }
}

/// Load vector over all `N` dofs from `g_N = ∂u*/∂n` on the diameter and
/// `g_R = ∂u*/∂n + iku*` on the arc.
pub fn boundary_load(ds: &DiscreteSpace, wave: &PlaneWave, points: usize) -> Result<Vec<C>, AssemblyError> {
    let mut f = vec![C::new(0.0, 0.0); ds.dim()];
    for edge in [Edge::Bottom, Edge::Left, Edge::Top, Edge::Right] {
        for p in edge_points(ds, edge, points)? {
            let mut g = wave.normal_derivative(p.point, p.normal);
            if edge != Edge::Bottom {
                g += C::new(0.0, wave.k) * wave.value(p.point);
            }
            for &(q, v) in &p.dofs {
                f[q] += g * (p.weight * v);
            }
        }
    }
    Ok(f)
}

/// Dirichlet coefficients: L² projection of `u*` along the diameter onto the
/// bottom-row functions, keeping the entries in `I_g`.
pub fn dirichlet_projection(
    ds: &DiscreteSpace,
    sys: &SystemMatrices,
    wave: &PlaneWave,
    points: usize,
) -> Result<Vec<C>, AssemblyError> {
    let n = ds.space.n();
    let mut trip = Vec::new();
    let mut rhs = vec![C::new(0.0, 0.0); n];
    for p in edge_points(ds, Edge::Bottom, points)? {
        let u = wave.value(p.point);
        for &(q, vq) in &p.dofs {
            rhs[q] += u * (p.weight * vq);
            for &(r, vr) in &p.dofs {
                trip.push((q, r, C::new(p.weight * vq * vr, 0.0)));
            }
        }
    }
    let coeffs = direct_solve(&SparseComplex::from_triplets(n, n, &trip)?, &rhs)?;
    Ok(sys.partition.dirichlet.iter().map(|&q| coeffs[q]).collect())
}

/// Free-dof system whose discrete solution approximates `wave`.
pub fn mms_residual_source(
    ds: &DiscreteSpace,
    sys: &SystemMatrices,
    wave: &PlaneWave,
    points: usize,
) -> Result<LinearSystem, AssemblyError> {
    let load = boundary_load(ds, wave, points)?;
    let alpha = dirichlet_projection(ds, sys, wave, points)?;
    build_system_with(sys, wave.k, &alpha, Some(&load))
}

/// `(‖uʰ − u‖_{L²}, ‖u‖_{L²})` by element Gauss quadrature with `points`
/// per direction per span.
pub fn l2_error(
    ds: &DiscreteSpace,
    coeffs: &[C],
    exact: impl Fn(Point) -> C + Sync,
    points: usize,
) -> Result<(f64, f64), AssemblyError> {
    if coeffs.len() != ds.dim() {
        return Err(AssemblyError::Dimension { expected: ds.dim(), got: coeffs.len() });
    }
    let sp = &ds.space;
    let rx = span_rules(&sp.xi, points);
    let ry = span_rules(&sp.eta, points);
    let per_row: Vec<Result<(f64, f64), AssemblyError>> = ry
        .par_iter()
        .map(|ryr| {
            let (mut err, mut norm) = (0.0, 0.0);
            for rxr in &rx {
                for (&eta, &wy) in ryr.points.iter().zip(&ryr.weights) {
                    let by = sp.eta.eval_basis_in_span(ryr.span, eta, 0);
                    for (&xi, &wx) in rxr.points.iter().zip(&rxr.weights) {
                        let bx = sp.xi.eval_basis_in_span(rxr.span, xi, 0);
                        let mut uh = C::new(0.0, 0.0);
                        for (j, vy) in by.indexed_values() {
                            for (i, vx) in bx.indexed_values() {
                                uh += coeffs[sp.flat_index(i, j)] * (vx * vy);
                            }
                        }
                        let ev = ds.geometry.eval(xi, eta)?;
                        let u = exact(ev.point);
                        let w = wx * wy * ev.jac.det.abs();
                        err += w * (uh - u).norm_sqr();
                        norm += w * u.norm_sqr();
                    }
                }
            }
            Ok((err, norm))
        })
        .collect();
    let (mut err, mut norm) = (0.0, 0.0);
    for r in per_row {
        let (e, n) = r?;
        err += e;
        norm += n;
    }
    Ok((err.sqrt(), norm.sqrt()))
}

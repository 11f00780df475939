use std::f64::consts::{FRAC_PI_2, PI};

use crate::spline::{degree_elevate_curve, eval_curve, refine_knots_curve, KnotVector};

use super::{GeometryError, Point};

/// Planar rational B-spline curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalCurve {
    ctrl: Vec<Point>,
    weights: Vec<f64>,
    kv: KnotVector,
}

impl RationalCurve {
    pub fn new(ctrl: Vec<Point>, weights: Vec<f64>, kv: KnotVector) -> Result<Self, GeometryError> {
        if ctrl.len() != weights.len() || ctrl.len() != kv.num_basis() {
            return Err(GeometryError::Spline(crate::spline::SplineError::ControlCount {
                expected: kv.num_basis(),
                got: ctrl.len(),
            }));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(GeometryError::NonPositiveWeight);
        }
        Ok(Self { ctrl, weights, kv })
    }

    pub(crate) fn from_homogeneous(h: Vec<[f64; 3]>, kv: KnotVector) -> Result<Self, GeometryError> {
        let weights: Vec<f64> = h.iter().map(|p| p[2]).collect();
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(GeometryError::NonPositiveWeight);
        }
        let ctrl = h.iter().map(|p| [p[0] / p[2], p[1] / p[2]]).collect();
        Ok(Self { ctrl, weights, kv })
    }

    pub fn ctrl(&self) -> &[Point] {
        &self.ctrl
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn knots(&self) -> &KnotVector {
        &self.kv
    }

    /// Weighted control points `(w x, w y, w)`.
    pub fn homogeneous(&self) -> Vec<[f64; 3]> {
        self.ctrl
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| [w * p[0], w * p[1], w])
            .collect()
    }

    pub fn eval(&self, t: f64) -> Result<Point, GeometryError> {
        Ok(self.eval_with_derivative(t)?.0)
    }

    /// Point and tangent `c'(t)` by the quotient rule.
    pub fn eval_with_derivative(&self, t: f64) -> Result<(Point, Point), GeometryError> {
        let h = eval_curve(&self.homogeneous(), &self.kv, t, 1)?;
        let w = h[0][2];
        let p = [h[0][0] / w, h[0][1] / w];
        let dw = h[1][2];
        let d = [(h[1][0] - p[0] * dw) / w, (h[1][1] - p[1] * dw) / w];
        Ok((p, d))
    }

    /// Same point set traversed from `c(1)` to `c(0)`.
    pub fn reversed(&self) -> Self {
        let order = self.kv.order();
        let knots: Vec<f64> = self.kv.knots().iter().rev().map(|&u| 1.0 - u).collect();
        let kv = KnotVector::new(order, knots).expect("reflected clamped knots stay valid");
        Self {
            ctrl: self.ctrl.iter().rev().copied().collect(),
            weights: self.weights.iter().rev().copied().collect(),
            kv,
        }
    }

    pub fn degree_elevate(&self) -> Result<Self, GeometryError> {
        let (h, kv) = degree_elevate_curve(&self.homogeneous(), &self.kv)?;
        Self::from_homogeneous(h, kv)
    }

    pub fn refine(&self, new_knots: &[f64]) -> Result<Self, GeometryError> {
        let (h, kv) = refine_knots_curve(&self.homogeneous(), &self.kv, new_knots)?;
        Self::from_homogeneous(h, kv)
    }
}

/// Straight segment `p0 → p1` as a linear B-spline with unit weights.
pub fn make_segment(p0: Point, p1: Point) -> RationalCurve {
    RationalCurve::new(vec![p0, p1], vec![1.0, 1.0], KnotVector::uniform(2, 2).unwrap())
        .expect("two control points match a linear Bézier knot vector")
}

/// Exact rational quadratic arc from `angle_start` to `angle_end`
/// (counter-clockwise). Sweeps above π/2 are split into equal pieces joined
/// at double knots.
pub fn make_arc(
    center: Point,
    radius: f64,
    angle_start: f64,
    angle_end: f64,
) -> Result<RationalCurve, GeometryError> {
    let sweep = angle_end - angle_start;
    if !(sweep > 0.0 && sweep < 2.0 * PI) || !(radius > 0.0) {
        return Err(GeometryError::InvalidSweep(sweep));
    }
    let pieces = ((sweep / FRAC_PI_2) - 1e-12).ceil().max(1.0) as usize;
    let delta = sweep / pieces as f64;
    let w_mid = (delta / 2.0).cos();
    let on_circle = |phi: f64| [center[0] + radius * phi.cos(), center[1] + radius * phi.sin()];

    let mut ctrl = vec![on_circle(angle_start)];
    let mut weights = vec![1.0];
    let mut knots = vec![0.0; 3];
    for s in 0..pieces {
        let a0 = angle_start + s as f64 * delta;
        let mid = a0 + delta / 2.0;
        let dist = radius / w_mid;
        ctrl.push([center[0] + dist * mid.cos(), center[1] + dist * mid.sin()]);
        weights.push(w_mid);
        let end = if s + 1 == pieces { angle_end } else { a0 + delta };
        ctrl.push(on_circle(end));
        weights.push(1.0);
        if s + 1 < pieces {
            let u = (s + 1) as f64 / pieces as f64;
            knots.extend([u, u]);
        }
    }
    knots.extend([1.0; 3]);
    RationalCurve::new(ctrl, weights, KnotVector::new(3, knots)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn radius_dev(c: &RationalCurve, center: Point, r: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|s| {
                let p = c.eval(s as f64 / (samples - 1) as f64).unwrap();
                ((p[0] - center[0]).hypot(p[1] - center[1]) - r).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn quarter_arc_is_single_bezier() {
        let c = make_arc([0.0, 0.0], 1.0, FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
        assert_eq!(c.knots().knots(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(c.ctrl().len(), 3);
        assert!((c.weights()[1] - FRAC_PI_4.cos()).abs() < 1e-15);
    }

    #[test]
    fn wide_arc_is_split() {
        let theta = PI / 20.0;
        let c = make_arc([0.0, 0.0], 0.166, theta, PI - theta).unwrap();
        assert_eq!(c.knots().knots(), &[0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(c.ctrl().len(), 5);
    }

    #[test]
    fn arcs_lie_on_circle() {
        for (a0, a1) in [(0.0, 0.3), (0.2, 2.9), (-1.0, 4.0), (0.0, 6.0)] {
            let c = make_arc([0.3, -0.2], 2.5, a0, a1).unwrap();
            assert!(radius_dev(&c, [0.3, -0.2], 2.5, 200) <= 1e-12);
            let e = c.eval(1.0).unwrap();
            assert!((e[0] - (0.3 + 2.5 * a1.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sweeps() {
        assert!(make_arc([0.0, 0.0], 1.0, 1.0, 1.0).is_err());
        assert!(make_arc([0.0, 0.0], 1.0, 1.0, 0.5).is_err());
        assert!(make_arc([0.0, 0.0], 1.0, 0.0, 2.0 * PI).is_err());
    }

    #[test]
    fn elevated_arc_keeps_radius() {
        let c = make_arc([0.0, 0.0], 1.0, 0.0, 2.0).unwrap();
        let up = c.degree_elevate().unwrap();
        assert_eq!(up.knots().order(), 4);
        assert!(radius_dev(&up, [0.0, 0.0], 1.0, 200) <= 1e-12);
        let refined = c.refine(&[0.3, 0.7]).unwrap();
        for s in 0..50 {
            let t = s as f64 / 49.0;
            let (a, b) = (c.eval(t).unwrap(), refined.eval(t).unwrap());
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn segment_elevation() {
        let s = make_segment([-1.0, 0.0], [1.0, 0.0]).degree_elevate().unwrap();
        assert_eq!(s.ctrl().len(), 3);
        assert!(s.ctrl()[1][0].abs() < 1e-15 && s.ctrl()[1][1].abs() < 1e-15);
        assert!(s.weights().iter().all(|&w| (w - 1.0).abs() < 1e-15));
        for k in 0..50 {
            let t = k as f64 / 49.0;
            assert!((s.eval(t).unwrap()[0] - (2.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn reversal() {
        let c = make_arc([0.0, 0.0], 1.0, 0.0, 2.5).unwrap();
        let r = c.reversed();
        for k in 0..20 {
            let t = k as f64 / 19.0;
            let (a, b) = (c.eval(t).unwrap(), r.eval(1.0 - t).unwrap());
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn tangent_matches_finite_difference() {
        let c = make_arc([0.0, 0.0], 1.0, 0.1, 2.8).unwrap();
        let h = 1e-6;
        for t in [0.1, 0.33, 0.6, 0.9] {
            let (_, d) = c.eval_with_derivative(t).unwrap();
            let (p1, p0) = (c.eval(t + h).unwrap(), c.eval(t - h).unwrap());
            for k in 0..2 {
                let fd = (p1[k] - p0[k]) / (2.0 * h);
                assert!((fd - d[k]).abs() <= 1e-6 * d[k].abs().max(1.0));
            }
        }
    }
}

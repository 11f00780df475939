use crate::spline::KnotVector;

use super::{GeometryError, Point, RationalCurve};

const CORNER_TOL: f64 = 1e-10;

/// Rational tensor-product surface `F(ξ, η)` built as a bilinearly blended
/// Coons patch.
///
/// Control net stored in homogeneous form, `ξ` index fastest:
/// `net[i + n_F * j] = (w P_x, w P_y, w)`.
#[derive(Debug, Clone)]
pub struct CoonsSurface {
    net: Vec<[f64; 3]>,
    kv_xi: KnotVector,
    kv_eta: KnotVector,
}

/// Jacobian of `F` at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianData {
    /// `[[x_ξ, x_η], [y_ξ, y_η]]`.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    /// `2 det J / (|F_ξ|² + |F_η|²)`.
    pub mean_ratio: f64,
}

impl JacobianData {
    fn from_matrix(jacobian: [[f64; 2]; 2]) -> Self {
        let [[xa, xb], [ya, yb]] = jacobian;
        let det = xa * yb - xb * ya;
        let norms = xa * xa + ya * ya + xb * xb + yb * yb;
        Self { jacobian, det, mean_ratio: 2.0 * det / norms }
    }

    /// Tangent `F_ξ`.
    pub fn d_xi(&self) -> Point {
        [self.jacobian[0][0], self.jacobian[1][0]]
    }

    /// Tangent `F_η`.
    pub fn d_eta(&self) -> Point {
        [self.jacobian[0][1], self.jacobian[1][1]]
    }
}

/// Point and Jacobian together.
#[derive(Debug, Clone, Copy)]
pub struct MapEval {
    pub point: Point,
    pub jac: JacobianData,
}

/// Blends the four boundary curves into a Coons patch. The blend is done on
/// the homogeneous control points, with the linear factors `ξ` and `1 - ξ`
/// expressed in each direction's basis through its Greville abscissae.
pub fn coons_patch(
    bottom: &RationalCurve,
    top: &RationalCurve,
    left: &RationalCurve,
    right: &RationalCurve,
) -> Result<CoonsSurface, GeometryError> {
    if bottom.knots() != top.knots() {
        return Err(GeometryError::IncompatibleKnots("xi"));
    }
    if left.knots() != right.knots() {
        return Err(GeometryError::IncompatibleKnots("eta"));
    }
    let (hb, ht, hl, hr) = (bottom.homogeneous(), top.homogeneous(), left.homogeneous(), right.homogeneous());
    let nf = hb.len();
    let mf = hl.len();

    let corners = [
        ("(0,0)", hb[0], hl[0]),
        ("(1,0)", hb[nf - 1], hr[0]),
        ("(0,1)", ht[0], hl[mf - 1]),
        ("(1,1)", ht[nf - 1], hr[mf - 1]),
    ];
    for (name, p, q) in corners {
        let gap = (0..3).map(|c| (p[c] - q[c]).abs()).fold(0.0, f64::max);
        if gap > CORNER_TOL {
            return Err(GeometryError::CornerMismatch { corner: name, gap });
        }
    }
    let (c00, c10, c01, c11) = (hb[0], hb[nf - 1], ht[0], ht[nf - 1]);

    let gx = bottom.knots().greville();
    let gy = left.knots().greville();
    let mut net = vec![[0.0; 3]; nf * mf];
    for j in 0..mf {
        let v = gy[j];
        for i in 0..nf {
            let u = gx[i];
            let cell = &mut net[i + nf * j];
            for c in 0..3 {
                let ruled_eta = (1.0 - v) * hb[i][c] + v * ht[i][c];
                let ruled_xi = (1.0 - u) * hl[j][c] + u * hr[j][c];
                let bilinear = (1.0 - u) * (1.0 - v) * c00[c]
                    + u * (1.0 - v) * c10[c]
                    + (1.0 - u) * v * c01[c]
                    + u * v * c11[c];
                cell[c] = ruled_eta + ruled_xi - bilinear;
            }
        }
    }
    if net.iter().any(|p| !(p[2] > 0.0)) {
        return Err(GeometryError::NonPositiveWeight);
    }
    Ok(CoonsSurface { net, kv_xi: bottom.knots().clone(), kv_eta: left.knots().clone() })
}

impl CoonsSurface {
    pub fn knots_xi(&self) -> &KnotVector {
        &self.kv_xi
    }

    pub fn knots_eta(&self) -> &KnotVector {
        &self.kv_eta
    }

    /// `(n_F, m_F)`.
    pub fn net_size(&self) -> (usize, usize) {
        (self.kv_xi.num_basis(), self.kv_eta.num_basis())
    }

    /// Control points `P_{i,j}`, ξ index fastest.
    pub fn ctrl(&self) -> Vec<Point> {
        self.net.iter().map(|p| [p[0] / p[2], p[1] / p[2]]).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.net.iter().map(|p| p[2]).collect()
    }

    fn check(xi: f64, eta: f64) -> Result<(), GeometryError> {
        if (0.0..=1.0).contains(&xi) && (0.0..=1.0).contains(&eta) {
            Ok(())
        } else {
            Err(GeometryError::OutOfDomain(xi, eta))
        }
    }

    pub fn eval_map(&self, xi: f64, eta: f64) -> Result<Point, GeometryError> {
        Ok(self.eval(xi, eta)?.point)
    }

    pub fn eval_jacobian(&self, xi: f64, eta: f64) -> Result<JacobianData, GeometryError> {
        Ok(self.eval(xi, eta)?.jac)
    }

    /// Rational evaluation of `F` and its first partials (quotient rule).
    pub fn eval(&self, xi: f64, eta: f64) -> Result<MapEval, GeometryError> {
        Self::check(xi, eta)?;
        let bx = self.kv_xi.eval_basis(xi, 1)?;
        let by = self.kv_eta.eval_basis(eta, 1)?;
        let nf = self.kv_xi.num_basis();
        // homogeneous sums: value, d/dξ, d/dη
        let mut s = [[0.0; 3]; 3];
        let (fx, fy) = (bx.first_index(), by.first_index());
        for (b, (&vy, &dy)) in by.values().iter().zip(by.derivatives()).enumerate() {
            for (a, (&vx, &dx)) in bx.values().iter().zip(bx.derivatives()).enumerate() {
                let p = self.net[fx + a + nf * (fy + b)];
                for c in 0..3 {
                    s[0][c] += vx * vy * p[c];
                    s[1][c] += dx * vy * p[c];
                    s[2][c] += vx * dy * p[c];
                }
            }
        }
        let w = s[0][2];
        let point = [s[0][0] / w, s[0][1] / w];
        let d = |k: usize, c: usize| (s[k][c] - point[c] * s[k][2]) / w;
        let jac = JacobianData::from_matrix([[d(1, 0), d(2, 0)], [d(1, 1), d(2, 1)]]);
        Ok(MapEval { point, jac })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_segment, make_semicircle_boundary, DomainConfig};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn unit_square() -> CoonsSurface {
        coons_patch(
            &make_segment([0.0, 0.0], [1.0, 0.0]),
            &make_segment([0.0, 1.0], [1.0, 1.0]),
            &make_segment([0.0, 0.0], [0.0, 1.0]),
            &make_segment([1.0, 0.0], [1.0, 1.0]),
        )
        .unwrap()
    }

    fn semicircle(theta: f64) -> (CoonsSurface, f64) {
        let cfg = DomainConfig {
            a: 0.01,
            r: 0.133,
            theta,
            dirichlet: Complex64::new(1.0, 0.0),
            c_sound: 1500.0,
            frequency: 1.0e6,
        };
        let b = make_semicircle_boundary(&cfg).unwrap();
        (coons_patch(&b.bottom, &b.top, &b.left, &b.right).unwrap(), cfg.r)
    }

    #[test]
    fn unit_square_is_identity() {
        let f = unit_square();
        for (xi, eta) in [(0.0, 0.0), (0.3, 0.7), (1.0, 0.5)] {
            let e = f.eval(xi, eta).unwrap();
            assert!((e.point[0] - xi).abs() < 1e-15 && (e.point[1] - eta).abs() < 1e-15);
            assert!((e.jac.det - 1.0).abs() < 1e-14);
            assert!((e.jac.mean_ratio - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn corner_mismatch_is_rejected() {
        let err = coons_patch(
            &make_segment([0.0, 0.0], [1.0, 0.0]),
            &make_segment([0.0, 1.0], [1.0, 1.0]),
            &make_segment([0.0, 0.1], [0.0, 1.0]),
            &make_segment([1.0, 0.0], [1.0, 1.0]),
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::CornerMismatch { corner: "(0,0)", .. }));
    }

    #[test]
    fn quarter_patch_has_nine_controls() {
        let (f, _) = semicircle(PI / 4.0);
        assert_eq!(f.net_size(), (3, 3));
        assert_eq!(f.ctrl().len(), 9);
    }

    #[test]
    fn boundary_reproduction() {
        for theta in [PI / 20.0, PI / 4.0, 3.0 * PI / 8.0] {
            let cfg = DomainConfig {
                a: 0.01,
                r: 0.133,
                theta,
                dirichlet: Complex64::new(1.0, 0.0),
                c_sound: 1500.0,
                frequency: 1.0e6,
            };
            let b = make_semicircle_boundary(&cfg).unwrap();
            let f = coons_patch(&b.bottom, &b.top, &b.left, &b.right).unwrap();
            let mut worst: f64 = 0.0;
            for s in 0..100 {
                let t = s as f64 / 99.0;
                let pairs = [
                    (f.eval_map(t, 0.0).unwrap(), b.bottom.eval(t).unwrap()),
                    (f.eval_map(t, 1.0).unwrap(), b.top.eval(t).unwrap()),
                    (f.eval_map(0.0, t).unwrap(), b.left.eval(t).unwrap()),
                    (f.eval_map(1.0, t).unwrap(), b.right.eval(t).unwrap()),
                ];
                for (p, q) in pairs {
                    worst = worst.max((p[0] - q[0]).abs()).max((p[1] - q[1]).abs());
                }
            }
            assert!(worst <= 1e-12, "theta {theta}: {worst:e}");
        }
    }

    #[test]
    fn semicircle_landmarks() {
        let (f, r) = semicircle(PI / 4.0);
        let p = f.eval_map(0.0, 0.0).unwrap();
        assert!((p[0] + r).abs() < 1e-15 && p[1].abs() < 1e-15);
        let top = f.eval_map(0.5, 1.0).unwrap();
        assert!((top[0].hypot(top[1]) - r).abs() < 1e-12);
        assert!(top[0].abs() < 1e-12);
        for s in 0..20 {
            assert!(f.eval_map(s as f64 / 19.0, 0.0).unwrap()[1].abs() < 1e-15);
        }
        let a = 0.01;
        let p = f.eval_map((r - a) / (2.0 * r), 0.0).unwrap();
        assert!((p[0] + a).abs() < 1e-14);
        for s in 0..=10 {
            assert!(f.eval_map(0.5, s as f64 / 10.0).unwrap()[0].abs() < 1e-10);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let (f, _) = semicircle(PI / 8.0);
        let h = 1e-6;
        // ξ = 1/2 is a C0 knot for this θ, keep away from it
        for (xi, eta) in [(0.2, 0.3), (0.45, 0.5), (0.77, 0.12), (0.4, 0.9)] {
            let j = f.eval_jacobian(xi, eta).unwrap();
            let px = (f.eval_map(xi + h, eta).unwrap(), f.eval_map(xi - h, eta).unwrap());
            let py = (f.eval_map(xi, eta + h).unwrap(), f.eval_map(xi, eta - h).unwrap());
            for c in 0..2 {
                let fdx = (px.0[c] - px.1[c]) / (2.0 * h);
                let fdy = (py.0[c] - py.1[c]) / (2.0 * h);
                let scale = j.jacobian[c][0].abs().max(j.jacobian[c][1].abs());
                assert!((fdx - j.jacobian[c][0]).abs() <= 1e-6 * scale);
                assert!((fdy - j.jacobian[c][1]).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn positive_determinant_on_dense_grid() {
        for theta in [PI / 20.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0] {
            let (f, _) = semicircle(theta);
            let res = 400;
            for j in 0..res {
                for i in 0..res {
                    let jd = f
                        .eval_jacobian(i as f64 / (res - 1) as f64, j as f64 / (res - 1) as f64)
                        .unwrap();
                    if j == res - 1 && (i == 0 || i == res - 1) {
                        // the top corners sit on the smooth arc: F_ξ ∥ F_η there
                        assert!(jd.det.abs() < 1e-12, "theta {theta}: {}", jd.det);
                        continue;
                    }
                    assert!(jd.det > 0.0, "theta {theta} at ({i},{j})");
                    assert!(jd.mean_ratio > 0.0 && jd.mean_ratio <= 1.0 + 1e-15);
                }
            }
        }
    }

    #[test]
    fn out_of_domain() {
        let f = unit_square();
        assert!(f.eval_map(1.1, 0.0).is_err());
        assert!(f.eval_jacobian(0.5, -0.1).is_err());
    }
}

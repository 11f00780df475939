//! Structural operations on polynomial B-spline curves with control points in
//! `R^D`. Rational curves go through these in homogeneous coordinates.

use super::{KnotVector, SplineError};

/// Point and derivatives `c(t), c'(t), ...` of a B-spline curve.
pub fn eval_curve<const D: usize>(
    ctrl: &[[f64; D]],
    kv: &KnotVector,
    t: f64,
    num_derivs: usize,
) -> Result<Vec<[f64; D]>, SplineError> {
    check_len(ctrl, kv)?;
    let be = kv.eval_basis(t, num_derivs)?;
    let first = be.first_index();
    let mut out = vec![[0.0; D]; num_derivs + 1];
    for (d, slot) in out.iter_mut().enumerate() {
        for (j, &b) in be.derivative(d).iter().enumerate() {
            for c in 0..D {
                slot[c] += b * ctrl[first + j][c];
            }
        }
    }
    Ok(out)
}

fn check_len<const D: usize>(ctrl: &[[f64; D]], kv: &KnotVector) -> Result<(), SplineError> {
    if ctrl.len() != kv.num_basis() {
        return Err(SplineError::ControlCount { expected: kv.num_basis(), got: ctrl.len() });
    }
    Ok(())
}

/// Raises the degree by one without changing the curve.
///
/// The elevated space contains the original one, so the new control points
/// are found by interpolating the curve at the Greville abscissae of the
/// elevated knot vector; that collocation problem is uniquely solvable by the
/// Schoenberg–Whitney conditions.
pub fn degree_elevate_curve<const D: usize>(
    ctrl: &[[f64; D]],
    kv: &KnotVector,
) -> Result<(Vec<[f64; D]>, KnotVector), SplineError> {
    check_len(ctrl, kv)?;
    let kv_up = kv.elevated();
    let n = kv_up.num_basis();
    let sites = kv_up.greville();

    let mut mat = vec![vec![0.0; n]; n];
    let mut rhs = vec![[0.0; D]; n];
    for (row, &g) in sites.iter().enumerate() {
        for (i, v) in kv_up.eval_basis(g, 0)?.indexed_values() {
            mat[row][i] = v;
        }
        rhs[row] = eval_curve(ctrl, kv, g, 0)?[0];
    }
    let sol = solve_dense(mat, rhs)?;
    Ok((sol, kv_up))
}

/// Inserts `new_knots` one at a time (Boehm's algorithm). Geometry and
/// parametrization are unchanged.
pub fn refine_knots_curve<const D: usize>(
    ctrl: &[[f64; D]],
    kv: &KnotVector,
    new_knots: &[f64],
) -> Result<(Vec<[f64; D]>, KnotVector), SplineError> {
    check_len(ctrl, kv)?;
    let mut pts = ctrl.to_vec();
    let mut cur = kv.clone();
    for &u in new_knots {
        if !(0.0..=1.0).contains(&u) {
            return Err(SplineError::OutOfDomain(u));
        }
        let next = cur.with_knot(u)?;
        let p = cur.degree();
        let span = cur.find_span(u)?;
        let t = cur.knots();
        let mut out = Vec::with_capacity(pts.len() + 1);
        for i in 0..=pts.len() {
            if i + p <= span {
                out.push(pts[i]);
            } else if i > span {
                out.push(pts[i - 1]);
            } else {
                let alpha = (u - t[i]) / (t[i + p] - t[i]);
                let mut q = [0.0; D];
                for c in 0..D {
                    q[c] = alpha * pts[i][c] + (1.0 - alpha) * pts[i - 1][c];
                }
                out.push(q);
            }
        }
        pts = out;
        cur = next;
    }
    Ok((pts, cur))
}

/// Gaussian elimination with partial pivoting for the small collocation
/// systems above.
fn solve_dense<const D: usize>(
    mut a: Vec<Vec<f64>>,
    mut b: Vec<[f64; D]>,
) -> Result<Vec<[f64; D]>, SplineError> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(SplineError::SingularCollocation);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            for c in 0..D {
                b[row][c] -= f * b[col][c];
            }
        }
    }
    for col in (0..n).rev() {
        for c in 0..D {
            let mut s = b[col][c];
            for k in col + 1..n {
                s -= a[col][k] * b[k][c];
            }
            b[col][c] = s / a[col][col];
        }
    }
    Ok(b)
}

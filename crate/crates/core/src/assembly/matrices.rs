use log::warn;
use rayon::prelude::*;

use crate::solver::SparseReal;
use crate::spline::BasisEval;

use super::edges::{edge_points, Edge};
use super::quadrature::{span_rules, QuadratureRule, SpanRule};
use super::space::tabulate;
use super::{AssemblyError, DiscreteSpace};

/// Stiffness, mass and Robin boundary matrices over all `N` basis functions.
#[derive(Debug, Clone)]
pub struct GlobalMatrices {
    pub stiffness: SparseReal,
    pub mass: SparseReal,
    pub boundary: SparseReal,
}

/// CSR pattern of a tensor-product spline space: row `(i, j)` couples to
/// `(i', j')` with `|i − i'| ≤ p₁`, `|j − j'| ≤ p₂`. Rows are stored in
/// flattened order so the column block of a row is a dense rectangle.
struct TensorPattern {
    n: usize,
    m: usize,
    p1: usize,
    p2: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl TensorPattern {
    fn new(n: usize, m: usize, p1: usize, p2: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n * m + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for j in 0..m {
            for i in 0..n {
                let (ilo, ihi) = (i.saturating_sub(p1), (i + p1).min(n - 1));
                let (jlo, jhi) = (j.saturating_sub(p2), (j + p2).min(m - 1));
                for jj in jlo..=jhi {
                    col_idx.extend((ilo..=ihi).map(|ii| jj * n + ii));
                }
                row_ptr.push(col_idx.len());
            }
        }
        Self { n, m, p1, p2, row_ptr, col_idx }
    }

    /// Storage position of entry `((i, j), (i2, j2))`.
    fn position(&self, i: usize, j: usize, i2: usize, j2: usize) -> usize {
        let ilo = i.saturating_sub(self.p1);
        let width = (i + self.p1).min(self.n - 1) - ilo + 1;
        let jlo = j.saturating_sub(self.p2);
        self.row_ptr[j * self.n + i] + (j2 - jlo) * width + (i2 - ilo)
    }

    fn into_matrix(&self, values: Vec<f64>) -> SparseReal {
        let dim = self.n * self.m;
        SparseReal::from_parts(dim, dim, self.row_ptr.clone(), self.col_idx.clone(), values)
            .expect("tensor pattern is sorted and in range")
    }
}

struct ElementTables<'a> {
    ds: &'a DiscreteSpace,
    rx: &'a [SpanRule],
    ry: &'a [SpanRule],
    tx: &'a [Vec<BasisEval>],
    ty: &'a [Vec<BasisEval>],
    /// Parametric corners where `det JF` vanishes, with the indices of the
    /// element touching each.
    degenerate: Vec<((f64, f64), (usize, usize))>,
}

/// Elements within this parametric distance (in each direction) of a
/// degenerate corner get `GRADED_POINTS` Gauss points. The integrand is
/// nearly singular along the two edges meeting there.
const NEAR_RADIUS: f64 = 0.3;

/// Levels of geometric grading toward a degenerate corner; the innermost
/// unresolved box has relative size `2^-GRADED_LEVELS`.
const GRADED_LEVELS: usize = 40;
/// Gauss points per direction in each graded sub-cell.
const GRADED_POINTS: usize = 12;

/// Composite rule on `[x0,x1]×[y0,y1]` graded toward the corner `(cx, cy)`:
/// nested L-shaped layers of three sub-squares, each halving the distance to
/// the corner. Integrands with a `1/ρ` singularity at the corner (the pulled
/// back stiffness form where the map degenerates) are then integrated to
/// near machine precision.
fn graded_rule(x: (f64, f64), y: (f64, f64), corner: (f64, f64), points: usize) -> Vec<(f64, f64, f64)> {
    let (gx, gw) = super::quadrature::gauss_legendre(points);
    let (hx, hy) = (x.1 - x.0, y.1 - y.0);
    // local coordinates measured from the corner, mapped back at the end
    let sx = if corner.0 == x.0 { 1.0 } else { -1.0 };
    let sy = if corner.1 == y.0 { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    let mut size = 1.0;
    for _ in 0..GRADED_LEVELS {
        let half = size / 2.0;
        for (ox, oy) in [(half, 0.0), (0.0, half), (half, half)] {
            for (&u, &wu) in gx.iter().zip(&gw) {
                for (&v, &wv) in gx.iter().zip(&gw) {
                    let a = ox + half * (u + 1.0) / 2.0;
                    let b = oy + half * (v + 1.0) / 2.0;
                    let w = wu * wv * half * half / 4.0 * hx * hy;
                    out.push((corner.0 + sx * a * hx, corner.1 + sy * b * hy, w));
                }
            }
        }
        size = half;
    }
    out
}

struct Local {
    s: Vec<f64>,
    m: Vec<f64>,
    val: Vec<f64>,
    dx: Vec<f64>,
    dy: Vec<f64>,
}

impl Local {
    fn new(nloc: usize) -> Self {
        Self {
            s: vec![0.0; nloc * nloc],
            m: vec![0.0; nloc * nloc],
            val: vec![0.0; nloc],
            dx: vec![0.0; nloc],
            dy: vec![0.0; nloc],
        }
    }

    fn add_point(
        &mut self,
        ds: &DiscreteSpace,
        (xi, eta, w): (f64, f64, f64),
        bx: &BasisEval,
        by: &BasisEval,
    ) -> Result<(), AssemblyError> {
        let jd = ds.geometry.eval_jacobian(xi, eta)?;
        if !(jd.det > 0.0) {
            return Err(AssemblyError::NonPositiveJacobian { xi, eta, det: jd.det });
        }
        let [[xa, xb], [ya, yb]] = jd.jacobian;
        // (JᵀJ)⁻¹ det J, scaled by the weight
        let s = w / jd.det;
        let k00 = (xb * xb + yb * yb) * s;
        let k01 = -(xa * xb + ya * yb) * s;
        let k11 = (xa * xa + ya * ya) * s;
        let wdet = w * jd.det;
        let (vx, dvx, vy, dvy) = (bx.values(), bx.derivatives(), by.values(), by.derivatives());
        let kx = vx.len();
        let nloc = self.val.len();
        for a in 0..nloc {
            let (ax, ay) = (a % kx, a / kx);
            self.val[a] = vx[ax] * vy[ay];
            self.dx[a] = dvx[ax] * vy[ay];
            self.dy[a] = vx[ax] * dvy[ay];
        }
        for a in 0..nloc {
            let ga = k00 * self.dx[a] + k01 * self.dy[a];
            let ha = k01 * self.dx[a] + k11 * self.dy[a];
            let va = wdet * self.val[a];
            let row = a * nloc;
            for b in 0..nloc {
                self.s[row + b] += ga * self.dx[b] + ha * self.dy[b];
                self.m[row + b] += va * self.val[b];
            }
        }
        Ok(())
    }
}

/// Local stiffness and mass on element `(ex, ey)`; local index `ax + k₁·ay`.
fn element(t: &ElementTables, ex: usize, ey: usize) -> Result<(Vec<f64>, Vec<f64>), AssemblyError> {
    let sp = &t.ds.space;
    let mut loc = Local::new(sp.xi.order() * sp.eta.order());
    let (rx, ry) = (&t.rx[ex], &t.ry[ey]);
    let (kx, ky) = (sp.xi.knots(), sp.eta.knots());
    let xr = (kx[rx.span], kx[rx.span + 1]);
    let yr = (ky[ry.span], ky[ry.span + 1]);
    let points = GRADED_POINTS.max(rx.points.len()).max(ry.points.len());
    let mut direct = |pts: Vec<(f64, f64, f64)>| -> Result<(), AssemblyError> {
        for (xi, eta, w) in pts {
            let bx = sp.xi.eval_basis_in_span(rx.span, xi, 1);
            let by = sp.eta.eval_basis_in_span(ry.span, eta, 1);
            loc.add_point(t.ds, (xi, eta, w), &bx, &by)?;
        }
        Ok(())
    };
    let gap = |c: f64, r: (f64, f64)| if c < r.0 { r.0 - c } else if c > r.1 { c - r.1 } else { 0.0 };
    let near = |c: (f64, f64)| gap(c.0, xr) < NEAR_RADIUS && gap(c.1, yr) < NEAR_RADIUS;
    if let Some(&(c, _)) = t.degenerate.iter().find(|(_, e)| *e == (ex, ey)) {
        direct(graded_rule(xr, yr, c, points))?;
    } else if t.degenerate.iter().any(|d| near(d.0)) {
        let rule = |r: (f64, f64)| super::quadrature::span_rule(r.0, r.1, points);
        let (qx, qy) = (rule(xr), rule(yr));
        let mut pts = Vec::with_capacity(points * points);
        for (&eta, &wy) in qy.0.iter().zip(&qy.1) {
            for (&xi, &wx) in qx.0.iter().zip(&qx.1) {
                pts.push((xi, eta, wx * wy));
            }
        }
        direct(pts)?;
    } else {
        for (py, (&eta, &wy)) in ry.points.iter().zip(&ry.weights).enumerate() {
            for (px, (&xi, &wx)) in rx.points.iter().zip(&rx.weights).enumerate() {
                loc.add_point(t.ds, (xi, eta, wx * wy), &t.tx[ex][px], &t.ty[ey][py])?;
            }
        }
    }
    Ok((loc.s, loc.m))
}

/// Parametric corners at which `F_ξ` and `F_η` are parallel, paired with
/// the element that contains each.
fn degenerate_corners(
    ds: &DiscreteSpace,
    nx: usize,
    ny: usize,
) -> Result<Vec<((f64, f64), (usize, usize))>, AssemblyError> {
    let mut out = Vec::new();
    for c in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let jd = ds.geometry.eval_jacobian(c.0, c.1)?;
        let (a, b) = (jd.d_xi(), jd.d_eta());
        if jd.det.abs() <= 1e-10 * a[0].hypot(a[1]) * b[0].hypot(b[1]) {
            let e = (if c.0 == 0.0 { 0 } else { nx - 1 }, if c.1 == 0.0 { 0 } else { ny - 1 });
            out.push((c, e));
        }
    }
    Ok(out)
}

/// Element-wise Gauss assembly of `S`, `M` and `E` over the full index set.
///
/// Elements in one row of knot spans are integrated in parallel and then
/// added in a fixed order, so results do not depend on the thread count.
/// Elements touching a corner where the map degenerates get a graded
/// composite rule instead of the tensor Gauss rule.
pub fn assemble(ds: &DiscreteSpace, quad: &QuadratureRule) -> Result<GlobalMatrices, AssemblyError> {
    let sp = &ds.space;
    let (kx, ky) = (sp.xi.order(), sp.eta.order());
    if !quad.is_sufficient_for(kx, ky) {
        warn!(
            "quadrature with {}x{} points per span under-integrates orders {kx}x{ky}",
            quad.points_xi, quad.points_eta
        );
    }
    let rx = span_rules(&sp.xi, quad.points_xi);
    let ry = span_rules(&sp.eta, quad.points_eta);
    let tx = tabulate(&sp.xi, &rx);
    let ty = tabulate(&sp.eta, &ry);
    let tables = ElementTables { ds, rx: &rx, ry: &ry, tx: &tx, ty: &ty, degenerate: degenerate_corners(ds, rx.len(), ry.len())? };

    let pattern = TensorPattern::new(sp.n(), sp.m(), kx - 1, ky - 1);
    let nnz = pattern.col_idx.len();
    let (mut s_vals, mut m_vals) = (vec![0.0; nnz], vec![0.0; nnz]);
    let nloc = kx * ky;
    for ey in 0..ry.len() {
        let row: Vec<_> = (0..rx.len()).into_par_iter().map(|ex| element(&tables, ex, ey)).collect();
        let fy = ry[ey].span + 1 - ky;
        for (ex, res) in row.into_iter().enumerate() {
            let (sl, ml) = res?;
            let fx = rx[ex].span + 1 - kx;
            for a in 0..nloc {
                let (i, j) = (fx + a % kx, fy + a / kx);
                for b in 0..nloc {
                    let pos = pattern.position(i, j, fx + b % kx, fy + b / kx);
                    s_vals[pos] += sl[a * nloc + b];
                    m_vals[pos] += ml[a * nloc + b];
                }
            }
        }
    }

    let mut trip = Vec::new();
    for edge in Edge::ROBIN {
        let pts = if edge == Edge::Top { quad.points_xi } else { quad.points_eta };
        for p in edge_points(ds, edge, pts)? {
            for &(q, vq) in &p.dofs {
                for &(r, vr) in &p.dofs {
                    trip.push((q, r, p.weight * vq * vr));
                }
            }
        }
    }
    let dim = sp.dim();
    Ok(GlobalMatrices {
        stiffness: pattern.into_matrix(s_vals),
        mass: pattern.into_matrix(m_vals),
        boundary: SparseReal::from_triplets(dim, dim, &trip)?,
    })
}

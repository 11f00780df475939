//! Gauss–Legendre rules mapped onto knot spans.

use std::f64::consts::PI;

use crate::spline::KnotVector;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// from Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a quadrature rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss points of one knot span in one direction.
#[derive(Debug, Clone)]
pub struct SpanRule {
    /// Knot span index (`knots[span] < knots[span + 1]`).
    pub span: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Per-span tensor Gauss–Legendre rule for a pair of knot vectors.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points_xi: usize,
    pub points_eta: usize,
}

impl QuadratureRule {
    /// `order + 1` points per direction per span.
    pub fn for_orders(order_xi: usize, order_eta: usize) -> Self {
        Self { points_xi: order_xi + 1, points_eta: order_eta + 1 }
    }

    pub fn new(points_xi: usize, points_eta: usize) -> Self {
        Self { points_xi, points_eta }
    }

    /// Whether the rule integrates products of two basis functions of the
    /// given orders exactly on an affine geometry.
    pub fn is_sufficient_for(&self, order_xi: usize, order_eta: usize) -> bool {
        let need = |k: usize| (2 * k - 1).div_ceil(2);
        self.points_xi >= need(order_xi) && self.points_eta >= need(order_eta)
    }
}

/// Gauss points and weights on `[a, b]`.
pub(crate) fn span_rule(a: f64, b: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(points);
    let half = 0.5 * (b - a);
    (x.iter().map(|&t| a + half * (t + 1.0)).collect(), w.iter().map(|&wt| wt * half).collect())
}

/// Gauss points mapped onto every nonempty span of `kv`.
pub fn span_rules(kv: &KnotVector, points: usize) -> Vec<SpanRule> {
    let knots = kv.knots();
    kv.spans()
        .into_iter()
        .map(|s| {
            let (points, weights) = span_rule(knots[s], knots[s + 1], points);
            SpanRule { span: s, points, weights }
        })
        .collect()
}

//! Clamped knot vectors on `[0, 1]` and Cox–de Boor basis evaluation.
//!
//! Indexing convention: basis functions are numbered `0..num_basis()`
//! internally. A knot vector of order `k` (degree `k - 1`) stores every
//! knot explicitly, with each end value repeated `k` times, so the basis
//! count is `knots.len() - order`. This is the same space as the
//! `k - 1` end repetitions plus `n - k + 2` breakpoints layout, because the
//! outer breakpoints `0` and `1` supply the `k`-th repetition.

use super::SplineError;

/// Tolerance used when comparing knot values.
pub(crate) const KNOT_EPS: f64 = 1e-14;

/// A clamped (open) knot vector on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    order: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Builds a knot vector after checking it is clamped, nondecreasing,
    /// inside `[0, 1]`, and has no interior knot of multiplicity above the
    /// degree.
    pub fn new(order: usize, knots: Vec<f64>) -> Result<Self, SplineError> {
        if order < 2 {
            return Err(SplineError::InvalidOrder(order));
        }
        if knots.len() < 2 * order {
            return Err(SplineError::MalformedKnots(format!(
                "{} knots is too few for order {order}",
                knots.len()
            )));
        }
        if knots.iter().any(|u| !u.is_finite() || *u < 0.0 || *u > 1.0) {
            return Err(SplineError::MalformedKnots(
                "knots must lie in [0, 1]".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(SplineError::MalformedKnots(
                "knots must be nondecreasing".into(),
            ));
        }
        let len = knots.len();
        if knots[..order].iter().any(|&u| u != 0.0) || knots[len - order..].iter().any(|&u| u != 1.0) {
            return Err(SplineError::MalformedKnots(format!(
                "end knots must be repeated {order} times (clamped form)"
            )));
        }
        if knots[order] == 0.0 || knots[len - order - 1] == 1.0 {
            return Err(SplineError::MalformedKnots(
                "end knot multiplicity exceeds the order".into(),
            ));
        }
        let kv = Self { order, knots };
        for u in kv.breakpoints() {
            if u > 0.0 && u < 1.0 && kv.multiplicity(u) >= order {
                return Err(SplineError::MultiplicityExceeded { knot: u, max: order - 1 });
            }
        }
        Ok(kv)
    }

    /// Clamped knot vector of the given order with `num_basis` functions and
    /// uniformly spaced interior breakpoints.
    pub fn uniform(order: usize, num_basis: usize) -> Result<Self, SplineError> {
        if order < 2 {
            return Err(SplineError::InvalidOrder(order));
        }
        if num_basis < order {
            return Err(SplineError::TooFewBasis { order, num_basis });
        }
        let spans = num_basis - order + 1;
        let mut knots = vec![0.0; order];
        knots.extend((1..spans).map(|i| i as f64 / spans as f64));
        knots.extend(std::iter::repeat(1.0).take(order));
        Self::new(order, knots)
    }

    /// Builds a clamped vector from strictly increasing breakpoints
    /// `0 = b_0 < ... < b_s = 1`, all interior breakpoints simple.
    pub fn from_breakpoints(order: usize, breakpoints: &[f64]) -> Result<Self, SplineError> {
        if breakpoints.len() < 2 || breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(SplineError::MalformedKnots(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SplineError::MalformedKnots(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let mut knots = vec![0.0; order];
        knots.extend_from_slice(&breakpoints[1..breakpoints.len() - 1]);
        knots.extend(std::iter::repeat(1.0).take(order));
        Self::new(order, knots)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.order - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Dimension of the spline space, `len(knots) - order`.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.order
    }

    /// Distinct knot values in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &u in &self.knots {
            if out.last().map_or(true, |&l| u > l) {
                out.push(u);
            }
        }
        out
    }

    pub fn multiplicity(&self, u: f64) -> usize {
        self.knots.iter().filter(|&&v| (v - u).abs() <= KNOT_EPS).count()
    }

    /// Indices `s` of the nonempty spans `[knots[s], knots[s + 1])`.
    pub fn spans(&self) -> Vec<usize> {
        (self.degree()..self.num_basis())
            .filter(|&s| self.knots[s + 1] > self.knots[s])
            .collect()
    }

    /// Support interval of basis function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        (self.knots[i], self.knots[i + self.order])
    }

    /// Greville abscissae: the averages of `degree` consecutive knots. These
    /// are the coefficients of the identity function in this basis.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree();
        (0..self.num_basis())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Index `s` of the span with `knots[s] <= t < knots[s + 1]`. At `t = 1`
    /// the last nonempty span is returned.
    pub fn find_span(&self, t: f64) -> Result<usize, SplineError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(SplineError::OutOfDomain(t));
        }
        let last = self.num_basis() - 1;
        if t >= self.knots[last + 1] {
            return Ok(last);
        }
        let pos = self.knots.partition_point(|&u| u <= t);
        Ok(pos - 1)
    }

    /// Values and derivatives of the `order` basis functions that can be
    /// nonzero at `t`. Derivatives above the degree come back as zeros.
    pub fn eval_basis(&self, t: f64, num_derivs: usize) -> Result<BasisEval, SplineError> {
        let span = self.find_span(t)?;
        Ok(self.eval_basis_in_span(span, t, num_derivs))
    }

    /// Same as [`eval_basis`](Self::eval_basis) with a known span; `t` may lie
    /// on either closed end of that span.
    pub fn eval_basis_in_span(&self, span: usize, t: f64, num_derivs: usize) -> BasisEval {
        let p = self.degree();
        let u = &self.knots;
        // ndu: upper triangle holds basis values, lower triangle knot differences
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; num_derivs + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let nd = num_derivs.min(p);
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=nd {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for k in 1..=nd {
            for v in ders[k].iter_mut() {
                *v *= factor;
            }
            factor *= (p - k) as f64;
        }
        BasisEval { span, degree: p, ders }
    }

    /// Value of a single basis function, zero outside its support.
    pub fn basis_value(&self, i: usize, t: f64) -> Result<f64, SplineError> {
        let be = self.eval_basis(t, 0)?;
        Ok(be.value_of(i))
    }

    /// Knot vector of the degree-elevated space: order + 1 and every distinct
    /// knot one multiplicity higher, which keeps the continuity unchanged.
    pub fn elevated(&self) -> KnotVector {
        let mut knots = Vec::with_capacity(self.knots.len() + self.breakpoints().len());
        let mut prev = f64::NAN;
        for &u in &self.knots {
            if u != prev {
                knots.push(u);
                prev = u;
            }
            knots.push(u);
        }
        KnotVector { order: self.order + 1, knots }
    }

    /// Knot vector with `u` inserted once. Interior multiplicity may reach the
    /// degree but not the order; end knots cannot be inserted.
    pub fn with_knot(&self, u: f64) -> Result<KnotVector, SplineError> {
        if !(u > 0.0 && u < 1.0) {
            return Err(SplineError::MultiplicityExceeded { knot: u, max: self.order });
        }
        if self.multiplicity(u) + 1 > self.degree() {
            return Err(SplineError::MultiplicityExceeded { knot: u, max: self.degree() });
        }
        let pos = self.knots.partition_point(|&v| v <= u);
        let mut knots = self.knots.clone();
        knots.insert(pos, u);
        Ok(KnotVector { order: self.order, knots })
    }
}

/// Nonzero basis functions (and derivatives) at one parameter value.
#[derive(Debug, Clone)]
pub struct BasisEval {
    /// Span index `s` with `knots[s] <= t < knots[s + 1]`.
    pub span: usize,
    degree: usize,
    /// `ders[d][j]` is the `d`-th derivative of basis `first_index() + j`.
    ders: Vec<Vec<f64>>,
}

impl BasisEval {
    /// Index of the first nonzero basis function, `span - degree`.
    pub fn first_index(&self) -> usize {
        self.span - self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.ders[0]
    }

    /// First derivatives; zeros if none were requested.
    pub fn derivatives(&self) -> &[f64] {
        self.derivative(1)
    }

    /// `d`-th derivatives. Orders that were not requested read as zero.
    pub fn derivative(&self, d: usize) -> &[f64] {
        static ZEROS: [f64; 32] = [0.0; 32];
        match self.ders.get(d) {
            Some(v) => v,
            None => &ZEROS[..self.degree + 1],
        }
    }

    pub fn num_derivs(&self) -> usize {
        self.ders.len() - 1
    }

    /// Global indices paired with values.
    pub fn indexed_values(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let first = self.first_index();
        self.ders[0].iter().enumerate().map(move |(j, &v)| (first + j, v))
    }

    /// Value of global basis `i`, zero if it is not among the active ones.
    pub fn value_of(&self, i: usize) -> f64 {
        let first = self.first_index();
        if i < first || i > first + self.degree {
            0.0
        } else {
            self.ders[0][i - first]
        }
    }
}

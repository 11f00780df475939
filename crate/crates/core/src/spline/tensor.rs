use super::KnotVector;

/// Tensor product of two univariate spline spaces.
///
/// Functions are flattened with the ξ index running fastest:
/// `q = j * n + i` for `0 <= i < n`, `0 <= j < m` (the 0-based form of
/// `q = n (j - 1) + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorProductSpace {
    pub xi: KnotVector,
    pub eta: KnotVector,
}

impl TensorProductSpace {
    pub fn new(xi: KnotVector, eta: KnotVector) -> Self {
        Self { xi, eta }
    }

    /// Basis count in ξ.
    pub fn n(&self) -> usize {
        self.xi.num_basis()
    }

    /// Basis count in η.
    pub fn m(&self) -> usize {
        self.eta.num_basis()
    }

    pub fn dim(&self) -> usize {
        self.n() * self.m()
    }

    #[inline]
    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n() && j < self.m());
        j * self.n() + i
    }

    #[inline]
    pub fn unflatten(&self, q: usize) -> (usize, usize) {
        (q % self.n(), q / self.n())
    }
}

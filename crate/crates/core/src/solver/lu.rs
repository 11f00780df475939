use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::linalg::solvers::Lu;
use num_complex::Complex64;

use super::{SolverError, SparseComplex};

/// Sparse LU factors (fill-reducing column ordering, partial pivoting).
pub struct SparseLu {
    lu: Lu<usize, Complex64>,
    n: usize,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).finish_non_exhaustive()
    }
}

impl SparseLu {
    pub fn factor(a: &SparseComplex) -> Result<Self, SolverError> {
        if a.nrows() != a.ncols() {
            return Err(SolverError::Dimension { expected: a.nrows(), got: a.ncols() });
        }
        let lu = a.to_faer()?.sp_lu().map_err(|e| match e {
            LuError::SymbolicSingular { index } => SolverError::Singular { index },
            LuError::Generic(g) => SolverError::Factorization(format!("{g:?}")),
        })?;
        let out = Self { lu, n: a.nrows() };
        // numerically zero pivots surface as non-finite solutions
        let probe = out.solve(&vec![Complex64::new(1.0, 0.0); out.n])?;
        if let Some(index) = probe.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SolverError::Singular { index });
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        if b.len() != self.n {
            return Err(SolverError::Dimension { expected: self.n, got: b.len() });
        }
        let rhs = faer::Mat::<Complex64>::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        Ok((0..self.n).map(|i| x[(i, 0)]).collect())
    }
}

/// Solves `A x = b` by sparse LU.
pub fn direct_solve(a: &SparseComplex, b: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
    SparseLu::factor(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{norm2, CsrMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let id = SparseComplex::identity(5);
        let b: Vec<_> = (0..5).map(|i| c(i as f64, -1.0)).collect();
        assert_eq!(direct_solve(&id, &b).unwrap(), b);
    }

    #[test]
    fn shifted_spd_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 60;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, c(4.0, 0.5)));
            for j in [i + 1, i + 7] {
                if j < n {
                    let v = rng.gen_range(-1.0..1.0);
                    trip.push((i, j, c(v, 0.0)));
                    trip.push((j, i, c(v, 0.0)));
                }
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &trip).unwrap();
        let b: Vec<_> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let x = direct_solve(&a, &b).unwrap();
        let r: Vec<_> = a.matvec(&x).iter().zip(&b).map(|(ax, bi)| ax - bi).collect();
        assert!(norm2(&r) / norm2(&b) <= 1e-12);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_triplets(3, 3, &[(0, 0, c(1.0, 0.0)), (1, 1, c(1.0, 0.0))]).unwrap();
        assert!(matches!(SparseLu::factor(&a), Err(SolverError::Singular { .. })));
    }
}

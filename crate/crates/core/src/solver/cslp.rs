use num_complex::Complex64;

use super::{CsrMatrix, SolverError, SparseComplex, SparseLu};
use super::gmres::Preconditioner;

/// `β = factor / k`.
pub fn shift_for(k: f64, factor: f64) -> f64 {
    factor / k
}

/// Factorized `Ã = A − iβM`.
#[derive(Debug)]
pub struct CslpPreconditioner {
    beta: f64,
    lu: SparseLu,
}

impl CslpPreconditioner {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn apply(&self, r: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        self.lu.solve(r)
    }
}

impl Preconditioner for CslpPreconditioner {
    fn apply(&self, r: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        self.lu.solve(r)
    }

    fn name(&self) -> String {
        format!("cslp-lu(beta={:e})", self.beta)
    }
}

pub fn build_cslp(a: &SparseComplex, mass: &SparseComplex, beta: f64) -> Result<CslpPreconditioner, SolverError> {
    if a.nrows() != mass.nrows() || a.ncols() != mass.ncols() {
        return Err(SolverError::Dimension { expected: a.nrows(), got: mass.nrows() });
    }
    if !(beta >= 0.0) {
        return Err(SolverError::Config(format!("shift must be nonnegative, got {beta}")));
    }
    let shifted = CsrMatrix::linear_combination(&[(Complex64::new(1.0, 0.0), a), (Complex64::new(0.0, -beta), mass)])?;
    Ok(CslpPreconditioner { beta, lu: SparseLu::factor(&shifted)? })
}

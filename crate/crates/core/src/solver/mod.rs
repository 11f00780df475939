//! Sparse complex linear algebra: CSR storage, sparse LU, the complex shifted
//! Laplacian preconditioner and restarted GMRES.

mod cslp;
mod gmres;
mod lu;
pub mod matrix_market;
mod sparse;

pub use cslp::{build_cslp, shift_for, CslpPreconditioner};
pub use gmres::{gmres, GmresConfig, GmresOutcome, IdentityPreconditioner, PrecondSide, Preconditioner, SolveReport};
pub use lu::{direct_solve, SparseLu};
pub use sparse::{norm2, CsrMatrix, Scalar, SparseComplex, SparseReal};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("malformed sparse matrix: {0}")]
    Structure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is singular (zero pivot at elimination step {index})")]
    Singular { index: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("invalid solver setting: {0}")]
    Config(String),
    #[error("matrix market line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

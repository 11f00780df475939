//! Compressed sparse row storage.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;

use rayon::prelude::*;

use super::SolverError;

const PAR_ROWS: usize = 4096;

pub trait Scalar: Copy + Zero + Add<Output = Self> + Mul<Output = Self> + Send + Sync + std::fmt::Debug + PartialEq {}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// CSR matrix with sorted, duplicate-free column indices in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

pub type SparseComplex = CsrMatrix<Complex64>;
pub type SparseReal = CsrMatrix<f64>;

impl<T: Scalar> CsrMatrix<T> {
    /// Builds from raw CSR arrays, checking the structural invariants.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self, SolverError> {
        let bad = |m: &str| Err(SolverError::Structure(m.to_string()));
        if row_ptr.len() != nrows + 1 || row_ptr[0] != 0 || *row_ptr.last().unwrap() != col_idx.len() {
            return bad("row pointer length or bounds");
        }
        if col_idx.len() != values.len() {
            return bad("column index and value arrays differ in length");
        }
        for r in 0..nrows {
            if row_ptr[r + 1] < row_ptr[r] {
                return bad("row pointers must be nondecreasing");
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[1] <= w[0]) || cols.iter().any(|&c| c >= ncols) {
                return bad("column indices must be sorted, unique and in range");
            }
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self, SolverError> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(SolverError::Structure(format!("entry ({r}, {c}) outside {nrows}x{ncols}")));
            }
            counts[r + 1] += 1;
        }
        for r in 0..nrows {
            counts[r + 1] += counts[r];
        }
        let mut slots: Vec<(usize, T)> = vec![(0, T::zero()); triplets.len()];
        let mut fill = counts.clone();
        for &(r, c, v) in triplets {
            slots[fill[r]] = (c, v);
            fill[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let row = &mut slots[counts[r]..counts[r + 1]];
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                    let last = values.last_mut().unwrap();
                    *last = *last + v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn identity(n: usize) -> Self
    where
        T: From<f64>,
    {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::from(1.0); n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `(col, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::zero(),
        }
    }

    /// Stored entries as triplets, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        (0..self.nrows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        let row_dot = |r: usize| self.row(r).fold(T::zero(), |acc, (c, v)| acc + v * x[c]);
        if self.nrows >= PAR_ROWS {
            (0..self.nrows).into_par_iter().map(row_dot).collect()
        } else {
            (0..self.nrows).map(row_dot).collect()
        }
    }

    /// Block with the given rows and columns, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.ncols];
        for (local, &g) in cols.iter().enumerate() {
            map[g] = local;
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut buf: Vec<(usize, T)> = Vec::new();
        for &r in rows {
            buf.clear();
            buf.extend(self.row(r).filter(|(c, _)| map[*c] != usize::MAX).map(|(c, v)| (map[c], v)));
            buf.sort_by_key(|e| e.0);
            for &(c, v) in &buf {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows: rows.len(), ncols: cols.len(), row_ptr, col_idx, values }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Linear combination `Σ c_i A_i` of same-shaped matrices.
    pub fn linear_combination<U: Scalar>(terms: &[(U, &CsrMatrix<T>)]) -> Result<CsrMatrix<U>, SolverError>
    where
        U: Mul<T, Output = U>,
    {
        let Some(first) = terms.first() else {
            return Err(SolverError::Structure("empty linear combination".into()));
        };
        let (nr, nc) = (first.1.nrows, first.1.ncols);
        let mut trip = Vec::new();
        for (coef, m) in terms {
            if m.nrows != nr || m.ncols != nc {
                return Err(SolverError::Dimension { expected: nr, got: m.nrows });
            }
            trip.extend(m.triplets().into_iter().map(|(r, c, v)| (r, c, *coef * v)));
        }
        CsrMatrix::from_triplets(nr, nc, &trip)
    }
}

impl CsrMatrix<f64> {
    pub fn to_complex(&self) -> SparseComplex {
        self.map(|v| Complex64::new(v, 0.0))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.nrows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }
}

impl SparseComplex {
    /// Largest `|a_ij - a_ji|` (transpose, no conjugation).
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.nrows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.nrows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Column-compressed copy for the sparse LU backend.
    pub(crate) fn to_faer(&self) -> Result<faer::sparse::SparseColMat<usize, Complex64>, SolverError> {
        let trip: Vec<faer::sparse::Triplet<usize, usize, Complex64>> = self
            .triplets()
            .into_iter()
            .map(|(r, c, v)| faer::sparse::Triplet::new(r, c, v))
            .collect();
        faer::sparse::SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trip)
            .map_err(|e| SolverError::Structure(format!("{e:?}")))
    }
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

use num_complex::Complex64;

use crate::solver::{CsrMatrix, SparseComplex, SparseReal};

use super::{AssemblyError, DofPartition, GlobalMatrices};

type C = Complex64;

/// `S`, `M`, `E` restricted to `I₀ × I₀`, plus their `I₀ × I_g` coupling blocks.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub stiffness: SparseReal,
    pub mass: SparseReal,
    pub boundary: SparseReal,
    pub coupling_stiffness: SparseReal,
    pub coupling_mass: SparseReal,
    pub coupling_boundary: SparseReal,
    pub partition: DofPartition,
}

/// Assembled linear system over the free dofs.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    /// `A = S − k²M + ikE` on `I₀ × I₀`.
    pub a: SparseComplex,
    pub b: Vec<C>,
    /// Fixed coefficients on `I_g`.
    pub dirichlet_values: Vec<C>,
    pub k: f64,
}

/// `S − k²M + ikE` from matching blocks.
fn helmholtz(s: &SparseReal, m: &SparseReal, e: &SparseReal, k: f64) -> Result<SparseComplex, AssemblyError> {
    Ok(CsrMatrix::linear_combination(&[
        (C::new(1.0, 0.0), s),
        (C::new(-k * k, 0.0), m),
        (C::new(0.0, k), e),
    ])?)
}

impl SystemMatrices {
    pub fn restrict(global: &GlobalMatrices, partition: DofPartition) -> Result<Self, AssemblyError> {
        let n = global.stiffness.nrows();
        if partition.total() != n {
            return Err(AssemblyError::Dimension { expected: n, got: partition.total() });
        }
        let (f, g) = (&partition.free, &partition.dirichlet);
        Ok(Self {
            stiffness: global.stiffness.submatrix(f, f),
            mass: global.mass.submatrix(f, f),
            boundary: global.boundary.submatrix(f, f),
            coupling_stiffness: global.stiffness.submatrix(f, g),
            coupling_mass: global.mass.submatrix(f, g),
            coupling_boundary: global.boundary.submatrix(f, g),
            partition,
        })
    }

    pub fn operator(&self, k: f64) -> Result<SparseComplex, AssemblyError> {
        helmholtz(&self.stiffness, &self.mass, &self.boundary, k)
    }

    /// Entries `a_{p,q}` with `p ∈ I₀`, `q ∈ I_g`.
    pub fn coupling(&self, k: f64) -> Result<SparseComplex, AssemblyError> {
        helmholtz(&self.coupling_stiffness, &self.coupling_mass, &self.coupling_boundary, k)
    }
}

/// System for constant Dirichlet data `C` on the aperture. Every `α_q`,
/// `q ∈ I_g`, is set to `C`, so by the partition of unity `uʰ = C` on `Γ_D`.
pub fn build_system(sys: &SystemMatrices, k: f64, dirichlet: C) -> Result<LinearSystem, AssemblyError> {
    let values = vec![dirichlet; sys.partition.n_dirichlet()];
    build_system_with(sys, k, &values, None)
}

/// System with prescribed Dirichlet coefficients and an optional load vector
/// over all `N` dofs: `b_p = f_p − Σ_{q∈I_g} a_{p,q} α_q` for `p ∈ I₀`.
pub fn build_system_with(
    sys: &SystemMatrices,
    k: f64,
    dirichlet_values: &[C],
    load: Option<&[C]>,
) -> Result<LinearSystem, AssemblyError> {
    let part = &sys.partition;
    if part.n_dirichlet() == 0 {
        return Err(AssemblyError::NoDirichletDofs);
    }
    if dirichlet_values.len() != part.n_dirichlet() {
        return Err(AssemblyError::Dimension { expected: part.n_dirichlet(), got: dirichlet_values.len() });
    }
    let lift = sys.coupling(k)?.matvec(dirichlet_values);
    let mut b: Vec<C> = lift.iter().map(|v| -v).collect();
    if let Some(f) = load {
        if f.len() != part.total() {
            return Err(AssemblyError::Dimension { expected: part.total(), got: f.len() });
        }
        for (bp, &q) in b.iter_mut().zip(&part.free) {
            *bp += f[q];
        }
    }
    Ok(LinearSystem { a: sys.operator(k)?, b, dirichlet_values: dirichlet_values.to_vec(), k })
}

impl LinearSystem {
    pub fn n_free(&self) -> usize {
        self.b.len()
    }

    /// All `N` coefficients from a free-dof solution.
    pub fn full_coefficients(&self, partition: &DofPartition, free: &[C]) -> Result<Vec<C>, AssemblyError> {
        partition.scatter(free, &self.dirichlet_values)
    }
}

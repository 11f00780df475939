use crate::geometry::DomainConfig;
use crate::spline::TensorProductSpace;

use super::AssemblyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofSlot {
    Free(usize),
    Dirichlet(usize),
}

/// Split of the flattened indices into free dofs `I₀` and Dirichlet dofs `I_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DofPartition {
    pub free: Vec<usize>,
    pub dirichlet: Vec<usize>,
    slots: Vec<DofSlot>,
}

impl DofPartition {
    pub fn from_dirichlet(total: usize, mut dirichlet: Vec<usize>) -> Result<Self, AssemblyError> {
        dirichlet.sort_unstable();
        dirichlet.dedup();
        if dirichlet.is_empty() {
            return Err(AssemblyError::NoDirichletDofs);
        }
        if let Some(&q) = dirichlet.iter().find(|&&q| q >= total) {
            return Err(AssemblyError::Dimension { expected: total, got: q });
        }
        let mut slots = vec![DofSlot::Free(0); total];
        for (g, &q) in dirichlet.iter().enumerate() {
            slots[q] = DofSlot::Dirichlet(g);
        }
        let mut free = Vec::with_capacity(total - dirichlet.len());
        for (q, slot) in slots.iter_mut().enumerate() {
            if let DofSlot::Free(f) = slot {
                *f = free.len();
                free.push(q);
            }
        }
        Ok(Self { free, dirichlet, slots })
    }

    pub fn total(&self) -> usize {
        self.slots.len()
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_dirichlet(&self) -> usize {
        self.dirichlet.len()
    }

    pub fn slot(&self, q: usize) -> DofSlot {
        self.slots[q]
    }

    /// Full coefficient vector from free values and Dirichlet values.
    pub fn scatter<T: Copy>(&self, free: &[T], dirichlet: &[T]) -> Result<Vec<T>, AssemblyError> {
        if free.len() != self.n_free() {
            return Err(AssemblyError::Dimension { expected: self.n_free(), got: free.len() });
        }
        if dirichlet.len() != self.n_dirichlet() {
            return Err(AssemblyError::Dimension { expected: self.n_dirichlet(), got: dirichlet.len() });
        }
        Ok(self
            .slots
            .iter()
            .map(|s| match *s {
                DofSlot::Free(f) => free[f],
                DofSlot::Dirichlet(g) => dirichlet[g],
            })
            .collect())
    }
}

/// `I_g` holds the bottom-row functions `ψ_{i,0}` that do not vanish on the
/// aperture `(ξ_{a⁻}, ξ_{a⁺})`, i.e. whose support meets that open interval.
/// This is the span-based rule with the first index clamped at zero.
pub fn classify_dofs(space: &TensorProductSpace, cfg: &DomainConfig) -> Result<DofPartition, AssemblyError> {
    cfg.validate()?;
    let (lo, hi) = cfg.aperture_params();
    let kv = &space.xi;
    let order = kv.order();
    let t = kv.knots();
    let dirichlet: Vec<usize> = (0..kv.num_basis())
        .filter(|&i| t[i] < hi && t[i + order] > lo)
        .map(|i| space.flat_index(i, 0))
        .collect();
    DofPartition::from_dirichlet(space.dim(), dirichlet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::KnotVector;
    use num_complex::Complex64;

    fn cfg() -> DomainConfig {
        DomainConfig { a: 0.01, r: 0.133, theta: 0.7, dirichlet: Complex64::new(1.0, 0.0), c_sound: 1500.0, frequency: 1e6 }
    }

    fn space(n: usize, m: usize, k: usize) -> TensorProductSpace {
        TensorProductSpace::new(KnotVector::uniform(k, n).unwrap(), KnotVector::uniform(k, m).unwrap())
    }

    #[test]
    fn partition_covers_everything() {
        let s = space(40, 30, 4);
        let p = classify_dofs(&s, &cfg()).unwrap();
        assert_eq!(p.n_free() + p.n_dirichlet(), s.dim());
        assert!(p.dirichlet.iter().all(|&q| s.unflatten(q).1 == 0));
        let full = p.scatter(&vec![0u8; p.n_free()], &vec![1u8; p.n_dirichlet()]).unwrap();
        assert_eq!(full.iter().filter(|&&v| v == 1).count(), p.n_dirichlet());
    }

    #[test]
    fn matches_span_rule() {
        // spans i1, i2 holding ξ_{a∓}; I_g = {i1-k+1, ..., i2} in 0-based span terms
        let s = space(40, 30, 4);
        let c = cfg();
        let (lo, hi) = c.aperture_params();
        let i1 = s.xi.find_span(lo).unwrap();
        let i2 = s.xi.find_span(hi).unwrap();
        let want: Vec<usize> = (i1 - 3..=i2).collect();
        let got: Vec<usize> = classify_dofs(&s, &c).unwrap().dirichlet.iter().map(|&q| s.unflatten(q).0).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn free_functions_vanish_on_aperture() {
        let s = space(40, 30, 4);
        let c = cfg();
        let p = classify_dofs(&s, &c).unwrap();
        let (lo, hi) = c.aperture_params();
        for &q in &p.free {
            let (i, j) = s.unflatten(q);
            if j != 0 {
                continue;
            }
            for k in 0..50 {
                let xi = lo + (hi - lo) * k as f64 / 49.0;
                assert!(s.xi.basis_value(i, xi).unwrap().abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn coarse_mesh_clamps_at_first_function() {
        let s = space(4, 4, 4);
        let mut c = cfg();
        c.a = 0.12;
        let p = classify_dofs(&s, &c).unwrap();
        assert_eq!(p.n_dirichlet(), 4);
        c.a = 0.2;
        assert!(classify_dofs(&s, &c).is_err());
    }
}

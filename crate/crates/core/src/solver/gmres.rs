use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{norm2, SolverError, SparseComplex};

type C = Complex64;

pub trait Preconditioner {
    /// `P⁻¹ r`.
    fn apply(&self, r: &[C]) -> Result<Vec<C>, SolverError>;

    fn name(&self) -> String;

    /// Iterations spent inside one application (zero for direct inversion).
    fn inner_iterations(&self) -> usize {
        0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[C]) -> Result<Vec<C>, SolverError> {
        Ok(r.to_vec())
    }

    fn name(&self) -> String {
        "none".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrecondSide {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GmresConfig {
    pub restart: usize,
    pub tol: f64,
    /// Restart cycles allowed before giving up.
    pub max_outer: usize,
    pub side: PrecondSide,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { restart: 50, tol: 1e-8, max_outer: 100, side: PrecondSide::Left }
    }
}

impl GmresConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.restart < 1 || !(self.tol > 0.0) || self.max_outer < 1 {
            return Err(SolverError::Config(format!(
                "restart={} tol={} max_outer={}",
                self.restart, self.tol, self.max_outer
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub side: PrecondSide,
    pub preconditioner: String,
    /// Restart cycles started.
    pub outer_iterations: usize,
    /// Arnoldi steps over all cycles.
    pub krylov_iterations: usize,
    /// Work inside preconditioner applications.
    pub inner_iterations: usize,
    /// `‖P⁻¹(b − Ax)‖ / ‖P⁻¹b‖` for left preconditioning, `‖b − Ax‖/‖b‖` otherwise.
    pub preconditioned_residual: f64,
    pub true_residual: f64,
    /// Residual estimate after every Arnoldi step (index 0 is the initial one).
    pub residual_history: Vec<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C>,
    pub report: SolveReport,
}

/// Rotation `[c s; −s̄ c]` that zeroes the second entry of `(a, b)`.
fn givens(a: C, b: C) -> (f64, C) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, C::new(1.0, 0.0));
    }
    let d = na.hypot(nb);
    (na / d, (a / na) * b.conj() / d)
}

fn rotate(c: f64, s: C, x: C, y: C) -> (C, C) {
    (x * c + s * y, -s.conj() * x + y * c)
}

fn dot(u: &[C], v: &[C]) -> C {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn residual(a: &SparseComplex, b: &[C], x: &[C]) -> Vec<C> {
    a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

/// Restarted GMRES with modified Gram–Schmidt Arnoldi and Givens rotations.
///
/// Stops once the monitored relative residual drops to `config.tol`. Failure
/// to converge is reported through `report.converged`, with the last (and
/// lowest-residual) iterate returned.
pub fn gmres(
    a: &SparseComplex,
    b: &[C],
    x0: Option<&[C]>,
    precond: &dyn Preconditioner,
    config: &GmresConfig,
) -> Result<GmresOutcome, SolverError> {
    config.validate()?;
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(SolverError::Dimension { expected: n, got: b.len() });
    }
    let start = Instant::now();
    let left = config.side == PrecondSide::Left;
    let mut inner = 0usize;
    let apply = |r: &[C], inner: &mut usize| -> Result<Vec<C>, SolverError> {
        *inner += precond.inner_iterations();
        precond.apply(r)
    };
    let measure = |r: Vec<C>, inner: &mut usize| -> Result<Vec<C>, SolverError> {
        if left {
            apply(&r, inner)
        } else {
            Ok(r)
        }
    };

    let mut x = match x0 {
        Some(v) if v.len() == n => v.to_vec(),
        Some(v) => return Err(SolverError::Dimension { expected: n, got: v.len() }),
        None => vec![C::new(0.0, 0.0); n],
    };
    let bnorm = norm2(&measure(b.to_vec(), &mut inner)?);
    let mut history = Vec::new();
    let mut outer = 0;
    let mut krylov = 0;
    let mut converged = false;
    let mut rel = 0.0;

    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        converged = true;
        history.push(0.0);
    } else {
        let m = config.restart;
        loop {
            let z = measure(residual(a, b, &x), &mut inner)?;
            let beta = norm2(&z);
            rel = beta / bnorm;
            if history.is_empty() {
                history.push(rel);
            }
            if rel <= config.tol {
                converged = true;
                break;
            }
            if outer == config.max_outer {
                break;
            }
            outer += 1;

            let mut basis: Vec<Vec<C>> = vec![z.iter().map(|v| v / beta).collect()];
            let mut h = vec![vec![C::new(0.0, 0.0); m]; m + 1];
            let mut rots: Vec<(f64, C)> = Vec::with_capacity(m);
            let mut g = vec![C::new(0.0, 0.0); m + 1];
            g[0] = C::new(beta, 0.0);
            let mut steps = 0;
            for j in 0..m {
                let mut w = if left {
                    apply(&a.matvec(&basis[j]), &mut inner)?
                } else {
                    a.matvec(&apply(&basis[j], &mut inner)?)
                };
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(v, &w);
                    h[i][j] = hij;
                    w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= hij * vk);
                }
                let hnext = norm2(&w);
                h[j + 1][j] = C::new(hnext, 0.0);
                for (i, &(c, s)) in rots.iter().enumerate() {
                    let (p, q) = rotate(c, s, h[i][j], h[i + 1][j]);
                    h[i][j] = p;
                    h[i + 1][j] = q;
                }
                let (c, s) = givens(h[j][j], h[j + 1][j]);
                let (p, _) = rotate(c, s, h[j][j], h[j + 1][j]);
                h[j][j] = p;
                h[j + 1][j] = C::new(0.0, 0.0);
                let (gj, gj1) = rotate(c, s, g[j], g[j + 1]);
                g[j] = gj;
                g[j + 1] = gj1;
                rots.push((c, s));
                steps = j + 1;
                krylov += 1;
                let est = g[j + 1].norm() / bnorm;
                history.push(est);
                let breakdown = hnext <= 1e-14 * beta;
                if est <= config.tol || breakdown {
                    break;
                }
                basis.push(w.iter().map(|v| v / hnext).collect());
            }

            let mut y = vec![C::new(0.0, 0.0); steps];
            for i in (0..steps).rev() {
                let mut s = g[i];
                for k in i + 1..steps {
                    s -= h[i][k] * y[k];
                }
                y[i] = s / h[i][i];
            }
            let mut update = vec![C::new(0.0, 0.0); n];
            for (yi, v) in y.iter().zip(&basis) {
                update.iter_mut().zip(v).for_each(|(u, vk)| *u += yi * vk);
            }
            if !left {
                update = apply(&update, &mut inner)?;
            }
            x.iter_mut().zip(&update).for_each(|(xi, u)| *xi += u);
        }
    }

    let r = residual(a, b, &x);
    let bn = norm2(b);
    let true_residual = if bn == 0.0 { norm2(&r) } else { norm2(&r) / bn };
    let report = SolveReport {
        converged,
        side: config.side,
        preconditioner: precond.name(),
        outer_iterations: outer,
        krylov_iterations: krylov,
        inner_iterations: inner,
        preconditioned_residual: rel,
        true_residual,
        residual_history: history,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(GmresOutcome { x, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{build_cslp, CsrMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(n: usize, seed: u64) -> (SparseComplex, Vec<C>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (n as f64).sqrt();
                t.push((i, j, if i == j { v + C::new(3.0, 1.0) } else { v }));
            }
        }
        let b = (0..n).map(|_| C::new(rng.gen(), rng.gen())).collect();
        (CsrMatrix::from_triplets(n, n, &t).unwrap(), b)
    }

    /// Dense Gaussian elimination, independent of the sparse LU.
    fn dense_solve(a: &SparseComplex, b: &[C]) -> Vec<C> {
        let n = b.len();
        let mut m: Vec<Vec<C>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect();
        let mut x = b.to_vec();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm())).unwrap();
            m.swap(c, p);
            x.swap(c, p);
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    let v = m[c][k];
                    m[r][k] -= f * v;
                }
                let v = x[c];
                x[r] -= f * v;
            }
        }
        for c in (0..n).rev() {
            let s: C = (c + 1..n).map(|k| m[c][k] * x[k]).sum();
            x[c] = (x[c] - s) / m[c][c];
        }
        x
    }

    fn rel_err(x: &[C], y: &[C]) -> f64 {
        let d: Vec<C> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        norm2(&d) / norm2(y)
    }

    #[test]
    fn identity_converges_in_one_step() {
        let id = SparseComplex::identity(10);
        let b: Vec<C> = (0..10).map(|i| C::new(i as f64, 1.0)).collect();
        let out = gmres(&id, &b, None, &IdentityPreconditioner, &GmresConfig::default()).unwrap();
        assert!(out.report.converged);
        assert_eq!(out.report.krylov_iterations, 1);
        assert!(rel_err(&out.x, &b) < 1e-14);
    }

    #[test]
    fn matches_dense_solver() {
        let (a, b) = random_system(50, 11);
        let want = dense_solve(&a, &b);
        for side in [PrecondSide::Left, PrecondSide::Right] {
            let cfg = GmresConfig { tol: 1e-12, side, ..Default::default() };
            let out = gmres(&a, &b, None, &IdentityPreconditioner, &cfg).unwrap();
            assert!(out.report.converged);
            assert!(rel_err(&out.x, &want) <= 1e-8, "{side:?}");
            assert!(out.report.true_residual <= 1e-11);
        }
    }

    #[test]
    fn residual_is_monotone_within_cycles() {
        let (a, b) = random_system(40, 5);
        let cfg = GmresConfig { restart: 7, tol: 1e-12, ..Default::default() };
        let out = gmres(&a, &b, None, &IdentityPreconditioner, &cfg).unwrap();
        assert!(out.report.outer_iterations > 1);
        assert!(out.report.residual_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn unshifted_cslp_is_an_exact_solve() {
        let (a, b) = random_system(30, 9);
        let p = build_cslp(&a, &SparseComplex::identity(30), 0.0).unwrap();
        let out = gmres(&a, &b, None, &p, &GmresConfig::default()).unwrap();
        assert!(out.report.converged);
        assert_eq!(out.report.outer_iterations, 1);
        assert_eq!(out.report.krylov_iterations, 1);
    }

    #[test]
    fn nonconvergence_is_flagged() {
        let (a, b) = random_system(40, 2);
        let cfg = GmresConfig { restart: 2, max_outer: 2, tol: 1e-14, ..Default::default() };
        let out = gmres(&a, &b, None, &IdentityPreconditioner, &cfg).unwrap();
        assert!(!out.report.converged);
        assert_eq!(out.report.outer_iterations, 2);
        assert!(out.report.preconditioned_residual < out.report.residual_history[0]);
    }

    #[test]
    fn zero_rhs_and_bad_config() {
        let id = SparseComplex::identity(3);
        let out = gmres(&id, &[C::new(0.0, 0.0); 3], None, &IdentityPreconditioner, &GmresConfig::default()).unwrap();
        assert!(out.report.converged && out.x.iter().all(|v| v.norm() == 0.0));
        let bad = GmresConfig { restart: 0, ..Default::default() };
        assert!(gmres(&id, &[C::new(1.0, 0.0); 3], None, &IdentityPreconditioner, &bad).is_err());
        assert!(gmres(&id, &[C::new(1.0, 0.0); 2], None, &IdentityPreconditioner, &GmresConfig::default()).is_err());
    }
}

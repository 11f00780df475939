use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{AssemblyError, DiscreteSpace};
use crate::geometry::DomainConfig;

use super::AppError;

type C = Complex64;

/// Discrete solution `uʰ = Σ α_q ψ_q` over all `N` coefficients.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub coeffs: Vec<C>,
    pub space: DiscreteSpace,
    pub k: f64,
}

/// Field value at a parameter point and its image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub xi: f64,
    pub eta: f64,
    pub x: f64,
    pub y: f64,
    pub value: C,
}

impl FieldSample {
    /// `|uʰ| = ((Re uʰ)² + (Im uʰ)²)^{1/2}`.
    pub fn abs(&self) -> f64 {
        self.value.re.hypot(self.value.im)
    }
}

impl SolutionField {
    pub fn new(coeffs: Vec<C>, space: DiscreteSpace, k: f64) -> Result<Self, AppError> {
        if coeffs.len() != space.dim() {
            return Err(AssemblyError::Dimension { expected: space.dim(), got: coeffs.len() }.into());
        }
        Ok(Self { coeffs, space, k })
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Result<C, AppError> {
        Ok(self.space.eval_function(&self.coeffs, xi, eta)?)
    }

    pub fn sample(&self, xi: f64, eta: f64) -> Result<FieldSample, AppError> {
        let p = self.space.geometry.eval_map(xi, eta)?;
        Ok(FieldSample { xi, eta, x: p[0], y: p[1], value: self.eval(xi, eta)? })
    }
}

pub fn eval_field(sol: &SolutionField, points: &[(f64, f64)]) -> Result<Vec<C>, AppError> {
    points.par_iter().map(|&(xi, eta)| sol.eval(xi, eta)).collect()
}

/// Uniform parametric grid, `ξ` fastest.
pub fn sample_grid(sol: &SolutionField, nx: usize, ny: usize) -> Result<Vec<FieldSample>, AppError> {
    let pts: Vec<(f64, f64)> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i as f64 / (nx - 1) as f64, j as f64 / (ny - 1) as f64)))
        .collect();
    pts.par_iter().map(|&(xi, eta)| sol.sample(xi, eta)).collect()
}

/// Whether `F(1/2, η)` lies on the symmetry axis `x = 0` for sampled `η`.
fn axis_is_midline(sol: &SolutionField, samples: usize) -> Result<bool, AppError> {
    for s in 0..samples {
        let eta = s as f64 / (samples - 1) as f64;
        if sol.space.geometry.eval_map(0.5, eta)?[0].abs() > 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ξ` with `F(ξ, η).x = 0`, by bisection (`x` increases along each `η` line).
fn axis_preimage(sol: &SolutionField, eta: f64) -> Result<f64, AppError> {
    let g = &sol.space.geometry;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g.eval_map(mid, eta)?[0] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Field along `x = 0` from the transducer face to the arc. The preimage is
/// `ξ = 1/2` when the map is symmetric; otherwise it is found per `η`.
/// Returns the samples and whether the symmetric shortcut was used.
pub fn axis_profile(sol: &SolutionField, samples: usize) -> Result<(Vec<FieldSample>, bool), AppError> {
    let symmetric = axis_is_midline(sol, samples.min(101))?;
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|s| {
            let eta = s as f64 / (samples - 1) as f64;
            let xi = if symmetric { Ok(0.5) } else { axis_preimage(sol, eta) };
            xi.map(|xi| (xi, eta))
        })
        .collect::<Result<_, _>>()?;
    let out = pts.par_iter().map(|&(xi, eta)| sol.sample(xi, eta)).collect::<Result<_, _>>()?;
    Ok((out, symmetric))
}

/// Field along the diameter `y = 0`, `−r ≤ x ≤ r`.
pub fn bottom_profile(sol: &SolutionField, samples: usize) -> Result<Vec<FieldSample>, AppError> {
    (0..samples)
        .into_par_iter()
        .map(|s| sol.sample(s as f64 / (samples - 1) as f64, 0.0))
        .collect()
}

/// `max |uʰ − C|` over `samples` points of the aperture `Γ_D`.
pub fn dirichlet_deviation(sol: &SolutionField, cfg: &DomainConfig, samples: usize) -> Result<f64, AppError> {
    let (lo, hi) = cfg.aperture_params();
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let xi = lo + (hi - lo) * s as f64 / (samples - 1) as f64;
        worst = worst.max((sol.eval(xi, 0.0)? - cfg.dirichlet).norm());
    }
    Ok(worst)
}

/// Indices of strict interior local maxima of a sampled sequence.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .collect()
}

/// Moving average of `values(s)` over windows of length `window` in `s`,
/// after linear resampling onto `samples` uniform points. Only full windows
/// are kept, so the result covers `[s₀ + window/2, s_end − window/2]`.
///
/// A window of half a wavelength removes the `λ/2`-periodic ripple that a
/// partially reflecting outer boundary superimposes on a travelling wave.
pub fn moving_average(coords: &[f64], values: &[f64], window: f64, samples: usize) -> (Vec<f64>, Vec<f64>) {
    let (s0, s1) = (coords[0], coords[coords.len() - 1]);
    let h = (s1 - s0) / (samples - 1) as f64;
    let mut j = 0;
    let resampled: Vec<f64> = (0..samples)
        .map(|i| {
            let s = s0 + i as f64 * h;
            while j + 2 < coords.len() && coords[j + 1] < s {
                j += 1;
            }
            let t = ((s - coords[j]) / (coords[j + 1] - coords[j])).clamp(0.0, 1.0);
            values[j] + t * (values[j + 1] - values[j])
        })
        .collect();
    let w = ((window / h).round() as usize).max(1);
    if w > samples {
        return (Vec::new(), Vec::new());
    }
    let mut sum: f64 = resampled[..w].iter().sum();
    let mut s_out = Vec::with_capacity(samples - w + 1);
    let mut v_out = Vec::with_capacity(samples - w + 1);
    for start in 0..=samples - w {
        if start > 0 {
            sum += resampled[start + w - 1] - resampled[start - 1];
        }
        s_out.push(s0 + (start as f64 + 0.5 * (w - 1) as f64) * h);
        v_out.push(sum / w as f64);
    }
    (s_out, v_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::SpaceSpec;

    fn field(coeffs: impl Fn(usize) -> C) -> SolutionField {
        let cfg = DomainConfig { a: 0.02, r: 0.1, theta: 0.6, dirichlet: C::new(1.0, 0.0), c_sound: 1500.0, frequency: 1e5 };
        let ds = DiscreteSpace::semicircle(&cfg, &SpaceSpec { order_xi: 3, order_eta: 4, n: 9, m: 7, align_aperture: false }).unwrap();
        let c = (0..ds.dim()).map(coeffs).collect();
        SolutionField::new(c, ds, 1.0).unwrap()
    }

    #[test]
    fn unit_coefficients_give_one() {
        let f = field(|_| C::new(1.0, 0.0));
        let pts = [(0.0, 0.0), (0.25, 0.5), (1.0, 1.0), (0.7, 0.1)];
        for v in eval_field(&f, &pts).unwrap() {
            assert!((v - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn single_coefficient_is_basis_product() {
        let probe = field(|_| C::new(0.0, 0.0));
        let q = probe.space.space.flat_index(3, 2);
        let f = field(|i| if i == q { C::new(0.0, 2.0) } else { C::new(0.0, 0.0) });
        let (kx, ky) = (&f.space.space.xi, &f.space.space.eta);
        for (xi, eta) in [(0.3, 0.3), (0.45, 0.2), (0.9, 0.9)] {
            let want = 2.0 * kx.basis_value(3, xi).unwrap() * ky.basis_value(2, eta).unwrap();
            let got = f.eval(xi, eta).unwrap();
            assert!((got.im - want).abs() < 1e-15 && got.re == 0.0, "{got} {want}");
        }
    }

    #[test]
    fn profiles_agree_with_pointwise_evaluation() {
        let f = field(|i| C::new((i as f64).sin(), (i as f64).cos()));
        let (axis, sym) = axis_profile(&f, 21).unwrap();
        assert!(sym);
        for s in &axis {
            assert!(s.x.abs() <= 1e-10);
            assert_eq!(s.value, f.eval(0.5, s.eta).unwrap());
        }
        let bottom = bottom_profile(&f, 11).unwrap();
        assert!((bottom[0].x + 0.1).abs() < 1e-14 && (bottom[10].x - 0.1).abs() < 1e-14);
        assert!(bottom.iter().all(|s| s.y.abs() < 1e-14));
    }

    #[test]
    fn root_finding_recovers_midline() {
        let f = field(|_| C::new(1.0, 0.0));
        for eta in [0.0, 0.4, 1.0] {
            assert!((axis_preimage(&f, eta).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn local_maxima_counts() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 2.0, 1.0]), vec![1, 3]);
        assert!(local_maxima(&[1.0, 2.0, 3.0]).is_empty());
        assert_eq!(local_minima(&[1.0, 0.0, 1.0, 1.0]), vec![1]);
    }

    #[test]
    fn half_wavelength_average_removes_ripple() {
        let lambda = 0.1;
        let k = 2.0 * std::f64::consts::PI / lambda;
        let s: Vec<f64> = (0..3001).map(|i| (i as f64 / 3000.0).powf(1.1)).collect();
        let v: Vec<f64> = s.iter().map(|&y| 1.0 + y + 0.05 * (2.0 * k * y).cos()).collect();
        let (sc, vc) = moving_average(&s, &v, lambda / 2.0, 4001);
        assert!((sc[0] - lambda / 4.0).abs() < 1e-3);
        for (y, u) in sc.iter().zip(&vc) {
            assert!((u - 1.0 - y).abs() < 2e-3, "{y} {u}");
        }
        assert!(local_maxima(&vc).is_empty());
        assert!(!local_maxima(&v).is_empty());
    }
}

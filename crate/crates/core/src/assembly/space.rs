use num_complex::Complex64;

use crate::geometry::{coons_patch, make_semicircle_boundary, CoonsSurface, DomainConfig};
use crate::spline::{BasisEval, KnotVector, TensorProductSpace};

use super::quadrature::SpanRule;
use super::AssemblyError;

/// Discretization space on the parametric square together with the map `F`.
/// Physical basis functions are `B_{i,j} ∘ F⁻¹`; every integral is pulled
/// back to `[0,1]²`, so `F⁻¹` is never evaluated.
#[derive(Debug, Clone)]
pub struct DiscreteSpace {
    pub space: TensorProductSpace,
    pub geometry: CoonsSurface,
}

/// How the discretization knot vectors are laid out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec {
    pub order_xi: usize,
    pub order_eta: usize,
    pub n: usize,
    pub m: usize,
    /// Put breakpoints at the aperture ends `ξ_{a±}`.
    pub align_aperture: bool,
}

/// Fraction of the local span width within which an existing breakpoint is
/// moved onto a target instead of inserting a new one.
const SNAP_FRACTION: f64 = 0.25;

/// Breakpoints of `kv` with every target turned into a breakpoint, either by
/// moving a nearby free breakpoint or by inserting a new one. Targets are
/// `(value, multiplicity)`; a target breakpoint gets at least that
/// multiplicity, capped at `order − 1`.
pub fn align_breakpoints(kv: &KnotVector, targets: &[(f64, usize)]) -> Result<KnotVector, AssemblyError> {
    let mut bps = kv.breakpoints();
    let mut mult: Vec<usize> = bps.iter().map(|&b| kv.multiplicity(b)).collect();
    let mut locked = vec![false; bps.len()];
    locked[0] = true;
    *locked.last_mut().unwrap() = true;
    for &(t, want) in targets {
        if !(t > 0.0 && t < 1.0) {
            continue;
        }
        let pos = bps.partition_point(|&b| b < t);
        if (bps[pos] - t).abs() <= 1e-14 {
            locked[pos] = true;
            mult[pos] = mult[pos].max(want);
            continue;
        }
        let width = bps[pos] - bps[pos - 1];
        let (near, dist) = if t - bps[pos - 1] <= bps[pos] - t { (pos - 1, t - bps[pos - 1]) } else { (pos, bps[pos] - t) };
        // slack so that mirror-image targets get mirror-image decisions
        if !locked[near] && dist <= SNAP_FRACTION * width * (1.0 + 1e-9) {
            bps[near] = t;
            locked[near] = true;
            mult[near] = mult[near].max(want);
        } else {
            bps.insert(pos, t);
            locked.insert(pos, true);
            mult.insert(pos, want.max(1));
        }
    }
    let mut knots = vec![0.0; kv.order()];
    for (&b, &mu) in bps[1..bps.len() - 1].iter().zip(&mult[1..mult.len() - 1]) {
        knots.extend(std::iter::repeat(b).take(mu.min(kv.order() - 1)));
    }
    knots.extend(std::iter::repeat(1.0).take(kv.order()));
    Ok(KnotVector::new(kv.order(), knots)?)
}

/// Interior breakpoints of a geometry knot vector, each with the multiplicity
/// a discretization of order `order` needs so that it is no smoother there
/// than the geometry.
fn geometry_targets(geo: &KnotVector, order: usize) -> Vec<(f64, usize)> {
    let bp = geo.breakpoints();
    bp[1..bp.len() - 1]
        .iter()
        .map(|&b| {
            let continuity = geo.degree() as isize - geo.multiplicity(b) as isize;
            (b, (order as isize - 1 - continuity).max(1) as usize)
        })
        .collect()
}

impl DiscreteSpace {
    pub fn new(space: TensorProductSpace, geometry: CoonsSurface) -> Self {
        Self { space, geometry }
    }

    /// Semicircle geometry with uniform spline spaces of the requested size.
    /// Geometry breakpoints (and, optionally, the aperture ends) are made
    /// breakpoints of the discretization so that no element straddles a
    /// kink of `F` or of the boundary data, and the space is only as smooth
    /// as `F` across them. The resulting basis counts can therefore exceed
    /// `n` and `m` by a few.
    pub fn semicircle(cfg: &DomainConfig, spec: &SpaceSpec) -> Result<Self, AssemblyError> {
        let b = make_semicircle_boundary(cfg)?;
        let geometry = coons_patch(&b.bottom, &b.top, &b.left, &b.right)?;
        let mut xi_targets = geometry_targets(geometry.knots_xi(), spec.order_xi);
        if spec.align_aperture {
            let (lo, hi) = cfg.aperture_params();
            xi_targets.extend([(lo, 1), (hi, 1)]);
        }
        let xi = align_breakpoints(&KnotVector::uniform(spec.order_xi, spec.n)?, &xi_targets)?;
        let eta_targets = geometry_targets(geometry.knots_eta(), spec.order_eta);
        let eta = align_breakpoints(&KnotVector::uniform(spec.order_eta, spec.m)?, &eta_targets)?;
        Ok(Self { space: TensorProductSpace::new(xi, eta), geometry })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `Σ α_q ψ_q` at a parameter point.
    pub fn eval_function(&self, coeffs: &[Complex64], xi: f64, eta: f64) -> Result<Complex64, AssemblyError> {
        if coeffs.len() != self.dim() {
            return Err(AssemblyError::Dimension { expected: self.dim(), got: coeffs.len() });
        }
        let bx = self.space.xi.eval_basis(xi, 0)?;
        let by = self.space.eta.eval_basis(eta, 0)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, vy) in by.indexed_values() {
            for (i, vx) in bx.indexed_values() {
                sum += coeffs[self.space.flat_index(i, j)] * (vx * vy);
            }
        }
        Ok(sum)
    }
}

/// Basis values and first derivatives at every point of every span rule.
pub(crate) fn tabulate(kv: &KnotVector, rules: &[SpanRule]) -> Vec<Vec<BasisEval>> {
    rules
        .iter()
        .map(|r| r.points.iter().map(|&t| kv.eval_basis_in_span(r.span, t, 1)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(theta: f64) -> DomainConfig {
        DomainConfig { a: 0.01, r: 0.133, theta, dirichlet: Complex64::new(1.0, 0.0), c_sound: 1500.0, frequency: 1e6 }
    }

    #[test]
    fn alignment_snaps_or_inserts() {
        let kv = KnotVector::uniform(3, 12).unwrap(); // breakpoints at tenths
        let out = align_breakpoints(&kv, &[(0.41, 1), (0.55, 1), (0.5, 1)]).unwrap();
        let bp = out.breakpoints();
        assert!(bp.contains(&0.41) && bp.contains(&0.55) && bp.contains(&0.5));
        assert!(!bp.contains(&0.4), "0.4 moved onto 0.41");
        assert_eq!(out.num_basis(), 13);
        // existing breakpoints are left alone
        assert_eq!(align_breakpoints(&kv, &[(0.3, 1)]).unwrap(), kv);
    }

    #[test]
    fn mirrored_targets_give_mirrored_knots() {
        for n in 8..300 {
            let kv = KnotVector::uniform(4, n).unwrap();
            for half in [0.0833333333333333, 0.1, 0.125, 1.0 / 6.0, 0.3] {
                let out = align_breakpoints(&kv, &[(0.5, 3), (0.5 - half, 1), (0.5 + half, 1)]).unwrap();
                let bp = out.breakpoints();
                for (a, b) in bp.iter().zip(bp.iter().rev()) {
                    assert!((a + b - 1.0).abs() < 1e-14, "n={n} half={half}");
                }
            }
        }
    }

    #[test]
    fn alignment_keeps_multiplicity() {
        let kv = KnotVector::new(3, vec![0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0]).unwrap();
        let out = align_breakpoints(&kv, &[(0.2, 1)]).unwrap();
        assert_eq!(out.knots(), &[0.0, 0.0, 0.0, 0.2, 0.5, 0.5, 1.0, 1.0, 1.0]);
        let out = align_breakpoints(&kv, &[(0.25, 5), (0.5, 1)]).unwrap();
        assert_eq!(out.knots(), &[0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn semicircle_space_contains_aperture_and_geometry_knots() {
        let c = cfg(PI / 20.0);
        let spec = SpaceSpec { order_xi: 4, order_eta: 4, n: 40, m: 30, align_aperture: true };
        let ds = DiscreteSpace::semicircle(&c, &spec).unwrap();
        let (lo, hi) = c.aperture_params();
        let bp = ds.space.xi.breakpoints();
        for t in [lo, hi, 0.5] {
            assert!(bp.iter().any(|&b| (b - t).abs() < 1e-15), "{t}");
        }
        // the arc is only C⁰ at ξ = 1/2, so the cubic space is too
        assert_eq!(ds.space.xi.multiplicity(0.5), 3);
        assert!(ds.space.xi.num_basis() >= 40 && ds.space.xi.num_basis() <= 45);
        assert_eq!(ds.space.eta.num_basis(), 30);
    }

    #[test]
    fn unit_coefficients_reproduce_one() {
        let spec = SpaceSpec { order_xi: 3, order_eta: 4, n: 9, m: 7, align_aperture: false };
        let ds = DiscreteSpace::semicircle(&cfg(PI / 4.0), &spec).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); ds.dim()];
        for (x, y) in [(0.0, 0.0), (0.3, 0.8), (1.0, 1.0)] {
            assert!((ds.eval_function(&ones, x, y).unwrap() - 1.0).norm() < 1e-14);
        }
        assert!(ds.eval_function(&ones[1..], 0.1, 0.1).is_err());
        assert!(ds.eval_function(&ones, 1.1, 0.1).is_err());
    }
}

//! Manufactured-solution convergence and pollution studies.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble, classify_dofs, l2_error, mms_residual_source, DiscreteSpace, PlaneWave, QuadratureRule, SpaceSpec,
    SystemMatrices,
};
use crate::geometry::DomainConfig;
use crate::solver::direct_solve;

use super::AppError;

type C = Complex64;

fn default_direction() -> [f64; 2] {
    [0.6, 0.8]
}
fn default_theta() -> f64 {
    FRAC_PI_4
}
fn default_amplitude() -> C {
    C::new(1.0, 0.0)
}

/// Plane-wave manufactured solution on a semicircle of radius `r` with
/// aperture half-width `a`, refined by doubling the span count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsConfig {
    pub k: f64,
    pub r: f64,
    pub a: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_direction")]
    pub direction: [f64; 2],
    #[serde(default = "default_amplitude")]
    pub amplitude: C,
    pub order: usize,
    /// Spans per direction on the coarsest level.
    pub base_spans: usize,
    pub levels: usize,
    /// Gauss points per span for the error integral; `order + 3` when absent.
    #[serde(default)]
    pub error_points: Option<usize>,
    /// Gauss points per span for assembly; `order + 1` when absent.
    #[serde(default)]
    pub quadrature_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub spans: usize,
    pub h: f64,
    pub dofs: usize,
    pub l2_error: f64,
    pub relative_error: f64,
    /// Rate against the previous row.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub config: MmsConfig,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log e` against `log h`.
    pub observed_order: f64,
    pub monotone: bool,
}

impl MmsConfig {
    pub fn validate(&self) -> Result<(), AppError> {
        let ok = self.k >= 0.0
            && self.r > 0.0
            && self.a > 0.0
            && self.a < self.r
            && self.order >= 2
            && self.base_spans >= 1
            && self.levels >= 1
            && self.direction[0].hypot(self.direction[1]) > 0.0;
        if !ok {
            return Err(AppError::Config(format!("invalid MMS setup: {self:?}")));
        }
        Ok(())
    }

    fn domain(&self) -> Result<DomainConfig, AppError> {
        let d = DomainConfig { a: self.a, r: self.r, theta: self.theta, dirichlet: C::new(0.0, 0.0), c_sound: 1.0, frequency: self.k / (2.0 * PI) };
        d.validate()?;
        Ok(d)
    }
}

/// `(dofs, ‖uʰ − u*‖, ‖u*‖)` on one mesh with `spans` per direction.
fn mms_error(cfg: &MmsConfig, domain: &DomainConfig, spans: usize) -> Result<(usize, f64, f64), AppError> {
    let spec = SpaceSpec { order_xi: cfg.order, order_eta: cfg.order, n: spans + cfg.order - 1, m: spans + cfg.order - 1, align_aperture: true };
    let ds = DiscreteSpace::semicircle(domain, &spec)?;
    let quad = match cfg.quadrature_points {
        Some(p) => QuadratureRule::new(p, p),
        None => QuadratureRule::for_orders(cfg.order, cfg.order),
    };
    let global = assemble(&ds, &quad)?;
    let sys = SystemMatrices::restrict(&global, classify_dofs(&ds.space, domain)?)?;
    let mut wave = PlaneWave::new(domain.wavenumber(), cfg.direction);
    wave.amplitude = cfg.amplitude;
    let points = cfg.order + 3;
    let ls = mms_residual_source(&ds, &sys, &wave, points)?;
    let x = direct_solve(&ls.a, &ls.b)?;
    let coeffs = ls.full_coefficients(&sys.partition, &x)?;
    let (err, norm) = l2_error(&ds, &coeffs, |p| wave.value(p), cfg.error_points.unwrap_or(points))?;
    Ok((ds.dim(), err, norm))
}

/// Least-squares slope of `log e` against `log h`; `NaN` if any error is zero.
pub fn observed_order(h: &[f64], e: &[f64]) -> f64 {
    if h.len() < 2 || e.iter().any(|&v| !(v > 0.0)) {
        return f64::NAN;
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn convergence_study(cfg: &MmsConfig) -> Result<ConvergenceTable, AppError> {
    cfg.validate()?;
    let domain = cfg.domain()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cfg.levels);
    for level in 0..cfg.levels {
        let spans = cfg.base_spans << level;
        let (dofs, err, norm) = mms_error(cfg, &domain, spans)?;
        let h = 1.0 / spans as f64;
        let rate = rows.last().and_then(|p| {
            (p.l2_error > 0.0 && err > 0.0).then(|| (p.l2_error / err).ln() / (p.h / h).ln())
        });
        log::info!("mms order {} spans {spans}: error {err:e}", cfg.order);
        rows.push(ConvergenceRow {
            spans,
            h,
            dofs,
            l2_error: err,
            relative_error: if norm > 0.0 { err / norm } else { err },
            rate,
        });
    }
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.l2_error).collect();
    let monotone = e.windows(2).all(|w| w[1] < w[0]);
    if !monotone {
        log::warn!("non-monotone MMS errors: {e:?}");
    }
    Ok(ConvergenceTable { config: cfg.clone(), rows, observed_order: observed_order(&h, &e), monotone })
}

/// Sweep over `k` at fixed resolution per wavelength for several orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PollutionConfig {
    pub wavenumbers: Vec<f64>,
    pub orders: Vec<usize>,
    /// Spans per wavelength along the diameter.
    pub spans_per_wavelength: f64,
    pub r: f64,
    pub a: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_direction")]
    pub direction: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct PollutionRow {
    pub order: usize,
    pub k: f64,
    pub spans: usize,
    pub dofs: usize,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PollutionTable {
    pub config: PollutionConfig,
    pub rows: Vec<PollutionRow>,
    /// `(order, e(k_last) / e(k_first))`.
    pub growth: Vec<(usize, f64)>,
}

impl PollutionConfig {
    /// Spans per direction so that the diameter `2r` carries the requested
    /// number of spans per wavelength.
    pub fn spans_for(&self, k: f64) -> usize {
        (self.spans_per_wavelength * 2.0 * self.r * k / (2.0 * PI)).ceil().max(1.0) as usize
    }
}

impl PollutionTable {
    pub fn growth_of(&self, order: usize) -> Option<f64> {
        self.growth.iter().find(|g| g.0 == order).map(|g| g.1)
    }
}

pub fn pollution_study(cfg: &PollutionConfig) -> Result<PollutionTable, AppError> {
    if cfg.wavenumbers.is_empty() || cfg.orders.is_empty() || !(cfg.spans_per_wavelength > 0.0) {
        return Err(AppError::Config("pollution study needs wavenumbers, orders and a positive resolution".into()));
    }
    let mut rows = Vec::new();
    let mut growth = Vec::new();
    for &order in &cfg.orders {
        let mut first = None;
        let mut last = 0.0;
        for &k in &cfg.wavenumbers {
            let spans = cfg.spans_for(k);
            let mms = MmsConfig {
                k,
                r: cfg.r,
                a: cfg.a,
                theta: cfg.theta,
                direction: cfg.direction,
                amplitude: C::new(1.0, 0.0),
                order,
                base_spans: spans,
                levels: 1,
                error_points: None,
                quadrature_points: None,
            };
            mms.validate()?;
            let (dofs, err, norm) = mms_error(&mms, &mms.domain()?, spans)?;
            let rel = err / norm;
            log::info!("pollution order {order} k {k}: spans {spans}, relative error {rel:e}");
            first.get_or_insert(rel);
            last = rel;
            rows.push(PollutionRow { order, k, spans, dofs, relative_error: rel });
        }
        growth.push((order, last / first.unwrap()));
    }
    Ok(PollutionTable { config: cfg.clone(), rows, growth })
}

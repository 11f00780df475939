use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Physical setup of the radiation problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    /// Transducer half-aperture `a` [m].
    pub a: f64,
    /// Semicircle radius `r` [m].
    pub r: f64,
    /// Polar angle subtended by each side arc, in `(0, π/2)`.
    pub theta: f64,
    /// Dirichlet amplitude `C` on the transducer face.
    pub dirichlet: Complex64,
    /// Speed of sound [m/s].
    pub c_sound: f64,
    /// Frequency [Hz].
    pub frequency: f64,
}

impl DomainConfig {
    /// Setup with the radius tied to the near-field length, `r = ρ N_f`.
    pub fn with_radius_factor(
        frequency: f64,
        c_sound: f64,
        a: f64,
        radius_factor: f64,
        theta: f64,
    ) -> Result<Self, GeometryError> {
        let lambda = c_sound / frequency;
        let cfg = Self {
            a,
            r: radius_factor * a * a / lambda,
            theta,
            dirichlet: Complex64::new(1.0, 0.0),
            c_sound,
            frequency,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: String| Err(GeometryError::InvalidConfig(m));
        if !(self.frequency > 0.0 && self.c_sound > 0.0) {
            return bad("frequency and sound speed must be positive".into());
        }
        if !(self.a > 0.0 && self.a < self.r) {
            return bad(format!("need 0 < a < r, got a = {}, r = {}", self.a, self.r));
        }
        if !(self.theta > 0.0 && self.theta < PI / 2.0) {
            return bad(format!("theta must lie in (0, π/2), got {}", self.theta));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        self.c_sound / self.frequency
    }

    /// `k = 2π f / c`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.frequency / self.c_sound
    }

    /// Preimages of `(-a, 0)` and `(a, 0)` on the bottom edge.
    pub fn aperture_params(&self) -> (f64, f64) {
        let r = self.r;
        ((r - self.a) / (2.0 * r), (r + self.a) / (2.0 * r))
    }
}

/// Near-field length `N_f = a² / λ` (the natural focus).
pub fn near_field_length(cfg: &DomainConfig) -> f64 {
    cfg.a * cfg.a / cfg.wavelength()
}

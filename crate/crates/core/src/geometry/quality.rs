use std::io::Write;

use super::{CoonsSurface, GeometryError};

/// One sample of the mean-ratio Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualitySample {
    pub xi: f64,
    pub eta: f64,
    pub x: f64,
    pub y: f64,
    pub mean_ratio: f64,
    pub det: f64,
}

/// Mean-ratio samples on a uniform `res × res` parametric grid, ξ fastest.
#[derive(Debug, Clone)]
pub struct QualityMap {
    pub res: usize,
    pub samples: Vec<QualitySample>,
}

pub fn quality_map(f: &CoonsSurface, grid_res: usize) -> Result<QualityMap, GeometryError> {
    let res = grid_res.max(2);
    let step = 1.0 / (res - 1) as f64;
    let mut samples = Vec::with_capacity(res * res);
    for j in 0..res {
        for i in 0..res {
            let (xi, eta) = (i as f64 * step, j as f64 * step);
            let e = f.eval(xi, eta)?;
            samples.push(QualitySample {
                xi,
                eta,
                x: e.point[0],
                y: e.point[1],
                mean_ratio: e.jac.mean_ratio,
                det: e.jac.det,
            });
        }
    }
    Ok(QualityMap { res, samples })
}

impl QualityMap {
    pub fn min(&self) -> f64 {
        self.samples.iter().map(|s| s.mean_ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().map(|s| s.mean_ratio).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().map(|s| s.mean_ratio).sum::<f64>() / self.samples.len() as f64
    }

    /// Fraction of samples with mean ratio at least `threshold`.
    pub fn fraction_at_least(&self, threshold: f64) -> f64 {
        self.samples.iter().filter(|s| s.mean_ratio >= threshold).count() as f64 / self.samples.len() as f64
    }

    pub fn min_det(&self) -> f64 {
        self.samples.iter().map(|s| s.det).fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns `xi,eta,x,y,jr`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "xi,eta,x,y,jr")?;
        for s in &self.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.xi, s.eta, s.x, s.y, s.mean_ratio)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{coons_patch, make_segment};

    #[test]
    fn identity_patch_is_perfect() {
        let f = coons_patch(
            &make_segment([0.0, 0.0], [1.0, 0.0]),
            &make_segment([0.0, 1.0], [1.0, 1.0]),
            &make_segment([0.0, 0.0], [0.0, 1.0]),
            &make_segment([1.0, 0.0], [1.0, 1.0]),
        )
        .unwrap();
        let q = quality_map(&f, 11).unwrap();
        assert_eq!(q.samples.len(), 121);
        assert!((q.min() - 1.0).abs() < 1e-14 && (q.max() - 1.0).abs() < 1e-14);
        let mut buf = Vec::new();
        q.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 122);
        assert!(text.starts_with("xi,eta,x,y,jr\n"));
    }
}

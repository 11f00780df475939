//! CSV, legacy VTK and JSON writers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use super::{io_err, AppError, FieldSample};

fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// Columns `xi,eta,x,y,re,im,abs`, 17 significant digits.
pub fn write_field_csv<W: Write>(mut w: W, samples: &[FieldSample]) -> std::io::Result<()> {
    writeln!(w, "xi,eta,x,y,re,im,abs")?;
    for s in samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.xi,
            s.eta,
            s.x,
            s.y,
            s.value.re,
            s.value.im,
            s.abs()
        )?;
    }
    Ok(())
}

pub fn save_field_csv(path: &Path, samples: &[FieldSample]) -> Result<(), AppError> {
    let mut w = create(path)?;
    write_field_csv(&mut w, samples).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Reads a file written by [`write_field_csv`].
pub fn read_field_csv(path: &Path) -> Result<Vec<FieldSample>, AppError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (no, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if no == 0 || line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| AppError::Config(format!("{}:{}: {e}", path.display(), no + 1)))?;
        if v.len() != 7 {
            return Err(AppError::Config(format!("{}:{}: expected 7 columns", path.display(), no + 1)));
        }
        out.push(FieldSample { xi: v[0], eta: v[1], x: v[2], y: v[3], value: Complex64::new(v[4], v[5]) });
    }
    Ok(out)
}

/// Axis profile as `eta,y,abs,re,im`.
pub fn save_axis_csv(path: &Path, samples: &[FieldSample]) -> Result<(), AppError> {
    let mut w = create(path)?;
    let body = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "eta,y,abs,re,im")?;
        for s in samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.eta, s.y, s.abs(), s.value.re, s.value.im)?;
        }
        w.flush()
    };
    body(&mut w).map_err(io_err(path))
}

/// Diameter profile as `xi,x,abs,re,im`.
pub fn save_bottom_csv(path: &Path, samples: &[FieldSample]) -> Result<(), AppError> {
    let mut w = create(path)?;
    let body = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "xi,x,abs,re,im")?;
        for s in samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.xi, s.x, s.abs(), s.value.re, s.value.im)?;
        }
        w.flush()
    };
    body(&mut w).map_err(io_err(path))
}

/// Legacy VTK structured grid of the parametric samples, `ξ` fastest.
pub fn write_vtk<W: Write>(mut w: W, samples: &[FieldSample], nx: usize, ny: usize) -> std::io::Result<()> {
    assert_eq!(samples.len(), nx * ny);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "helmholtz field")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_GRID")?;
    writeln!(w, "DIMENSIONS {nx} {ny} 1")?;
    writeln!(w, "POINTS {} double", samples.len())?;
    for s in samples {
        writeln!(w, "{:.16e} {:.16e} 0", s.x, s.y)?;
    }
    writeln!(w, "POINT_DATA {}", samples.len())?;
    for (name, get) in [
        ("abs", (|s: &FieldSample| s.abs()) as fn(&FieldSample) -> f64),
        ("re", |s| s.value.re),
        ("im", |s| s.value.im),
    ] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for s in samples {
            writeln!(w, "{:.16e}", get(s))?;
        }
    }
    Ok(())
}

pub fn save_vtk(path: &Path, samples: &[FieldSample], nx: usize, ny: usize) -> Result<(), AppError> {
    let mut w = create(path)?;
    write_vtk(&mut w, samples, nx, ny).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn save_matrix(path: &Path, a: &crate::solver::SparseComplex) -> Result<(), AppError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    Ok(crate::solver::matrix_market::write_matrix(path, a)?)
}

//! Matrix Market coordinate files. Writes `complex general`; reads complex or
//! real, general or symmetric.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{SolverError, SparseComplex};

pub fn write_matrix(path: &Path, a: &SparseComplex) -> Result<(), SolverError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(&mut w, a)?;
    w.flush()?;
    Ok(())
}

pub fn write_to(w: &mut impl Write, a: &SparseComplex) -> Result<(), SolverError> {
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (r, c, v) in a.triplets() {
        writeln!(w, "{} {} {:.16e} {:.16e}", r + 1, c + 1, v.re, v.im)?;
    }
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<SparseComplex, SolverError> {
    read_from(BufReader::new(File::open(path)?))
}

pub fn read_from(reader: impl BufRead) -> Result<SparseComplex, SolverError> {
    let mut lines = reader.lines().enumerate();
    let err = |line: usize, msg: &str| SolverError::Parse { line: line + 1, msg: msg.to_string() };

    let (l0, header) = lines.next().ok_or_else(|| err(0, "empty file"))?;
    let header = header?.to_lowercase();
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(err(l0, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    let complex = match fields[3] {
        "complex" => true,
        "real" | "integer" => false,
        _ => return Err(err(l0, "unsupported field type")),
    };
    let symmetric = match fields[4] {
        "general" => false,
        "symmetric" => true,
        _ => return Err(err(l0, "unsupported symmetry")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (ln, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if size.is_none() {
            let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse()).collect();
            match nums.ok().filter(|v| v.len() == 3) {
                Some(v) => size = Some((v[0], v[1], v[2])),
                None => return Err(err(ln, "bad size line")),
            }
            continue;
        }
        let want = if complex { 4 } else { 3 };
        if parts.len() != want {
            return Err(err(ln, "wrong number of entries"));
        }
        let idx = |s: &str| s.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1);
        let val = |s: &str| s.parse::<f64>().map_err(|_| err(ln, "bad value"));
        let (Some(r), Some(c)) = (idx(parts[0]), idx(parts[1])) else {
            return Err(err(ln, "bad index"));
        };
        let v = Complex64::new(val(parts[2])?, if complex { val(parts[3])? } else { 0.0 });
        trip.push((r, c, v));
        if symmetric && r != c {
            trip.push((c, r, v));
        }
    }
    let (nr, nc, nnz) = size.ok_or_else(|| err(0, "missing size line"))?;
    let stored = if symmetric { trip.iter().filter(|t| t.0 <= t.1).count() } else { trip.len() };
    if stored != nnz {
        return Err(err(0, &format!("declared {nnz} entries, found {stored}")));
    }
    SparseComplex::from_triplets(nr, nc, &trip)
}

/// Dense right-hand side as a one-column complex array file.
pub fn read_vector(path: &Path) -> Result<Vec<Complex64>, SolverError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let err = |line: usize, msg: &str| SolverError::Parse { line: line + 1, msg: msg.to_string() };
    let (l0, header) = lines.next().ok_or_else(|| err(0, "empty file"))?;
    let header = header?.to_lowercase();
    if !header.starts_with("%%matrixmarket matrix array") {
        return Err(err(l0, "expected an array header"));
    }
    let complex = header.contains("complex");
    let mut n = None;
    let mut out = Vec::new();
    for (ln, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<f64> = t
            .split_whitespace()
            .map(|p| p.parse::<f64>().map_err(|_| err(ln, "bad number")))
            .collect::<Result<_, _>>()?;
        if n.is_none() {
            if parts.len() != 2 || parts[1] != 1.0 {
                return Err(err(ln, "expected '<rows> 1'"));
            }
            n = Some(parts[0] as usize);
            continue;
        }
        out.push(Complex64::new(parts[0], if complex { *parts.get(1).unwrap_or(&0.0) } else { 0.0 }));
    }
    match n {
        Some(n) if n == out.len() => Ok(out),
        _ => Err(err(0, "row count does not match header")),
    }
}

pub fn write_vector(path: &Path, v: &[Complex64]) -> Result<(), SolverError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix array complex general")?;
    writeln!(w, "{} 1", v.len())?;
    for z in v {
        writeln!(w, "{:.16e} {:.16e}", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let a = SparseComplex::from_triplets(
            3,
            4,
            &[(0, 0, Complex64::new(0.1, -1.0 / 3.0)), (2, 3, Complex64::new(1e-300, 7.0)), (1, 1, Complex64::new(std::f64::consts::PI, 0.0))],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_to(&mut buf, &a).unwrap();
        let back = read_from(buf.as_slice()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn reads_real_symmetric() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4.0\n2 1 -1.5\n";
        let a = read_from(text.as_bytes()).unwrap();
        assert_eq!(a.get(0, 1), Complex64::new(-1.5, 0.0));
        assert_eq!(a.get(1, 0), Complex64::new(-1.5, 0.0));
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "",
            "%%MatrixMarket matrix array real general\n1 1\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1.0\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 1 1.0 0.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n",
        ] {
            assert!(read_from(text.as_bytes()).is_err(), "{text:?}");
        }
    }

    #[test]
    fn vector_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.mtx");
        let v = vec![Complex64::new(1.0 / 7.0, -2.0), Complex64::new(0.0, 1e-20)];
        write_vector(&p, &v).unwrap();
        assert_eq!(read_vector(&p).unwrap(), v);
    }
}

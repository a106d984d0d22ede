//! Text snapshots of vector fields.
//!
//! ```text
//! mhdnudge-field v1, n=<n>
//! k1,k2,re_c1,im_c1,re_c2,im_c2
//! ...
//! ```
//!
//! One row per stored coefficient in array order. Floats use Rust's shortest
//! round-trip formatting, so reading a snapshot back is exact.

use std::io::{BufRead, Write};

use rustfft::num_complex::Complex64;

use super::grid::Grid;
use super::scalar::SpectralScalar;
use super::vector::{SpectralVectorField, DIVERGENCE_TOLERANCE};
use crate::error::{Error, Result};

const MAGIC: &str = "mhdnudge-field v1";

pub fn write_snapshot(field: &SpectralVectorField, mut out: impl Write) -> Result<()> {
    let grid = field.grid();
    writeln!(out, "{MAGIC}, n={}", grid.n())?;
    let (cx, cy) = (field.x().coefficients(), field.y().coefficients());
    for flat in 0..grid.len() {
        let (k1, k2) = grid.wavevector(flat);
        writeln!(
            out,
            "{k1},{k2},{:e},{:e},{:e},{:e}",
            cx[flat].re, cx[flat].im, cy[flat].re, cy[flat].im
        )?;
    }
    Ok(())
}

pub fn read_snapshot(input: impl BufRead) -> Result<SpectralVectorField> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Snapshot {
        line: 1,
        detail: "empty input".into(),
    })??;
    let n: usize = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.trim().strip_prefix(", n=").or(rest.strip_prefix(", n=")))
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| Error::Snapshot {
            line: 1,
            detail: format!("bad header {header:?}"),
        })?;
    let grid = Grid::new(n)?;
    let mut cx = vec![Complex64::default(); grid.len()];
    let mut cy = vec![Complex64::default(); grid.len()];
    let mut seen = vec![false; grid.len()];
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |detail: String| Error::Snapshot {
            line: lineno,
            detail,
        };
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(bad(format!("expected 6 columns, got {}", parts.len())));
        }
        let k1: i64 = parts[0].parse().map_err(|e| bad(format!("k1: {e}")))?;
        let k2: i64 = parts[1].parse().map_err(|e| bad(format!("k2: {e}")))?;
        let half = (n / 2) as i64;
        if !(-half < k1 && k1 <= half && -half < k2 && k2 <= half) {
            return Err(bad(format!("wavevector ({k1},{k2}) outside the grid")));
        }
        let mut vals = [0.0; 4];
        for (v, p) in vals.iter_mut().zip(&parts[2..]) {
            *v = p.parse().map_err(|e| bad(format!("{p:?}: {e}")))?;
        }
        let flat = grid.flat_index(k1, k2);
        if seen[flat] {
            return Err(bad(format!("duplicate wavevector ({k1},{k2})")));
        }
        seen[flat] = true;
        cx[flat] = Complex64::new(vals[0], vals[1]);
        cy[flat] = Complex64::new(vals[2], vals[3]);
    }
    let field = SpectralVectorField::new(
        SpectralScalar::from_coefficients(&grid, cx)?,
        SpectralScalar::from_coefficients(&grid, cy)?,
    )?;
    if field.divergence_defect() <= DIVERGENCE_TOLERANCE {
        field.mark_divergence_free()
    } else {
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_divfree_field;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::new(16).unwrap();
        let u = random_divfree_field(&g, 11, 1.5, 5).unwrap().scaled(0.1 / 3.0);
        let mut buf = Vec::new();
        write_snapshot(&u, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("mhdnudge-field v1, n=16\n"));
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn rejects_bad_header_and_rows() {
        assert!(read_snapshot("nope\n".as_bytes()).is_err());
        let err = read_snapshot("mhdnudge-field v1, n=8\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Snapshot { line: 2, .. }));
        let err = read_snapshot("mhdnudge-field v1, n=8\n9,0,0,0,0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Snapshot { line: 2, .. }));
    }
}

//! Report serialization helpers.
//!
//! All numeric report output is written with a fixed field order and
//! floats at 17 significant digits so identical inputs produce
//! byte-identical files.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{real, to_f64, Real};

/// Formats a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_float<T: Real>(x: T) -> String {
    format!("{:.16e}", to_f64(x))
}

/// `[a, b, c]` with fixed float formatting.
pub fn fmt_float_array<T: Real>(xs: &[T]) -> String {
    let body: Vec<String> = xs.iter().map(|&x| fmt_float(x)).collect();
    format!("[{}]", body.join(","))
}

fn fmt_matrix_part<T: Real>(m: &CMatrix<T>, re: bool) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = (0..m.ncols())
                .map(|j| {
                    let c = m[(i, j)];
                    fmt_float(if re { c.re } else { c.im })
                })
                .collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// Encodes a complex matrix as `"re":[[...]],"im":[[...]]` object body.
pub fn complex_matrix_fields<T: Real>(m: &CMatrix<T>) -> String {
    format!(
        "\"re\":{},\"im\":{}",
        fmt_matrix_part(m, true),
        fmt_matrix_part(m, false)
    )
}

/// Parses a `{"re":[[...]],"im":[[...]]}` object into a complex matrix.
/// `im` may be omitted for real matrices.
pub fn parse_complex_matrix<T: Real>(value: &serde_json::Value) -> Result<CMatrix<T>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::invalid("matrix must be a JSON object with re/im"))?;
    let re = parse_real_rows(
        obj.get("re")
            .ok_or_else(|| Error::invalid("matrix object is missing \"re\""))?,
    )?;
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("matrix must be non-empty"));
    }
    let im = match obj.get("im") {
        Some(v) => Some(parse_real_rows(v)?),
        None => None,
    };
    if let Some(im) = &im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("re and im shapes differ"));
        }
    }
    let mut m = CMatrix::<T>::zeros(rows, cols);
    for (i, row) in re.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::invalid("matrix rows have unequal lengths"));
        }
        for (j, &x) in row.iter().enumerate() {
            let y = im.as_ref().map_or(0.0, |im| im[i][j]);
            m[(i, j)] = Complex::new(real(x), real(y));
        }
    }
    Ok(m)
}

fn parse_real_rows(value: &serde_json::Value) -> Result<Vec<Vec<f64>>> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::invalid("matrix part must be an array of rows"))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::invalid("matrix row must be an array"))?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::invalid("matrix entry must be a number"))
                })
                .collect()
        })
        .collect()
}

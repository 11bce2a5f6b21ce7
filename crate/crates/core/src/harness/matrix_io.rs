//! Plain-text matrix files: a `rows cols` header followed by row-major
//! `re im` pairs, all whitespace separated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub fn parse_matrix(text: &str) -> Result<Matrix<Complex64>> {
    let mut tokens = text.split_whitespace();
    let mut next = |what: &str| {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))
    };
    let rows: usize = next("row count")?
        .parse()
        .map_err(|e| Error::Parse(format!("row count: {e}")))?;
    let cols: usize = next("column count")?
        .parse()
        .map_err(|e| Error::Parse(format!("column count: {e}")))?;
    let mut data = Vec::with_capacity(rows * cols);
    for idx in 0..rows * cols {
        let mut part = |name: &str| -> Result<f64> {
            next(name)?
                .parse()
                .map_err(|e| Error::Parse(format!("entry {idx} {name}: {e}")))
        };
        let re = part("real part")?;
        let im = part("imaginary part")?;
        data.push(Complex64::new(re, im));
    }
    if let Some(extra) = tokens.next() {
        return Err(Error::Parse(format!("unexpected trailing token {extra:?}")));
    }
    Matrix::new(rows, cols, data)
}

pub fn format_matrix(m: &Matrix<Complex64>) -> String {
    let mut s = format!("{} {}\n", m.n_rows(), m.n_cols());
    for i in 0..m.n_rows() {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{:.16e} {:.16e}", z.re, z.im))
            .collect();
        s.push_str(&line.join("  "));
        s.push('\n');
    }
    s
}

/// `re im` with 17 significant digits each.
pub fn format_complex(z: Complex64) -> String {
    format!("{:.16e} {:.16e}", z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = Matrix::new(
            2,
            1,
            vec![Complex64::new(0.1, -2.5), Complex64::new(1e-300, 3.0)],
        )
        .unwrap();
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_matrix(""), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 1\n1.0"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 1\n1.0 x"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 1\n1 0 5"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix("1 1\nnan 0"),
            Err(Error::NonFinite { .. })
        ));
    }
}

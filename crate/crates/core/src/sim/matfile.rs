// SPDX-License-Identifier: Apache-2.0

//! Plain-text matrices: one row per line, each entry written as `re im`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{c, Real};

pub fn parse_matrix<T: Real>(text: &str) -> Result<CMat<T>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, tok) in line.split_whitespace().enumerate() {
            let x: f64 = tok.parse().map_err(|_| Error::Syntax {
                line: lineno + 1,
                column: col + 1,
                message: format!("not a number: {tok:?}"),
            })?;
            row.push(x);
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix file".into()));
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 2 * n {
            return Err(Error::InvalidArgument(format!(
                "row {} has {} numbers, expected {} for a {n}x{n} matrix",
                i + 1,
                row.len(),
                2 * n
            )));
        }
        for pair in row.chunks(2) {
            entries.push(c(T::lit(pair[0]), T::lit(pair[1])));
        }
    }
    Ok(CMat::from_rows(n, &entries))
}

pub fn format_matrix<T: Real>(m: &CMat<T>) -> String {
    let n = m.n();
    let mut s = String::new();
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if j > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:e} {:e}", z.re.to_f64_lossy(), z.im.to_f64_lossy());
        }
        s.push('\n');
    }
    s
}

pub fn load_matrix<T: Real>(path: &Path) -> Result<CMat<T>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn save_matrix<T: Real>(path: &Path, m: &CMat<T>) -> Result<()> {
    std::fs::write(path, format_matrix(m))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = CMat::from_fn(3, |i, j| c(i as f64 + 0.1, -(j as f64) / 3.0));
        let back: CMat<f64> = parse_matrix(&format_matrix(&m)).unwrap();
        assert_eq!(back.re(), m.re());
        assert_eq!(back.im(), m.im());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(parse_matrix::<f64>("1 0 0 0\n1 0\n").is_err());
        assert!(matches!(
            parse_matrix::<f64>("# c\n1 x\n"),
            Err(Error::Syntax {
                line: 2,
                column: 2,
                ..
            })
        ));
    }
}

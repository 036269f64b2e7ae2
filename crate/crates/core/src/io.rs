//! Columnar text formats: mode tables, covariance matrices and plain
//! numeric dumps.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{CapacityError, Result};
use crate::symplectic::{CovarianceForm, Ordering};
use crate::waterfill::ModeSpec;

#[derive(Debug, Deserialize)]
struct ModeRow {
    omega: f64,
    #[serde(rename = "K_abs")]
    k_abs: f64,
    #[serde(rename = "N")]
    noise: f64,
}

/// Parses a mode table with header `omega,K_abs,N`, one mode per row.
pub fn parse_modes(text: &str, hbar: f64) -> Result<Vec<ModeSpec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CapacityError::Schema(format!("mode table: {e}")))?
        .clone();
    let expected = ["omega", "K_abs", "N"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(CapacityError::Schema(format!(
            "mode table header must be omega,K_abs,N, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut modes = Vec::new();
    for (i, row) in reader.deserialize::<ModeRow>().enumerate() {
        let row = row.map_err(|e| CapacityError::Schema(format!("mode table row {}: {e}", i + 1)))?;
        modes.push(ModeSpec::new(row.omega, row.k_abs, row.noise, hbar)?);
    }
    if modes.is_empty() {
        return Err(CapacityError::Schema("mode table has no rows".into()));
    }
    Ok(modes)
}

/// Parses a covariance file: a header line `delta,xpxp` or `delta,xxpp`
/// naming the symplectic form, then the `2n x 2n` matrix `alpha`, one
/// comma-separated row per line. Blank lines and `#` comments are skipped.
pub fn parse_covariance(text: &str) -> Result<CovarianceForm> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CapacityError::Schema("covariance file is empty".into()))?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let ordering = match fields.as_slice() {
        ["delta", "xpxp"] => Ordering::Xpxp,
        ["delta", "xxpp"] => Ordering::Xxpp,
        _ => {
            return Err(CapacityError::Schema(format!(
                "covariance header must be `delta,xpxp` or `delta,xxpp`, got `{header}`"
            )))
        }
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| CapacityError::Schema(format!("covariance row {}: `{v}`: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || !n.is_multiple_of(2) || rows.iter().any(|r| r.len() != n) {
        return Err(CapacityError::Schema(format!(
            "covariance matrix must be square with even size, got {n} rows"
        )));
    }
    let alpha = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    CovarianceForm::standard(alpha, ordering)
}

/// Comma-separated table with a header row. Numbers use the shortest
/// representation that round-trips, so output is reproducible.
pub fn write_columns(headers: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_table_round_trip() {
        let modes = parse_modes("omega,K_abs,N\n1,1,0\n2, 0.5, 0.25\n", 1.0).unwrap();
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[1].k_abs, 0.5);
        assert_eq!(modes[1].noise_n, 0.25);
    }

    #[test]
    fn mode_table_errors() {
        assert!(matches!(parse_modes("w,K,N\n1,1,0\n", 1.0), Err(CapacityError::Schema(_))));
        assert!(matches!(parse_modes("omega,K_abs,N\n1,x,0\n", 1.0), Err(CapacityError::Schema(_))));
        assert!(matches!(parse_modes("omega,K_abs,N\n1,0,0\n", 1.0), Err(CapacityError::Domain(_))));
    }

    #[test]
    fn covariance_file() {
        let c = parse_covariance("delta,xxpp\n# vacuum\n0.5,0\n0,0.5\n").unwrap();
        assert_eq!(c.modes(), 1);
        assert!(parse_covariance("delta,qq\n1,0\n0,1\n").is_err());
        assert!(parse_covariance("delta,xpxp\n1,0,0\n0,1,0\n0,0,1\n").is_err());
    }

    #[test]
    fn columns_are_plain() {
        let s = write_columns(&["a", "b"], &[vec![1.0, 0.5], vec![2.0, -3.25]]);
        assert_eq!(s, "a,b\n1,0.5\n2,-3.25\n");
    }
}

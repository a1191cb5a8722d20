//! Matrix interchange files.
//!
//! A matrix file is a JSON document
//!
//! ```json
//! { "dim": 2, "re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]] }
//! ```
//!
//! `im` is optional and defaults to zero.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::policy::NumericPolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug)]
pub enum InputError {
    Io { path: String, source: std::io::Error },
    Syntax(String),
    /// Names the offending field, e.g. `re[1]` or `im[0][2]`.
    Field { field: String, message: String },
    Matrix(Error),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io { path, source } => write!(f, "cannot read {path}: {source}"),
            InputError::Syntax(msg) => write!(f, "malformed matrix file: {msg}"),
            InputError::Field { field, message } => write!(f, "field `{field}`: {message}"),
            InputError::Matrix(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for InputError {}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn check_grid(name: &str, grid: &[Vec<f64>], dim: usize) -> Result<(), InputError> {
    if grid.len() != dim {
        return Err(field_err(name, format!("expected {dim} rows, found {}", grid.len())));
    }
    for (i, row) in grid.iter().enumerate() {
        if row.len() != dim {
            return Err(field_err(
                format!("{name}[{i}]"),
                format!("expected {dim} entries, found {}", row.len()),
            ));
        }
    }
    Ok(())
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| InputError::Syntax(e.to_string()))?;
        if file.dim == 0 {
            return Err(field_err("dim", "must be positive"));
        }
        check_grid("re", &file.re, file.dim)?;
        if let Some(im) = &file.im {
            check_grid("im", im, file.dim)?;
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = m.to_rows();
        let re = rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        let im: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
        let has_im = im.iter().flatten().any(|&v| v != 0.0);
        Self {
            dim: m.dim(),
            re,
            im: has_im.then_some(im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, InputError> {
        let rows: Vec<Vec<Complex64>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let im = self.im.as_ref().map_or(0.0, |g| g[i][j]);
                        Complex64::new(self.re[i][j], im)
                    })
                    .collect()
            })
            .collect();
        CMatrix::from_rows(&rows).map_err(|e| match e {
            Error::NonFinite { row, col } => {
                let part = if self.re[row][col].is_finite() { "im" } else { "re" };
                field_err(format!("{part}[{row}][{col}]"), "non-finite entry")
            }
            other => InputError::Matrix(other),
        })
    }

    pub fn to_hermitian(&self, policy: &NumericPolicy) -> Result<HermitianMatrix, InputError> {
        HermitianMatrix::new(self.to_matrix()?, policy).map_err(InputError::Matrix)
    }
}

//! Matrix JSON: `{"rows": N, "cols": M, "data": [[re, im], ...]}`, row-major.
//!
//! Doubles are written in shortest round-trip form and parsed exactly, so a
//! write/read cycle reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Parse("matrix dimensions must be positive".into()));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "expected {} entries for a {}x{} matrix, found {}",
                self.rows * self.cols,
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.data[r * self.cols + c];
            c64(re, im)
        }))
    }
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("matrix json serialization")
}

pub fn matrix_from_json(s: &str) -> Result<CMatrix> {
    let raw: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    raw.to_matrix()
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(m))?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = fs::read_to_string(path)?;
    matrix_from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

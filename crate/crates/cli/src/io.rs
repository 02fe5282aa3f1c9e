//! File formats: matrices as JSON `{"rows", "cols", "data"}` with row-major
//! nested arrays, grids as CSV with a one-line header.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<f64>>,
}

impl From<&DMatrix<f64>> for JsonMatrix {
    fn from(m: &DMatrix<f64>) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<JsonMatrix> for DMatrix<f64> {
    type Error = CliError;

    fn try_from(m: JsonMatrix) -> CliResult<Self> {
        if m.data.len() != m.rows || m.data.iter().any(|r| r.len() != m.cols) {
            return Err(CliError::Input(format!("matrix data does not match its declared shape {}x{}", m.rows, m.cols)));
        }
        if m.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Input("matrix entries must be finite".into()));
        }
        Ok(DMatrix::from_fn(m.rows, m.cols, |i, j| m.data[i][j]))
    }
}

pub fn read_matrix(path: &Path) -> CliResult<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let m: JsonMatrix = serde_json::from_str(&text)?;
    m.try_into()
}

/// Pretty JSON with a trailing newline, to `path` or stdout.
pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Input(format!("{other:?}")),
    }
}

/// Parses `"a,b,c"` into floats.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad number {x:?}: {e}")))
        .collect()
}

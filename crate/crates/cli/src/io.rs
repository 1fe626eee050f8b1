//! Headerless numeric CSV ingestion and emission. Numbers are written with
//! 17 significant digits so an emit/ingest round trip is bit-exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::errors::{CliError, CliResult};

/// Reads a dense row-major matrix. `skip_header` drops the first line.
pub fn read_matrix(path: &Path, skip_header: bool) -> CliResult<Array2<f64>> {
    let file = File::open(path)
        .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (ridx, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::BadInput(format!("{}: malformed CSV: {e}", path.display())))?;
        if record.len() == 1 && record[0].is_empty() {
            continue; // trailing blank line
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(CliError::BadInput(format!(
                    "{}: ragged CSV: row {} has {} cells, expected {w}",
                    path.display(),
                    ridx + 1,
                    record.len()
                )));
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(record.len());
        for (cidx, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::BadInput(format!(
                    "{}: non-numeric cell '{cell}' at row {}, column {}",
                    path.display(),
                    ridx + 1,
                    cidx + 1
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let m = rows.len();
    let n = width.unwrap_or(0);
    if m == 0 || n == 0 {
        return Err(CliError::BadInput(format!(
            "{}: no numeric data",
            path.display()
        )));
    }
    let mut out = Array2::zeros((m, n));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[[i, j]] = *v;
        }
    }
    Ok(out)
}

/// Reads a single-column CSV as a vector.
pub fn read_vector(path: &Path, skip_header: bool) -> CliResult<Array1<f64>> {
    let mat = read_matrix(path, skip_header)?;
    if mat.ncols() != 1 {
        return Err(CliError::BadInput(format!(
            "{}: expected a single column, found {}",
            path.display(),
            mat.ncols()
        )));
    }
    Ok(mat.column(0).to_owned())
}

/// 17-significant-digit representation that round-trips f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix(path: &Path, a: &Array2<f64>) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| fmt_float(a[[i, j]])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_vector(path: &Path, v: &Array1<f64>) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for x in v.iter() {
        writeln!(w, "{}", fmt_float(*x))?;
    }
    Ok(())
}

/// Column standardization: mean zero, unit l2 norm. Zero-variance columns
/// are left as zeros.
pub fn standardize_columns(a: &mut Array2<f64>) {
    let m = a.nrows();
    for j in 0..a.ncols() {
        let mut col = a.column_mut(j);
        let mean = col.sum() / m as f64;
        col.mapv_inplace(|v| v - mean);
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|v| v / norm);
        }
    }
}

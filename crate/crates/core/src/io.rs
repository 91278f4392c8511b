//! CSV and JSON formats.
//!
//! Snapshot CSV: header row `t,x1,...,xn`, then one row per time step with
//! the time in the first column. System matrix CSV: one row per matrix row,
//! no header.

use std::io::{Read, Write};

use serde::Serialize;

use crate::dmd::{dmd_modes, DmdModel, TrajectoryData};
use crate::error::{Error, Result};
use crate::linalg::{matrix_from_rows, Matrix, Vector};

pub fn write_trajectory_csv<W: Write>(out: W, data: &TrajectoryData) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=data.dim()).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (i, x) in data.snapshots().iter().enumerate() {
        let mut row = vec![(i as f64 * data.step()).to_string()];
        row.extend(x.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: non-finite value '{s}'")));
    }
    Ok(v)
}

/// Reads a snapshot CSV. The step is taken from the time column, which must
/// be uniformly spaced.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<TrajectoryData> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let width = r.headers()?.len();
    if width < 2 {
        return Err(Error::Parse(
            "snapshot CSV needs a time column and at least one state column".into(),
        ));
    }
    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != width {
            return Err(Error::Parse(format!(
                "line {line}: expected {width} fields, got {}",
                rec.len()
            )));
        }
        times.push(parse_field(&rec[0], line)?);
        let x = (1..width)
            .map(|j| parse_field(&rec[j], line))
            .collect::<Result<Vec<_>>>()?;
        snapshots.push(Vector::from_vec(x));
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "snapshot CSV has {} rows, need at least 2",
            times.len()
        )));
    }
    let step = times[1] - times[0];
    if step <= 0.0 {
        return Err(Error::Parse("time column must be increasing".into()));
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > 1e-6 * step {
            return Err(Error::Parse(format!(
                "time column is not uniformly spaced at row {}",
                i + 2
            )));
        }
    }
    TrajectoryData::new(snapshots, step, "csv")
}

/// Reads a headerless CSV matrix.
pub fn read_matrix_csv<R: Read>(input: R) -> Result<Matrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|s| parse_field(s, i + 1))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    matrix_from_rows(&rows)
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

/// JSON summary of a fitted DMD model.
#[derive(Debug, Clone, Serialize)]
pub struct DmdSummary {
    pub n: usize,
    pub m: usize,
    pub step: f64,
    pub rank: usize,
    pub span_invariant: bool,
    pub singular_values: Vec<f64>,
    pub a_dmd: Vec<Vec<f64>>,
    pub eigenvalues: Vec<ComplexValue>,
    pub diagonalizable: bool,
}

impl DmdSummary {
    pub fn from_model(model: &DmdModel) -> Result<Self> {
        let modes = dmd_modes(model)?;
        Ok(DmdSummary {
            n: model.data_dims.0,
            m: model.data_dims.1,
            step: model.step,
            rank: model.rank,
            span_invariant: model.span_invariant,
            singular_values: model.svd.singular_values.iter().copied().collect(),
            a_dmd: matrix_rows(&model.a_dmd),
            eigenvalues: modes
                .eigenvalues
                .iter()
                .map(|l| ComplexValue { re: l.re, im: l.im })
                .collect(),
            diagonalizable: modes.diagonalizable,
        })
    }
}

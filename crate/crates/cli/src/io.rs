//! Reading and writing datasets: a CSV with a header row `t,f1,...,fn`, the
//! grid points in the first column and one function per remaining column.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use fbox_core::{FunctionalSample, Grid};
use serde::Deserialize;

use crate::error::{io_error, CliError, CliResult};

/// A sample read from disk together with its original time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Grid points as written in the file.
    pub t: Vec<f64>,
    /// Column headers of the functions.
    pub names: Vec<String>,
    /// The functions on a grid rescaled to `[0, 1]`.
    pub sample: FunctionalSample,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightsFile {
    Bare(Vec<f64>),
    Wrapped { weights: Vec<f64> },
}

pub fn read_dataset(path: &Path, weights: Option<&Path>) -> CliResult<Dataset> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let weights = weights.map(read_weights).transpose()?;
    parse_dataset(file, weights).map_err(|e| match e {
        CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses a dataset from any reader. `weights`, when given, are normalized
/// to sum to one.
pub fn parse_dataset(reader: impl std::io::Read, weights: Option<Vec<f64>>) -> CliResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 {
        return Err(CliError::usage(
            "header needs a t column and at least one function column",
        ));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let n = names.len();

    let mut t = Vec::new();
    let mut columns = vec![Vec::new(); n];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let mut cells = record.iter().enumerate().map(|(c, cell)| {
            let name = headers.get(c).unwrap_or("?");
            parse_cell(cell)
                .map_err(|why| CliError::usage(format!("line {line}, column '{name}': {why}")))
        });
        let ti = cells.next().expect("record has at least the t field")?;
        if let Some(&prev) = t.last() {
            if ti <= prev {
                return Err(CliError::usage(format!(
                    "line {line}: t = {ti} is not greater than the previous t = {prev}"
                )));
            }
        }
        t.push(ti);
        for (col, cell) in columns.iter_mut().zip(cells) {
            col.push(cell?);
        }
    }
    if t.len() < 2 {
        return Err(CliError::usage(format!(
            "need at least 2 grid points, got {}",
            t.len()
        )));
    }

    let (t0, t1) = (t[0], t[t.len() - 1]);
    let points: Vec<f64> = t
        .iter()
        .map(|&x| ((x - t0) / (t1 - t0)).clamp(0.0, 1.0))
        .collect();
    let grid = match weights {
        None => Grid::new(points)?,
        Some(w) => {
            let total: f64 = w.iter().sum();
            if w.len() != t.len() || !(total > 0.0) {
                return Err(CliError::usage(format!(
                    "weights: expected {} nonnegative values with a positive sum",
                    t.len()
                )));
            }
            Grid::with_weights(points, w.iter().map(|x| x / total).collect())?
        }
    };
    let values: Vec<f64> = columns.into_iter().flatten().collect();
    let sample = FunctionalSample::new(grid, values, n)?;
    Ok(Dataset { t, names, sample })
}

fn parse_cell(cell: &str) -> Result<f64, String> {
    if cell.is_empty() {
        return Err("missing value".into());
    }
    match cell.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(format!("non-finite value '{cell}'")),
        Err(_) => Err(format!("invalid number '{cell}'")),
    }
}

fn csv_error(err: csv::Error) -> CliError {
    match err.kind() {
        csv::ErrorKind::Io(_) => CliError::runtime(err),
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => {
            let line = pos.as_ref().map_or(0, |p| p.line());
            CliError::usage(format!(
                "line {line}: expected {expected_len} fields, found {len}"
            ))
        }
        _ => CliError::usage(err),
    }
}

fn read_weights(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let parsed: WeightsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(match parsed {
        WeightsFile::Bare(w) | WeightsFile::Wrapped { weights: w } => w,
    })
}

/// Writes a dataset with the shortest representation that reads back to the
/// same values, so a written file reproduces the sample exactly.
pub fn write_dataset(
    out: &mut impl Write,
    t: &[f64],
    names: &[String],
    sample: &FunctionalSample,
) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let header = std::iter::once("t".to_string()).chain(names.iter().cloned());
    wtr.write_record(header).map_err(CliError::runtime)?;
    for (k, ti) in t.iter().enumerate() {
        let row = std::iter::once(ti.to_string())
            .chain((0..sample.n()).map(|i| sample.value(i, k).to_string()));
        wtr.write_record(row).map_err(CliError::runtime)?;
    }
    wtr.flush().map_err(CliError::runtime)
}

/// Default column names `f1, ..., fn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("f{i}")).collect()
}

//! CSV conventions: a header row, comma delimiter, 17 significant digits,
//! `inf` for infinities. NaN is never written.

use std::io::Write;

use gensphere::mesh::format_f64;

use crate::error::{CliError, CliResult};

pub fn coordinate_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

pub struct CsvOut<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvOut<W> {
    pub fn new(out: W, header: &[String]) -> CliResult<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(header)?;
        Ok(CsvOut { inner })
    }

    pub fn row(&mut self, values: &[f64]) -> CliResult<()> {
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(CliError::Numeric(format!("refusing to write NaN in column {}", i + 1)));
        }
        self.inner.write_record(values.iter().map(|v| format_f64(*v)))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.inner.flush().map_err(|e| CliError::user(format!("write failed: {e}")))
    }
}

/// Reads a numeric table with `columns` columns (any count when `None`). A
/// first row that is not entirely numeric is taken as a header.
pub fn read_table(text: &str, columns: Option<usize>) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(CliError::user(format!("row {}: non-numeric field", i + 1))),
        };
        if let Some(c) = columns {
            if values.len() != c {
                return Err(CliError::user(format!("row {}: expected {c} columns, got {}", i + 1, values.len())));
            }
        }
        rows.push(values);
    }
    Ok(rows)
}

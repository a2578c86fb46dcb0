//! CSV ingestion: rows are observations, columns are coordinates.

use crate::error::{CliError, CliResult};
use rpod::DataMatrix;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub data: DataMatrix,
    pub header: Option<Vec<String>>,
    /// Hex SHA-256 of the raw file bytes.
    pub sha256: String,
}

fn parse_number(field: &str) -> Option<f64> {
    let v: f64 = field.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parse CSV text. A first row with any non-numeric field is taken as a header.
pub fn parse_csv(bytes: &[u8]) -> CliResult<(DataMatrix, Option<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(bytes);
    let mut header = None;
    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::usage(format!("line {line}: {e}")))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if i == 0 && record.iter().any(|f| parse_number(f).is_none()) {
            header = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
            width = Some(record.len());
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(CliError::usage(format!("line {line}: expected {w} columns, found {}", record.len())));
        }
        for (j, field) in record.iter().enumerate() {
            let v = parse_number(field).ok_or_else(|| {
                CliError::usage(format!("line {line}, column {}: cannot parse {field:?} as a finite number", j + 1))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let d = width.unwrap_or(0);
    if rows == 0 || d == 0 {
        return Err(CliError::usage("input has no data rows"));
    }
    let data = DataMatrix::new(rows, d, values)?;
    Ok((data, header))
}

pub fn load_csv(path: &Path) -> CliResult<LoadedCsv> {
    let bytes = std::fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let (data, header) = parse_csv(&bytes).map_err(|e| match e {
        CliError::Usage(m) => CliError::usage(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedCsv { data, header, sha256 })
}

//! Streams as CSV: one column per variable, one row per instant, `.` for
//! absence.

use std::io::{Read, Write};

use thiserror::Error;

use super::{Stream, Value, CV};
use crate::ast::Ident;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}, column {column}: cannot read {text:?} as a value")]
    Value { row: usize, column: Ident, text: String },
}

fn parse_cell(text: &str) -> Option<CV> {
    match text.trim() {
        "." => Some(CV::Absent),
        "true" | "T" => Some(CV::bool(true)),
        "false" | "F" => Some(CV::bool(false)),
        t => t.parse::<i64>().ok().map(CV::int),
    }
}

/// Column names and one stream per column.
pub fn read_csv(r: impl Read) -> Result<(Vec<Ident>, Vec<Stream>), CsvError> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
    let names: Vec<Ident> = rd.headers()?.iter().map(str::to_string).collect();
    let mut cols: Vec<Stream> = vec![Vec::new(); names.len()];
    for (row, rec) in rd.records().enumerate() {
        let rec = rec?;
        for (i, text) in rec.iter().enumerate() {
            let v = parse_cell(text).ok_or_else(|| CsvError::Value {
                row: row + 1,
                column: names[i].clone(),
                text: text.to_string(),
            })?;
            cols[i].push(v);
        }
    }
    Ok((names, cols))
}

/// Writes the first `horizon` instants of each column.
pub fn write_csv(w: impl Write, names: &[Ident], cols: &[&Stream], horizon: usize) -> Result<(), CsvError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(names)?;
    for n in 0..horizon {
        wr.write_record(cols.iter().map(|c| c.get(n).map_or(".".to_string(), |v| v.to_string())))?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}

impl std::str::FromStr for Value {
    type Err = String;

    fn from_str(s: &str) -> Result<Value, String> {
        match parse_cell(s) {
            Some(CV::Present(v)) => Ok(v),
            _ => Err(format!("not a value: {}", s)),
        }
    }
}

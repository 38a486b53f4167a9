//! Loading, validating, and selecting multivariate time-series tables.
//!
//! Input is RFC-4180 CSV with a mandatory header row. Columns whose first
//! data cell does not parse as a number are treated as metadata (dates,
//! labels) and dropped with a note in the load report; a malformed or
//! non-finite cell inside a numeric column is a hard error. There is no
//! missing-data handling by design.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// An immutable table of named, equal-length numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

/// What `load_csv` did besides producing the table.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    /// Non-numeric columns that were dropped, in file order.
    pub dropped: Vec<String>,
    /// Number of data rows read.
    pub n_rows: usize,
}

impl SeriesTable {
    /// Build a table from parallel name/column lists, validating every
    /// invariant: equal lengths, at least one observation, unique non-empty
    /// names, finite values.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch(names.len(), columns.len()));
        }
        if columns.is_empty() {
            return Err(Error::EmptyTable("no columns".into()));
        }
        let t = columns[0].len();
        if t == 0 {
            return Err(Error::EmptyTable("no data rows".into()));
        }
        for (name, col) in names.iter().zip(&columns) {
            if name.is_empty() {
                return Err(Error::UnknownColumn(String::new()));
            }
            if col.len() != t {
                return Err(Error::LengthMismatch(t, col.len()));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue(name.clone()));
            }
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        Ok(SeriesTable { names, columns })
    }

    /// Number of observations T.
    pub fn n_obs(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column_by_index(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    /// Sub-table in request order; an empty request returns the whole table.
    pub fn select(&self, names: &[String]) -> Result<SeriesTable> {
        if names.is_empty() {
            return Ok(self.clone());
        }
        let mut out_names = Vec::with_capacity(names.len());
        let mut out_cols = Vec::with_capacity(names.len());
        for name in names {
            if out_names.contains(name) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
            out_cols.push(self.column(name)?.to_vec());
            out_names.push(name.clone());
        }
        SeriesTable::new(out_names, out_cols)
    }

    /// Write as RFC-4180 CSV with shortest-roundtrip float formatting, so a
    /// reload reproduces every value exactly.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.names)
            .map_err(|e| csv_error_to_ours(e, self.n_cols()))?;
        let mut record = Vec::with_capacity(self.n_cols());
        for row in 0..self.n_obs() {
            record.clear();
            for col in &self.columns {
                // Values are finite by invariant; integral ones get a ".0"
                // so the column stays visibly numeric.
                let mut buf = ryu_format(col[row]);
                if !buf.contains('.') && !buf.contains('e') {
                    buf.push_str(".0");
                }
                record.push(buf);
            }
            wtr.write_record(&record)
                .map_err(|e| csv_error_to_ours(e, self.n_cols()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

fn ryu_format(v: f64) -> String {
    // `{}` on f64 is Rust's shortest representation that round-trips.
    format!("{v}")
}

fn csv_error_to_ours(e: csv::Error, expected: usize) -> Error {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, len, .. } => Error::RaggedRows {
            row: pos.as_ref().map(|p| p.record() as usize + 1).unwrap_or(0),
            expected,
            found: *len as usize,
        },
        _ => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::EmptyTable(format!("csv error: {other:?}")),
        },
    }
}

/// Load a CSV file. Returns the numeric table plus a report naming any
/// dropped non-numeric columns.
pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<(SeriesTable, LoadReport)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    load_csv_reader(file)
}

/// Same as [`load_csv`] over any reader; header row required.
pub fn load_csv_reader<R: std::io::Read>(r: R) -> Result<(SeriesTable, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(r);

    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error_to_ours(e, 0))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let width = header.len();

    let mut records: Vec<csv::StringRecord> = Vec::new();
    for rec in rdr.records() {
        records.push(rec.map_err(|e| csv_error_to_ours(e, width))?);
    }
    if records.is_empty() {
        return Err(Error::EmptyTable("no data rows".into()));
    }

    // A column is numeric iff its first data cell parses as a number; a later
    // cell that fails to parse, or any non-finite value, is a hard error.
    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut dropped = Vec::new();
    for (ci, name) in header.iter().enumerate() {
        if records[0][ci].parse::<f64>().is_err() {
            dropped.push(name.clone());
            continue;
        }
        let mut col = Vec::with_capacity(records.len());
        for (ri, rec) in records.iter().enumerate() {
            let cell = &rec[ci];
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: ri + 1,
                col: name.clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: ri + 1,
                    col: name.clone(),
                    value: cell.to_string(),
                });
            }
            col.push(v);
        }
        names.push(name.clone());
        columns.push(col);
    }
    if columns.is_empty() {
        return Err(Error::EmptyTable("no numeric columns".into()));
    }

    let n_rows = records.len();
    let table = SeriesTable::new(names, columns)?;
    Ok((table, LoadReport { dropped, n_rows }))
}

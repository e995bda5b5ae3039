//! Numeric CSV datasets with a header row.

use std::io::Read;
use std::path::Path;

use fcvt_core::{DesignMatrix, Matrix};

use crate::{Error, Result};

/// Name given to the prepended intercept column.
pub const INTERCEPT_NAME: &str = "(intercept)";

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: Vec<String>,
    /// Row-major cells, one inner vector per data row.
    pub rows: Vec<Vec<f64>>,
}

/// Response column, by header name or by 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for ResponseColumn {
    type Err = std::convert::Infallible;

    /// All-digit strings are positions; anything else is a name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<usize>() {
            Ok(i) => ResponseColumn::Index(i),
            Err(_) => ResponseColumn::Name(s.to_owned()),
        })
    }
}

/// Design, response and the names of the design columns.
#[derive(Debug, Clone)]
pub struct Regression {
    pub design: DesignMatrix,
    pub response: Vec<f64>,
    pub columns: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || ["na", "nan", "null", "?", "."].contains(&cell.to_ascii_lowercase().as_str())
}

impl Dataset {
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_reader(file)
    }

    /// Parses with `.` as the decimal point regardless of locale; LF and
    /// CRLF line endings give identical results.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row_no = i + 1;
            let row = record
                .iter()
                .zip(&header)
                .map(|(cell, column)| {
                    if is_missing(cell) {
                        return Err(Error::MissingValue {
                            row: row_no,
                            column: column.clone(),
                        });
                    }
                    match cell.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(Error::ParseNumber {
                            row: row_no,
                            column: column.clone(),
                            value: cell.to_owned(),
                        }),
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { header, rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, response: &ResponseColumn) -> Result<usize> {
        match response {
            ResponseColumn::Name(name) => self
                .header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownColumn(name.clone())),
            ResponseColumn::Index(i) if (1..=self.header.len()).contains(i) => Ok(i - 1),
            ResponseColumn::Index(i) => Err(Error::UnknownColumn(format!(
                "#{i} (valid positions are 1..={})",
                self.header.len()
            ))),
        }
    }

    /// Regress `response` on every other column, with a leading column of
    /// ones when `intercept` is set.
    pub fn regression(&self, response: &ResponseColumn, intercept: bool) -> Result<Regression> {
        let target = self.column_index(response)?;
        let mut columns: Vec<String> = Vec::new();
        if intercept {
            columns.push(INTERCEPT_NAME.to_owned());
        }
        let covariates: Vec<usize> = (0..self.header.len()).filter(|&j| j != target).collect();
        columns.extend(covariates.iter().map(|&j| self.header[j].clone()));
        let (n, p) = (self.n(), columns.len());
        if p == 0 || n <= p {
            return Err(fcvt_core::Error::InvalidShape { n, p }.into());
        }
        if n > fcvt_core::MAX_N {
            return Err(fcvt_core::Error::TooLarge {
                n,
                max: fcvt_core::MAX_N,
            }
            .into());
        }
        let offset = usize::from(intercept);
        let x = Matrix::from_fn(n, p, |i, j| {
            if j < offset {
                1.0
            } else {
                self.rows[i][covariates[j - offset]]
            }
        });
        let design = DesignMatrix::new(x).map_err(|e| match e {
            fcvt_core::Error::RankDeficient { columns: cols } => Error::DependentColumns {
                columns: cols.iter().map(|&c| columns[c].clone()).collect(),
            },
            e => e.into(),
        })?;
        let response = self.rows.iter().map(|r| r[target]).collect();
        Ok(Regression {
            design,
            response,
            columns,
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv output>".into(),
            source,
        })?;
        Ok(())
    }
}

//! Complete discrete datasets, stored column-wise.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Largest supported number of states per variable.
pub const MAX_ARITY: usize = 255;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    names: Vec<String>,
    arities: Vec<usize>,
    columns: Vec<Vec<u8>>,
    rows: usize,
    fingerprint: u64,
}

impl Dataset {
    /// Builds a dataset from columns of state indices.
    pub fn from_columns(
        names: Vec<String>,
        arities: Vec<usize>,
        columns: Vec<Vec<u8>>,
    ) -> Result<Self> {
        if names.len() != arities.len() || names.len() != columns.len() {
            return Err(Error::Data(format!(
                "{} names, {} arities, {} columns",
                names.len(),
                arities.len(),
                columns.len()
            )));
        }
        let rows = columns.first().map_or(0, Vec::len);
        for (v, (col, &r)) in columns.iter().zip(&arities).enumerate() {
            if !(2..=MAX_ARITY).contains(&r) {
                return Err(Error::Data(format!(
                    "variable {v} has arity {r}, need 2..={MAX_ARITY}"
                )));
            }
            if col.len() != rows {
                return Err(Error::Data(format!(
                    "column {v} has {} rows, expected {rows}",
                    col.len()
                )));
            }
            if let Some(&bad) = col.iter().find(|&&x| x as usize >= r) {
                return Err(Error::Data(format!(
                    "variable {v}: state {bad} ≥ arity {r}"
                )));
            }
        }
        let fingerprint = fingerprint(&arities, &columns);
        Ok(Dataset {
            names,
            arities,
            columns,
            rows,
            fingerprint,
        })
    }

    /// Builds a dataset from row-major observations, naming variables `X0, X1, ...`.
    pub fn from_rows(arities: Vec<usize>, rows: &[Vec<u8>]) -> Result<Self> {
        let n = arities.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Data(format!(
                    "row {i} has {} values, expected {n}",
                    row.len()
                )));
            }
            for (col, &x) in columns.iter_mut().zip(row) {
                col.push(x);
            }
        }
        Dataset::from_columns(default_names(n), arities, columns)
    }

    pub fn empty(arities: Vec<usize>) -> Result<Self> {
        let n = arities.len();
        Dataset::from_columns(default_names(n), arities, vec![Vec::new(); n])
    }

    pub fn n_vars(&self) -> usize {
        self.arities.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn arity(&self, v: usize) -> usize {
        self.arities[v]
    }

    pub fn column(&self, v: usize) -> &[u8] {
        &self.columns[v]
    }

    pub fn row(&self, i: usize) -> Vec<u8> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Content hash of arities and observations; identifies the dataset for score caches.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Reads CSV with a header of variable names and integer state cells.
    /// Arities default to `max(max state + 1, 2)` per column.
    pub fn read_csv<R: Read>(reader: R, arities: Option<&[usize]>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let names: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let n = names.len();
        let mut columns = vec![Vec::new(); n];
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != n {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: format!("{} fields, expected {n}", rec.len()),
                });
            }
            for (col, field) in columns.iter_mut().zip(rec.iter()) {
                let x: u8 = field.trim().parse().map_err(|_| Error::Parse {
                    line: i + 2,
                    msg: format!("`{field}` is not a state index in 0..{MAX_ARITY}"),
                })?;
                col.push(x);
            }
        }
        let arities = match arities {
            Some(a) => {
                if a.len() != n {
                    return Err(Error::Data(format!("{} arities for {n} columns", a.len())));
                }
                a.to_vec()
            }
            None => columns
                .iter()
                .map(|c| c.iter().map(|&x| x as usize + 1).max().unwrap_or(0).max(2))
                .collect(),
        };
        Dataset::from_columns(names, arities, columns)
    }

    pub fn read_csv_path(path: &Path, arities: Option<&[usize]>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, arities)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(writer);
        writeln!(w, "{}", self.names.join(","))?;
        let mut line = String::new();
        for i in 0..self.rows {
            line.clear();
            for (v, col) in self.columns.iter().enumerate() {
                if v > 0 {
                    line.push(',');
                }
                let _ = write!(line, "{}", col[i]);
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|v| format!("X{v}")).collect()
}

/// FNV-1a over arities and column contents.
fn fingerprint(arities: &[usize], columns: &[Vec<u8>]) -> u64 {
    const PRIME: u64 = 0x100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    };
    for &r in arities {
        for b in (r as u64).to_le_bytes() {
            eat(b);
        }
    }
    for col in columns {
        for b in (col.len() as u64).to_le_bytes() {
            eat(b);
        }
        for &x in col {
            eat(x);
        }
    }
    h
}

use std::path::Path;

use crate::error::{Error, Result};

/// A header plus rows of numbers.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::LengthMismatch { left: row.len(), right: self.header.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Write `table` as CSV. Floats use the shortest representation that
/// parses back to the same value.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(&table.header).map_err(wrap)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(wrap)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let header = r.headers().map_err(wrap)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(wrap)?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Config(format!("{}: bad number '{s}'", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

//! Numeric CSV with `#` comment lines. Values are written with 17 significant
//! digits so that parsing recovers them bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const COLUMNS_PREFIX: &str = "# columns: ";

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Free-form lines written as `# ...` above the column line.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match columns");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{COLUMNS_PREFIX}{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = CsvTable::new(Vec::<String>::new());
        for (i, line) in text.lines().enumerate() {
            if let Some(cols) = line.strip_prefix(COLUMNS_PREFIX) {
                table.columns = cols.split(',').map(str::to_string).collect();
            } else if let Some(c) = line.strip_prefix('#') {
                table.comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            } else if !line.trim().is_empty() {
                let row = line
                    .split(',')
                    .map(|cell| cell.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidArgument(format!("csv line {}: {e}", i + 1)))?;
                if row.len() != table.columns.len() {
                    return Err(Error::InvalidArgument(format!(
                        "csv line {}: {} cells for {} columns",
                        i + 1,
                        row.len(),
                        table.columns.len()
                    )));
                }
                table.rows.push(row);
            }
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::DMatrix;

/// A CSV file with a header row.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    source: String,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let source = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("cannot read {source}"))?;
        let headers = reader
            .headers()
            .with_context(|| format!("{source}: malformed header"))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.with_context(|| format!("{source}: malformed CSV"))?;
            rows.push(record.iter().map(str::to_owned).collect());
        }
        if rows.is_empty() {
            bail!("{source}: no data rows");
        }
        Ok(Self { headers, rows, source })
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            anyhow!(
                "{}: no column named '{name}' (columns: {})",
                self.source,
                self.headers.join(", ")
            )
        })
    }

    /// Numeric matrix of every column except `skip`.
    pub fn numeric(&self, skip: Option<usize>) -> Result<DMatrix<f64>> {
        let cols: Vec<usize> = (0..self.headers.len()).filter(|&j| Some(j) != skip).collect();
        if cols.is_empty() {
            bail!("{}: no numeric columns", self.source);
        }
        let mut m = DMatrix::zeros(self.rows.len(), cols.len());
        for (i, row) in self.rows.iter().enumerate() {
            for (k, &j) in cols.iter().enumerate() {
                let cell = &row[j];
                m[(i, k)] = cell.parse::<f64>().map_err(|_| {
                    anyhow!(
                        "{}: row {}, column '{}': '{cell}' is not a number",
                        self.source,
                        i + 2,
                        self.headers[j]
                    )
                })?;
            }
        }
        Ok(m)
    }

    pub fn column(&self, j: usize) -> Vec<String> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    Table::read(path)?.numeric(None)
}

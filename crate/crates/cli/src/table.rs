//! Rectangular numeric result tables and their CSV/JSON encodings.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} values, expected {expected}")]
    Width {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("row {row}, column `{column}`: non-finite value {value}")]
    NonFinite {
        row: usize,
        column: String,
        value: f64,
    },
    #[error("malformed table: {0}")]
    Parse(String),
}

/// Column-named table of finite reals plus `key = value` metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn add_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), TableError> {
        let index = self.rows.len();
        if row.len() != self.columns.len() {
            return Err(TableError::Width {
                row: index,
                got: row.len(),
                expected: self.columns.len(),
            });
        }
        if let Some((c, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(TableError::NonFinite {
                row: index,
                column: self.columns[c].clone(),
                value: *v,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Values of one column, if present.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// `{min, max}` of every column.
    pub fn extrema(&self) -> Map<String, Value> {
        let mut out = Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            let values = self.rows.iter().map(|r| r[i]);
            let min = values.clone().fold(f64::INFINITY, f64::min);
            let max = values.fold(f64::NEG_INFINITY, f64::max);
            if min.is_finite() {
                out.insert(name.clone(), json!({ "min": min, "max": max }));
            }
        }
        out
    }

    /// CSV with a `#`-prefixed metadata block. Values carry 17 significant
    /// digits so that parsing them back is exact.
    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}").expect("writing to memory");
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|v| format!("{v:.16e}")))
                .expect("writing to memory");
        }
        let bytes = writer.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("ascii output")
    }

    pub fn from_csv(text: &str) -> Result<Self, TableError> {
        let mut metadata = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some((k, v)) = body.split_once(" = ") {
                metadata.push((k.to_string(), v.to_string()));
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| TableError::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = Self {
            columns,
            rows: Vec::new(),
            metadata,
        };
        for record in reader.records() {
            let record = record.map_err(|e| TableError::Parse(e.to_string()))?;
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| TableError::Parse(format!("`{f}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    /// JSON document with metadata, columns, rows and a free-form summary.
    pub fn to_json(&self, summary: &Map<String, Value>) -> String {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let doc = json!({
            "metadata": metadata,
            "columns": self.columns,
            "rows": self.rows,
            "summary": summary,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("finite values serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| TableError::Parse(e.to_string()))?;
        let field = |name: &str| {
            doc.get(name)
                .ok_or_else(|| TableError::Parse(format!("missing `{name}`")))
        };
        let columns = serde_json::from_value::<Vec<String>>(field("columns")?.clone())
            .map_err(|e| TableError::Parse(e.to_string()))?;
        let rows = serde_json::from_value::<Vec<Vec<f64>>>(field("rows")?.clone())
            .map_err(|e| TableError::Parse(e.to_string()))?;
        let metadata = field("metadata")?
            .as_object()
            .ok_or_else(|| TableError::Parse("`metadata` is not an object".into()))?
            .iter()
            .map(|(k, v)| (k.clone(), v.as_str().unwrap_or_default().to_string()))
            .collect();
        let mut table = Self {
            columns,
            rows: Vec::new(),
            metadata,
        };
        for row in rows {
            table.push_row(row)?;
        }
        Ok(table)
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

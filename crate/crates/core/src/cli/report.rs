//! CSV reports with a `#` metadata header.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A table of numeric columns plus `key: value` metadata lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveReport {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    /// Missing entries are written as empty fields.
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CurveReport {
    pub fn new(columns: &[&str]) -> Self {
        CurveReport { meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Render as CSV. Floats use the shortest exact representation.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(|x| x.to_string()).unwrap_or_default()).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut report = CurveReport::default();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix("# ") {
                if header_seen {
                    return Err(Error::Config(format!("line {}: metadata after the column header", i + 1)));
                }
                let (k, v) = rest.split_once(": ").ok_or_else(|| Error::Config(format!("line {}: malformed metadata", i + 1)))?;
                report.meta.push((k.to_string(), v.to_string()));
            } else if !header_seen {
                report.columns = line.split(',').map(str::to_string).collect();
                header_seen = true;
            } else {
                let row: Vec<Option<f64>> = line
                    .split(',')
                    .map(|c| {
                        if c.is_empty() {
                            Ok(None)
                        } else {
                            c.parse::<f64>().map(Some).map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))
                        }
                    })
                    .collect::<Result<_>>()?;
                if row.len() != report.columns.len() {
                    return Err(Error::Config(format!("line {}: expected {} fields", i + 1, report.columns.len())));
                }
                report.rows.push(row);
            }
        }
        if !header_seen {
            return Err(Error::Config("report has no column header".into()));
        }
        Ok(report)
    }
}

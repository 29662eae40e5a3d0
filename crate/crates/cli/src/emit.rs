//! CSV and JSON emission. Floats are rendered with 17 significant digits
//! (round-trip exact for f64), LF line endings, UTF-8 — the basis of the
//! byte-identical determinism contract.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits: 1 leading + 16 fractional.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub enum ColumnData {
    Float(Vec<f64>),
    Int(Vec<i64>),
    Str(Vec<String>),
}

pub struct Column {
    pub name: &'static str,
    pub data: ColumnData,
}

impl Column {
    pub fn float(name: &'static str, data: Vec<f64>) -> Self {
        Self {
            name,
            data: ColumnData::Float(data),
        }
    }

    pub fn int(name: &'static str, data: Vec<i64>) -> Self {
        Self {
            name,
            data: ColumnData::Int(data),
        }
    }

    pub fn text(name: &'static str, data: Vec<String>) -> Self {
        Self {
            name,
            data: ColumnData::Str(data),
        }
    }

    fn len(&self) -> usize {
        match &self.data {
            ColumnData::Float(v) => v.len(),
            ColumnData::Int(v) => v.len(),
            ColumnData::Str(v) => v.len(),
        }
    }

    fn cell(&self, row: usize) -> String {
        match &self.data {
            ColumnData::Float(v) => format_float(v[row]),
            ColumnData::Int(v) => v[row].to_string(),
            ColumnData::Str(v) => v[row].clone(),
        }
    }
}

/// Header row plus one line per row, comma separated.
pub fn write_csv(path: &Path, columns: &[Column]) -> Result<(), CliError> {
    let rows = columns.first().map(Column::len).unwrap_or(0);
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|c| c.name).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..rows {
        let cells: Vec<String> = columns.iter().map(|c| c.cell(row)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::numeric(format!("serializing summary: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn ensure_dir(path: &PathBuf) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::io(format!("creating output directory {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips_exactly() {
        for x in [
            2.5,
            -1.0 / 3.0,
            1.401155189092051,
            6.62607015e-34,
            1.7976931348623157e308,
            5e-324,
        ] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_row_count_and_line_endings() {
        let dir = std::env::temp_dir().join(format!("qchaos-emit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("three.csv");
        write_csv(
            &path,
            &[
                Column::float("t", vec![1.0, 2.0, 3.0]),
                Column::float("delta", vec![0.5, 1.5, 2.5]),
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4); // header + 3 rows
        assert!(!text.contains('\r'));
        assert!(text.starts_with("t,delta\n"));
        std::fs::remove_dir_all(&dir).ok();
    }
}

//! Data files: one positive value per line, or a single-column CSV with an
//! optional header line. Blank lines and `#` comments are skipped.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::families::Sample;

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
}

impl DataFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let values = parse_values(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            values,
        })
    }

    pub fn sample(&self) -> Result<Sample> {
        Sample::new(self.values.clone())
    }
}

pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        let field = line.strip_suffix(',').unwrap_or(line).trim();
        if field.contains(',') || field.contains(';') || field.contains('\t') {
            return Err(Error::Config(format!("line {line_no}: expected a single column, found `{line}`")));
        }
        let field = field.trim_matches('"');
        match field.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Config(format!(
                    "line {line_no}: value {v} is not a positive finite number"
                )))
            }
            // A non-numeric first line is a header.
            Err(_) if first && field.chars().any(|c| c.is_alphabetic()) => {}
            Err(_) => return Err(Error::Config(format!("line {line_no}: cannot parse `{field}` as a number"))),
        }
    }
    if values.is_empty() {
        return Err(Error::Config("no data values found".into()));
    }
    Ok(values)
}

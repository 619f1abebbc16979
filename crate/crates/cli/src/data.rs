//! Sample input: embedded data sets or plain-text files.

use std::path::Path;

use infodisp::datasets::{self, Dataset};

use crate::{CliError, CliResult};

/// Values from a text file: one or more per line, separated by commas or
/// whitespace; `#` starts a comment.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => {
                    return Err(CliError::usage(format!(
                        "line {}: '{tok}' is not a finite number",
                        i + 1
                    )))
                }
            }
        }
    }
    Ok(out)
}

/// Embedded data set by name, otherwise a file path.
pub fn load(name_or_path: &str) -> CliResult<Dataset> {
    if let Some(d) = datasets::by_name(name_or_path) {
        return Ok(d);
    }
    let path = Path::new(name_or_path);
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::io(format!(
            "cannot read '{name_or_path}' ({e}); embedded data sets are coin3 and murthy41"
        ))
    })?;
    let values = parse_values(&text)?;
    Ok(Dataset::Continuous(
        infodisp::SampleData::new(values).map_err(|e| CliError::usage(format!("{name_or_path}: {e}")))?,
    ))
}

/// Interprets a data set as outcome counts `c_0, c_1, ...`.
pub fn as_counts(d: &Dataset) -> CliResult<Vec<u64>> {
    match d {
        Dataset::Counts(c) => Ok(c.clone()),
        Dataset::Continuous(s) => s
            .values()
            .iter()
            .map(|&v| {
                if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
                    Ok(v as u64)
                } else {
                    Err(CliError::usage(format!("count data must be non-negative integers, got {v}")))
                }
            })
            .collect(),
    }
}

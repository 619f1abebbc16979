//! Command implementations behind the `infodisp` binary.

#![forbid(unsafe_code)]

pub mod commands;
pub mod data;
pub mod spec;

use std::fmt;
use std::io::Write;
use std::path::Path;

pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_COMPUTE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn compute(message: impl Into<String>) -> Self {
        CliError { code: EXIT_COMPUTE, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: EXIT_IO, message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        CliError { code: EXIT_MISMATCH, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<infodisp::Error> for CliError {
    fn from(e: infodisp::Error) -> Self {
        CliError::compute(e.to_string())
    }
}

impl From<spec::SpecError> for CliError {
    fn from(e: spec::SpecError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// `%g`-style formatting with `digits` significant digits; non-finite values
/// print as `inf`, `-inf`, `nan`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_full(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// Writes `text` to `path`, or to `out` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(CliError::from),
    }
}

/// Left-aligned text table.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let line = |cells: Vec<&str>, s: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        s.push_str(parts.join("  ").trim_end());
        s.push('\n');
    };
    line(header.to_vec(), &mut s);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut s);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1.0, 6), "1");
        assert_eq!(fmt_sig(2.0 - std::f64::consts::LN_2, 6), "1.30685");
        assert_eq!(fmt_sig(0.0011465117, 6), "0.00114651");
        assert_eq!(fmt_sig(1.1953e-9, 6), "1.1953e-9");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(fmt_sig(-25.0, 6), "-25");
        assert_eq!(fmt_sig(f64::INFINITY, 6), "inf");
        assert_eq!(fmt_sig(0.099, 2), "0.099");
        assert_eq!(fmt_sig(9.99999e5, 3), "1e6");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(fmt_full(x).parse::<f64>().unwrap(), x);
        }
    }
}

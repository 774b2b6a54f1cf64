use std::fmt;
use std::io::{self, Write};

use serde_json::{Map, Value};

/// Version stamped into every JSON document as `"schema"`.
pub const SCHEMA: u32 = 1;

/// Failure carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1.
    Verification(String),
    /// Exit 2.
    Usage(String),
    /// Exit 3.
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(m) | CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<fpsearch::Error> for CliError {
    fn from(e: fpsearch::Error) -> Self {
        use fpsearch::Error as E;
        match e {
            E::Io(_) => CliError::Io(e.to_string()),
            E::Overflow { .. } | E::AncillaLeak { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// 17 significant digits: round-trips every `f64`.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// `delta_sq` in `[0, 1]`, returned as `δ`.
pub fn delta_from_sq(delta_sq: f64) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&delta_sq) {
        return Err(CliError::Usage(format!("--delta-sq must lie in [0, 1], got {delta_sq}")));
    }
    Ok(delta_sq.sqrt())
}

/// Prepends `"schema": 1` to a JSON object.
pub fn with_schema(body: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), SCHEMA.into());
    if let Value::Object(fields) = body {
        obj.extend(fields);
    }
    Value::Object(obj)
}

pub fn print_json(body: Value) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &with_schema(body)).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Two-column `key value` block.
pub fn print_pairs(rows: &[(&str, String)]) -> Result<(), CliError> {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = io::stdout().lock();
    for (k, v) in rows {
        writeln!(out, "{k:<width$}  {v}")?;
    }
    Ok(())
}

/// Header plus rows as RFC 4180 CSV on stdout.
pub fn print_csv(header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

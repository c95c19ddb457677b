//! Report serialization: pretty JSON documents plus round-trip-safe CSV for
//! sweep rows (17 significant digits).

use cheeger_core::{CheegerError, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CheegerError::InvalidConfig(format!("serialize report: {e}")))?;
    std::fs::write(path, text.as_bytes())
        .map_err(|e| CheegerError::InvalidConfig(format!("write {}: {e}", path.display())))?;
    Ok(())
}

/// Format a float with 17 significant digits (round-trip safe for f64).
pub fn csv_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    format!("{:.16e}", x)
}

pub struct CsvWriter {
    out: std::io::BufWriter<std::fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = std::fs::File::create(path)
            .map_err(|e| CheegerError::InvalidConfig(format!("create {}: {e}", path.display())))?;
        let mut out = std::io::BufWriter::new(file);
        writeln!(out, "{}", header.join(","))
            .map_err(|e| CheegerError::InvalidConfig(format!("write csv: {e}")))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))
            .map_err(|e| CheegerError::InvalidConfig(format!("write csv: {e}")))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out
            .flush()
            .map_err(|e| CheegerError::InvalidConfig(format!("flush csv: {e}")))
    }
}

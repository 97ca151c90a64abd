//! Deterministic report serialization.
//!
//! JSON is the canonical format; CSV is a flat projection for spreadsheets.
//! Every report is wrapped in a self-describing envelope carrying the schema
//! version, tool version, the run configuration and the full tolerance
//! ladder. Floating-point numbers are serialized with 17 significant digits
//! (`{:.16e}`), enough for a lossless round-trip of every double; repeated
//! runs with identical configuration produce byte-identical files. CSV uses
//! RFC 4180 conventions: CRLF line endings and double-quote escaping.

use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "minsurf-report/1";

#[derive(Serialize)]
struct ToolInfo {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: &'static str,
    tool: ToolInfo,
    kind: &'a str,
    config: &'a RunConfig,
    report: &'a T,
}

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize any report payload into the versioned JSON envelope.
pub fn to_json<T: Serialize>(kind: &str, config: &RunConfig, report: &T) -> Result<String> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo {
            name: "minsurf",
            version: env!("CARGO_PKG_VERSION"),
        },
        kind,
        config,
        report,
    };
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    envelope
        .serialize(&mut ser)
        .map_err(|e| Error::Usage(format!("report serialization failed: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Usage(format!("non-utf8 report: {e}")))
}

/// 17-significant-digit float rendering for CSV cells.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn csv_field(field: &str) -> String {
    if field.contains(['"', ',', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// RFC 4180 CSV: header row, CRLF endings.
pub fn to_csv(columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(
        &columns
            .iter()
            .map(|c| csv_field(c))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push_str("\r\n");
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("\r\n");
    }
    out
}

/// Write to the given path, or stdout when no path is set.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

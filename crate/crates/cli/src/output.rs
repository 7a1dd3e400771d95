use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

/// A rendered result, ready to be written out.
pub enum Artifact {
    Json(Value),
    Csv(String),
}

impl Artifact {
    pub fn json<T: Serialize>(value: &T) -> Result<Self, CliError> {
        serde_json::to_value(value)
            .map(Artifact::Json)
            .map_err(|e| CliError::io(format!("serialization failed: {e}")))
    }

    fn render(&self) -> String {
        match self {
            Artifact::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("Value always serializes");
                s.push('\n');
                s
            }
            Artifact::Csv(s) => s.clone(),
        }
    }

    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io(format!("cannot write stdout: {e}")))
            }
        }
    }
}

pub fn resolve(format: Option<Format>, default: Format) -> Format {
    format.unwrap_or(default)
}

/// Float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header and one row per record. Cells are preformatted.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[derive(Debug)]
pub enum CliError {
    Lib(sl_extremal::Error),
    /// Bad input that never reached the library: unreadable files, malformed JSON, bad env.
    Input { kind: &'static str, message: String },
    Io(String),
}

impl CliError {
    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::Input {
            kind,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError::Io(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_solver_failure() => 3,
            _ => 2,
        }
    }

    pub fn to_json_line(&self) -> String {
        let (kind, message) = match self {
            CliError::Lib(e) => (e.kind(), e.to_string()),
            CliError::Input { kind, message } => (*kind, message.clone()),
            CliError::Io(message) => ("Io", message.clone()),
        };
        json!({ "error": kind, "message": message }).to_string()
    }
}

impl From<sl_extremal::Error> for CliError {
    fn from(e: sl_extremal::Error) -> Self {
        CliError::Lib(e)
    }
}

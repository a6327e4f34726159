use std::fmt;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::Format;

/// Where the report goes and in which format.
pub struct Output {
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Lib(farey_gauss::Error),
    Io(std::io::Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_validation() => 2,
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<farey_gauss::Error> for CliError {
    fn from(e: farey_gauss::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Floats in CSV: 17 significant digits, '.' decimal separator.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        s.push_str(k);
        s.push(',');
        s.push_str(v);
        s.push('\n');
    }
    s
}

/// Prints the summary and writes the report, `{"command", "config", "result"}` in JSON.
pub fn emit<C: Serialize, R: Serialize>(
    out: &Output,
    command: &str,
    config: &C,
    result: &R,
    csv: impl FnOnce() -> String,
    summary: &str,
) -> CliResult<()> {
    let body = match out.format {
        Format::Json => {
            let mut config = serde_json::to_value(config).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Value::Object(m) = &mut config {
                m.insert("format".into(), json!("json"));
            }
            let v = json!({ "command": command, "config": config, "result": result });
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Usage(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => csv(),
    };
    match out.path.as_deref() {
        Some("-") => std::io::stdout().write_all(body.as_bytes())?,
        Some(p) => {
            print!("{summary}");
            std::fs::write(p, body)?;
        }
        None => print!("{summary}"),
    }
    Ok(())
}

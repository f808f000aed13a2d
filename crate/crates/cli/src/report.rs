//! Report envelope shared by every command: one JSON document on
//! stdout (optionally mirrored to a file) plus an optional CSV table.
//! With `--no-timestamp` the document is a pure function of the
//! settings, so identical runs emit identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::settings::{input_err, CliResult, Settings};

pub const VERDICT_PASS: &str = "PASS";
pub const VERDICT_FAIL: &str = "FAIL";
/// For commands that report observations without a pass/fail contract.
pub const VERDICT_REPORT: &str = "REPORT";

#[derive(Serialize)]
pub struct Envelope {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub convention: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub results: Value,
    pub verdict: String,
}

pub struct CommandOutput {
    pub results: Value,
    pub verdict: &'static str,
    pub csv: Option<String>,
}

impl Envelope {
    pub fn new(command: &str, settings: &Settings, out: &CommandOutput) -> CliResult<Self> {
        let timestamp = if settings.get_bool("no-timestamp")? {
            None
        } else {
            Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        };
        Ok(Envelope {
            command: command.to_string(),
            config: settings.values().clone(),
            convention: valdisc::tol::CONVENTION,
            timestamp,
            results: out.results.clone(),
            verdict: out.verdict.to_string(),
        })
    }

    /// Print the JSON document and write any requested files.
    pub fn emit(&self, settings: &Settings, csv: Option<&str>) -> CliResult<()> {
        let json = match serde_json::to_string_pretty(self) {
            Ok(j) => j,
            Err(e) => return input_err(format!("cannot serialize report: {e}")),
        };
        println!("{json}");
        if let Some(path) = settings.get("out-json") {
            write_file(Path::new(path), &(json + "\n"))?;
        }
        if let Some(path) = settings.get("out-csv") {
            match csv {
                Some(table) => write_file(Path::new(path), table)?,
                None => return input_err("this run produced no CSV table".to_string()),
            }
        }
        Ok(())
    }
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    match fs::write(path, content) {
        Ok(()) => Ok(()),
        Err(e) => input_err(format!("cannot write {}: {e}", path.display())),
    }
}

/// Serialize a library report into the results slot.
pub fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| {
        crate::settings::CliError::Input(format!("cannot serialize results: {e}"))
    })
}

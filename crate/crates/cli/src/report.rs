//! JSON reports and CSV tables. Reports carry no timestamps, so equal
//! configurations give equal bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const TOOL: &str = "coexact";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    result: &'a T,
}

pub struct Table {
    pub name: String,
    pub csv: String,
}

/// A rendered report and its tables.
pub struct Output {
    pub json: String,
    pub tables: Vec<Table>,
    /// Lines for the terminal besides the report (used by `verify-all`).
    pub summary: Option<String>,
    /// Set when the command ran but its checks failed; the report is still
    /// written.
    pub failure: Option<CliError>,
}

impl Output {
    pub fn new<T: Serialize>(config: &ExperimentConfig, result: &T, tables: Vec<Table>) -> Result<Self, CliError> {
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            command: config.command.name(),
            config,
            result,
        };
        let mut json = serde_json::to_string_pretty(&env).map_err(|e| CliError::Numerical {
            module: "report",
            message: e.to_string(),
        })?;
        json.push('\n');
        Ok(Self {
            json,
            tables,
            summary: None,
            failure: None,
        })
    }
}

/// `r.json` → `r.<name>.csv`
pub fn table_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}.{name}.csv"))
}

/// Writes the report to `out` and tables beside it, or prints the report
/// (and summary) to stdout when there is no output path.
pub fn write_output(output: &Output, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(s) = &output.summary {
        print!("{s}");
    }
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(path, &output.json).map_err(|e| CliError::io(path, e))?;
            for t in &output.tables {
                let p = table_path(path, &t.name);
                std::fs::write(&p, &t.csv).map_err(|e| CliError::io(&p, e))?;
            }
        }
        None if output.summary.is_none() => print!("{}", output.json),
        None => {}
    }
    Ok(())
}

/// CSV with a header row; values use the shortest round-trip formatting.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.as_ref().join(","));
        s.push('\n');
    }
    s
}

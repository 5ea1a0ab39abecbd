//! Output files with the shared metadata header.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identifies the run that produced a file.
pub struct Meta<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
}

impl Meta<'_> {
    /// `#`-prefixed header for CSV, OFF and pulse text files.
    pub fn comment_header(&self) -> String {
        format!(
            "# aiii-quench {VERSION}\n# command {}\n# seed {}\n# config_sha256 {}\n# config {}\n",
            self.command,
            self.config.seed,
            self.config.hash(),
            self.config.echo()
        )
    }

    /// `meta` object placed first in every JSON report.
    pub fn json(&self) -> Value {
        let config: Value = serde_json::from_str(&self.config.echo()).expect("echo is valid JSON");
        json!({
            "version": VERSION,
            "command": self.command,
            "seed": self.config.seed,
            "config_sha256": self.config.hash(),
            "config": config,
        })
    }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(OutDir { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes the comment header followed by `body`.
    pub fn write_text(&self, name: &str, meta: &Meta, body: &str) -> Result<PathBuf, CliError> {
        self.write_raw(name, &format!("{}{body}", meta.comment_header()))
    }

    /// Writes `{"meta": …, …report}` pretty-printed.
    pub fn write_json<T: Serialize>(&self, name: &str, meta: &Meta, report: &T) -> Result<PathBuf, CliError> {
        let mut doc = serde_json::Map::new();
        doc.insert("meta".into(), meta.json());
        match serde_json::to_value(report).expect("report serializes") {
            Value::Object(fields) => doc.extend(fields),
            other => {
                doc.insert("report".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON serializes");
        text.push('\n');
        self.write_raw(name, &text)
    }

    fn write_raw(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}

//! Report files. Each one starts with a manifest identifying the tool
//! version, the command and the exact configuration used.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{RunConfig, EXECUTION_KEYS};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: &RunConfig) -> Self {
        Self {
            tool: "pfaffkp",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config_sha256: config.hash(),
            seed: config.goe.seed,
        }
    }

    fn csv_header(&self) -> String {
        format!(
            "# tool: {}\n# version: {}\n# command: {}\n# config_sha256: {}\n# seed: {}\n",
            self.tool, self.version, self.command, self.config_sha256, self.seed
        )
    }
}

/// Writes reports under one directory.
pub struct OutputDir {
    root: PathBuf,
    manifest: Manifest,
}

impl OutputDir {
    pub fn create(root: &Path, manifest: Manifest) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
        })
    }

    /// CSV with `# key: value` manifest lines, a header row and data rows.
    pub fn csv(&self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut text = self.manifest.csv_header();
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            let _ = writeln!(text, "{}", row.join(","));
        }
        self.write(name, &text)
    }

    /// JSON object `{ "manifest": …, "config": …, "report": … }`. The
    /// config omits the execution keys, matching the manifest hash.
    pub fn json<T: Serialize>(&self, name: &str, config: &RunConfig, report: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            manifest: &'a Manifest,
            config: serde_json::Value,
            report: &'a T,
        }
        let mut config = serde_json::to_value(config)?;
        if let Some(map) = config.as_object_mut() {
            for key in EXECUTION_KEYS {
                map.remove(key);
            }
        }
        let text = serde_json::to_string_pretty(&Doc {
            manifest: &self.manifest,
            config,
            report,
        })?;
        self.write(name, &(text + "\n"))
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Shortest round-trip rendering of a float.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

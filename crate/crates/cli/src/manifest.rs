use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    /// `-` for standard input or output.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub versions: Versions,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    #[serde(rename = "usf-lab")]
    pub lab: &'static str,
    #[serde(rename = "usf-core")]
    pub core: &'static str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Tracks every file read and written during a run.
pub struct Run {
    started: Instant,
    pub settings: Settings,
    /// Subcommand options, merged into the config snapshot.
    pub options: serde_json::Map<String, serde_json::Value>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Run {
    pub fn new(settings: Settings) -> Self {
        Self {
            started: Instant::now(),
            settings,
            options: serde_json::Map::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn option(&mut self, key: &str, value: impl Serialize) {
        self.options.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
    }

    /// Reads a file, or standard input for `None` or `-`.
    pub fn read(&mut self, path: Option<&Path>) -> Result<String> {
        let (name, bytes) = match path {
            Some(p) if p != Path::new("-") => (
                p.display().to_string(),
                std::fs::read(p).with_context(|| format!("cannot read {}", p.display()))?,
            ),
            _ => {
                let mut buf = Vec::new();
                std::io::stdin()
                    .read_to_end(&mut buf)
                    .context("cannot read standard input")?;
                ("-".to_string(), buf)
            }
        };
        self.inputs.push(FileDigest {
            path: name.clone(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).with_context(|| format!("{name} is not UTF-8"))
    }

    /// Writes a file, or standard output for `None` or `-`.
    pub fn write(&mut self, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
        let name = match path {
            Some(p) if p != Path::new("-") => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)
                        .with_context(|| format!("cannot create {}", dir.display()))?;
                }
                std::fs::write(p, bytes)
                    .with_context(|| format!("cannot write {}", p.display()))?;
                p.display().to_string()
            }
            _ => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                "-".to_string()
            }
        };
        self.outputs.push(FileDigest {
            path: name,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Writes the manifest to `dir/manifest.json`, or to standard error
    /// without a directory.
    pub fn finish(self, command_line: Vec<String>, dir: Option<PathBuf>) -> Result<()> {
        let mut config = serde_json::to_value(&self.settings)?;
        if let serde_json::Value::Object(map) = &mut config {
            map.insert("options".into(), serde_json::Value::Object(self.options));
        }
        let manifest = RunManifest {
            command_line,
            config,
            seed: self.settings.seed,
            versions: Versions {
                lab: env!("CARGO_PKG_VERSION"),
                core: usf_core::VERSION,
            },
            inputs: self.inputs,
            outputs: self.outputs,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        match dir {
            Some(dir) => {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                let path = dir.join("manifest.json");
                std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            None => eprint!("{text}"),
        }
        Ok(())
    }
}

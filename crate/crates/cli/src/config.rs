//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Contents of a `--config` file. Every key is optional.
///
/// ```toml
/// seed = 7
/// threads = 4
/// out = "runs/a"
///
/// [sample]
/// n = 100000
///
/// [pack]
/// model = "disc"
/// tolerance = 1e-12
///
/// [exp]
/// p = 3
/// q = 7
/// depth = 8
/// n = 20000
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub pack: PackConfig,
    #[serde(default)]
    pub exp: ExpConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackConfig {
    pub model: Option<String>,
    pub tolerance: Option<f64>,
    pub max_sweeps: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpConfig {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub depth: Option<usize>,
    pub n: Option<usize>,
    pub censor_layers: Option<usize>,
    pub bootstrap: Option<usize>,
    pub rings: Option<usize>,
    pub c: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))
    }
}

/// The resolved settings shared by every subcommand, recorded in the
/// manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub seed: u64,
    /// `None` means the available parallelism.
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub config_file: Option<PathBuf>,
}

/// First of flag, config value and default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

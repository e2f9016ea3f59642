use std::path::Path;

use anyhow::{Context, Result};
use quadrange::linalg::ToleranceConfig;
use serde::Deserialize;

/// Settings read from a TOML file; every field is optional.
///
/// ```toml
/// seed = 7
/// samples = 10000
/// angles = 720
/// boundary_points = 512
///
/// [tolerances]
/// eq_tol = 1e-9
/// geom_tol = 1e-9
/// eig_tol = 1e-12
/// max_sweeps = 64
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub samples: usize,
    pub angles: usize,
    pub boundary_points: usize,
    pub tolerances: ToleranceConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 10_000,
            angles: 720,
            boundary_points: 512,
            tolerances: ToleranceConfig::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read config", path.display()))?;
        let cfg: Config = toml::from_str(&text).with_context(|| format!("{}: malformed config", path.display()))?;
        cfg.tolerances
            .validate()
            .with_context(|| format!("{}: invalid tolerances", path.display()))?;
        Ok(cfg)
    }
}

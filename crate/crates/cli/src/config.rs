use std::path::{Path, PathBuf};

use kleislikit::guard::GUARD_ENV;
use kleislikit::instances::CorpusConfig;
use kleislikit::Guard;
use serde::Deserialize;

/// Looked up relative to the working directory when `--config` is absent.
pub const DEFAULT_CONFIG: &str = "config/kleislikit.toml";

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub guard: GuardConfig,
    pub corpus: CorpusConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuardConfig {
    pub bound: Option<u128>,
}

impl Config {
    /// An explicit path must exist; the default path is optional.
    pub fn load(path: Option<&Path>) -> Result<Config, String> {
        let (path, required) = match path {
            Some(p) => (p.to_path_buf(), true),
            None => (PathBuf::from(DEFAULT_CONFIG), false),
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
            Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => Ok(Config::default()),
            Err(e) => Err(format!("{}: {e}", path.display())),
        }
    }

    /// `--guard`, then the environment, then the config file, then the
    /// built-in default.
    pub fn guard(&self, flag: Option<u128>) -> Result<Guard, String> {
        if let Some(bound) = flag {
            return Ok(Guard::new(bound));
        }
        if let Ok(v) = std::env::var(GUARD_ENV) {
            let bound = v
                .trim()
                .parse()
                .map_err(|_| format!("{GUARD_ENV}: `{v}` is not a non-negative integer"))?;
            return Ok(Guard::new(bound));
        }
        Ok(self.guard.bound.map(Guard::new).unwrap_or_default())
    }
}

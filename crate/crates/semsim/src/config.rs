//! Flat key=value run configuration. Flags override file values; the
//! `SEMSIM_CONFIG` environment variable names the default file.

use crate::evaluation::SweepConfig;
use crate::lsa::Weighting;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CONFIG_ENV_VAR: &str = "SEMSIM_CONFIG";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_LSA_K: usize = 50;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub taxonomy_simple: Option<PathBuf>,
    pub wordnet_index: Option<PathBuf>,
    pub wordnet_data: Option<PathBuf>,
    pub ic_corpus: Option<PathBuf>,
    pub lsa_corpus: Option<PathBuf>,
    pub lsa_k: usize,
    pub lsa_weighting: Weighting,
    pub sweep: SweepConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            taxonomy_simple: None,
            wordnet_index: None,
            wordnet_data: None,
            ic_corpus: None,
            lsa_corpus: None,
            lsa_k: DEFAULT_LSA_K,
            lsa_weighting: Weighting::LogEntropy,
            sweep: SweepConfig::default(),
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Parse {
                    line: lineno,
                    message: format!("expected key=value, got {line:?}"),
                });
            };
            config.apply(key.trim(), value.trim()).map_err(|message| {
                ConfigError::Parse {
                    line: lineno,
                    message,
                }
            })?;
        }
        Ok(config)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "taxonomy.simple" => self.taxonomy_simple = Some(PathBuf::from(value)),
            "taxonomy.wordnet.index" => self.wordnet_index = Some(PathBuf::from(value)),
            "taxonomy.wordnet.data" => self.wordnet_data = Some(PathBuf::from(value)),
            "ic.corpus" => self.ic_corpus = Some(PathBuf::from(value)),
            "lsa.corpus" => self.lsa_corpus = Some(PathBuf::from(value)),
            "lsa.k" => {
                self.lsa_k = value.parse().map_err(|e| format!("bad lsa.k: {e}"))?;
            }
            "lsa.weighting" => {
                self.lsa_weighting = value.parse()?;
            }
            "sweep.start" => {
                self.sweep.start = value.parse().map_err(|e| format!("bad sweep.start: {e}"))?;
            }
            "sweep.end" => {
                self.sweep.end = value.parse().map_err(|e| format!("bad sweep.end: {e}"))?;
            }
            "sweep.step" => {
                self.sweep.step = value.parse().map_err(|e| format!("bad sweep.step: {e}"))?;
            }
            "seed" => {
                self.seed = value.parse().map_err(|e| format!("bad seed: {e}"))?;
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    pub fn has_taxonomy(&self) -> bool {
        self.taxonomy_simple.is_some()
            || (self.wordnet_index.is_some() && self.wordnet_data.is_some())
    }
}

//! Service configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::terms::{AssociationMeasure, CooccurrenceScope};

pub const HOST_ENV: &str = "BIBREC_HOST";
pub const PORT_ENV: &str = "BIBREC_PORT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub corpus_path: PathBuf,
    pub host: String,
    pub port: u16,
    /// Result-set size used for recommendations and re-ranking.
    pub scope_limit: usize,
    pub recommendation_k: usize,
    /// Default number of hits returned by a search.
    pub search_limit: usize,
    pub expansion_boost: f64,
    pub association_measure: AssociationMeasure,
    pub cooccurrence: CooccurrenceScope,
    pub stopword_path: Option<PathBuf>,
    /// Origin allowed to call the service from a browser.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            corpus_path: PathBuf::from("corpus.jsonl"),
            host: "127.0.0.1".into(),
            port: 8080,
            scope_limit: 500,
            recommendation_k: 5,
            search_limit: 20,
            expansion_boost: 1.0,
            association_measure: AssociationMeasure::Llr,
            cooccurrence: CooccurrenceScope::Corpus,
            stopword_path: None,
            cors_origin: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ServiceConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if config.corpus_path.is_relative() {
            config.corpus_path = base.join(&config.corpus_path);
        }
        if let Some(stopwords) = &config.stopword_path {
            if stopwords.is_relative() {
                config.stopword_path = Some(base.join(stopwords));
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.recommendation_k == 0 {
            return Err(ConfigError::Invalid("recommendation_k must be at least 1".into()));
        }
        if self.scope_limit == 0 {
            return Err(ConfigError::Invalid("scope_limit must be at least 1".into()));
        }
        if self.search_limit == 0 {
            return Err(ConfigError::Invalid("search_limit must be at least 1".into()));
        }
        if !(self.expansion_boost.is_finite() && self.expansion_boost > 0.0) {
            return Err(ConfigError::Invalid("expansion_boost must be positive".into()));
        }
        Ok(())
    }

    /// Applies `BIBREC_HOST` / `BIBREC_PORT` from `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(host) = lookup(HOST_ENV) {
            self.host = host;
        }
        if let Some(port) = lookup(PORT_ENV) {
            self.port = port
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{PORT_ENV}={port:?} is not a port")))?;
        }
        Ok(())
    }
}

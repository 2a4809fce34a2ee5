use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use llr_core::aida::{AidaCodec, DEFAULT_NAMESPACE};
use llr_core::ingest::Gazetteer;
use llr_core::living::{Policy, RepoConfig};
use llr_core::rdf::Iri;
use serde::Deserialize;

/// Service settings: a TOML file, then `LLR_*` environment variables, then
/// command-line flags, each overriding the previous.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub data: PathBuf,
    pub aida_namespace: String,
    /// DOI resolver used when a manifest names no fixture directory.
    pub resolver: String,
    pub policy: String,
    pub tokens: Vec<String>,
    pub listen: String,
    /// Placeholder base for minted nanopubs.
    pub base: String,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            data: PathBuf::from("data"),
            aida_namespace: DEFAULT_NAMESPACE.to_string(),
            resolver: "https://doi.org/".to_string(),
            policy: "token-list".to_string(),
            tokens: Vec::new(),
            listen: "127.0.0.1:8080".to_string(),
            base: "https://w3id.org/np/".to_string(),
        }
    }
}

impl Config {
    pub fn load(file: Option<&Path>) -> anyhow::Result<Self> {
        Self::load_with(file, |k| std::env::var(k).ok())
    }

    pub fn load_with(file: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> anyhow::Result<Self> {
        let mut cfg = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => Config::default(),
        };
        if let Some(v) = env("LLR_DATA") {
            cfg.data = v.into();
        }
        if let Some(v) = env("LLR_AIDA_NAMESPACE") {
            cfg.aida_namespace = v;
        }
        if let Some(v) = env("LLR_RESOLVER") {
            cfg.resolver = v;
        }
        if let Some(v) = env("LLR_POLICY") {
            cfg.policy = v;
        }
        if let Some(v) = env("LLR_TOKENS") {
            cfg.tokens = v.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect();
        }
        if let Some(v) = env("LLR_LISTEN") {
            cfg.listen = v;
        }
        if let Some(v) = env("LLR_BASE") {
            cfg.base = v;
        }
        Ok(cfg)
    }

    pub fn policy(&self) -> anyhow::Result<Policy> {
        Ok(match self.policy.as_str() {
            "open" => Policy::Open,
            "token-list" => Policy::TokenList {
                tokens: self.tokens.iter().cloned().collect::<BTreeSet<_>>(),
            },
            "original-authors" => Policy::OriginalAuthors,
            other => bail!("unknown policy {other:?} (expected open, token-list or original-authors)"),
        })
    }

    pub fn codec(&self) -> anyhow::Result<AidaCodec> {
        Ok(AidaCodec::new(&Iri::new(self.aida_namespace.as_str())?))
    }

    pub fn repo_config(&self) -> anyhow::Result<RepoConfig> {
        Ok(RepoConfig {
            base: Iri::new(self.base.as_str())?,
            codec: self.codec()?,
            gazetteer: Gazetteer::bundled(),
            policy: self.policy()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("llr.toml");
        std::fs::write(&path, "policy = \"open\"\nlisten = \"0.0.0.0:1\"\n").unwrap();
        let cfg = Config::load_with(Some(&path), |k| (k == "LLR_LISTEN").then(|| "127.0.0.1:2".to_string())).unwrap();
        assert_eq!(cfg.policy, "open");
        assert_eq!(cfg.listen, "127.0.0.1:2");
        assert_eq!(cfg.data, PathBuf::from("data"));
    }

    #[test]
    fn tokens_from_env() {
        let cfg = Config::load_with(None, |k| (k == "LLR_TOKENS").then(|| "a, b,".to_string())).unwrap();
        assert_eq!(cfg.policy().unwrap(), Policy::TokenList { tokens: ["a".into(), "b".into()].into() });
    }

    #[test]
    fn unknown_policy() {
        let cfg = Config {
            policy: "anyone".into(),
            ..Config::default()
        };
        assert!(cfg.policy().is_err());
    }
}

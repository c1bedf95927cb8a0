use std::path::{Path, PathBuf};

use afd_core::classify::{AnalysisTask, LabelSpace, LlmConfig, POLICY_LABEL_COUNT};
use afd_core::dataset::Ratios;
use afd_core::parser::VariantTable;
use anyhow::{bail, Context, Result};
use serde::Deserialize;

pub const DEFAULT_CONFIG_FILE: &str = "afd.toml";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub cache_dir: Option<PathBuf>,
    pub rate_limit: Option<f64>,
    pub concurrency: Option<usize>,
    pub retries: Option<u32>,
    pub user_agent: Option<String>,
    pub log_url_template: Option<String>,
    /// Variant table file (`variant<TAB>canonical` lines).
    pub variant_table: Option<PathBuf>,
    /// Policy label list, one per line.
    pub policy_labels: Option<PathBuf>,
    pub stance_labels: Option<Vec<String>>,
    pub split: SplitConfig,
    pub baseline: BaselineConfig,
    pub llm: LlmConfig,
    pub remote: RemoteConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        let r = Ratios::default();
        SplitConfig { train: r.train, validation: r.validation, test: r.test, seed: 0 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub l2: Option<f64>,
    pub min_df: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteConfig {
    pub endpoint: Option<String>,
    pub timeout_secs: u64,
    pub rate_limit: Option<f64>,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig { endpoint: None, timeout_secs: 60, rate_limit: None }
    }
}

fn env(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.trim().is_empty())
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match env(name) {
        Some(v) => v.trim().parse().map(Some).map_err(|e| anyhow::anyhow!("{name}={v:?}: {e}")),
        None => Ok(None),
    }
}

impl Config {
    /// Reads `path`, or `afd.toml` in the working directory when present,
    /// then applies `AFD_*` environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("invalid config {}", p.display()))?
            }
            None if Path::new(DEFAULT_CONFIG_FILE).is_file() => {
                let text = std::fs::read_to_string(DEFAULT_CONFIG_FILE)?;
                toml::from_str(&text).with_context(|| format!("invalid config {DEFAULT_CONFIG_FILE}"))?
            }
            None => Config::default(),
        };
        config.apply_env()?;
        config.validate()?;
        Ok(config)
    }

    fn apply_env(&mut self) -> Result<()> {
        if let Some(v) = env("AFD_CACHE_DIR") {
            self.cache_dir = Some(v.into());
        }
        if let Some(v) = env_parse("AFD_RATE_LIMIT")? {
            self.rate_limit = Some(v);
        }
        if let Some(v) = env_parse("AFD_CONCURRENCY")? {
            self.concurrency = Some(v);
        }
        if let Some(v) = env("AFD_USER_AGENT") {
            self.user_agent = Some(v);
        }
        if let Some(v) = env("AFD_LOG_URL_TEMPLATE") {
            self.log_url_template = Some(v);
        }
        if let Some(v) = env("AFD_VARIANT_TABLE") {
            self.variant_table = Some(v.into());
        }
        if let Some(v) = env("AFD_POLICY_LABELS") {
            self.policy_labels = Some(v.into());
        }
        if let Some(v) = env_parse("AFD_SEED")? {
            self.split.seed = v;
        }
        if let Some(v) = env("AFD_LLM_ENDPOINT") {
            self.llm.endpoint = v;
        }
        if let Some(v) = env("AFD_LLM_MODEL") {
            self.llm.model = v;
        }
        if let Some(v) = env("AFD_LLM_KEY_ENV") {
            self.llm.api_key_env = v;
        }
        if let Some(v) = env("AFD_REMOTE_ENDPOINT") {
            self.remote.endpoint = Some(v);
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (what, path) in [("variant_table", &self.variant_table), ("policy_labels", &self.policy_labels)] {
            if let Some(p) = path {
                if !p.is_file() {
                    bail!("{what} {} does not exist", p.display());
                }
            }
        }
        self.ratios()?;
        if let Some(r) = self.rate_limit {
            if !(r.is_finite() && r > 0.0) {
                bail!("rate_limit must be > 0, got {r}");
            }
        }
        Ok(())
    }

    pub fn ratios(&self) -> Result<Ratios> {
        Ratios::new(self.split.train, self.split.validation, self.split.test).map_err(|e| anyhow::anyhow!("split ratios: {e}"))
    }

    pub fn variants(&self) -> Result<VariantTable> {
        match &self.variant_table {
            Some(p) => VariantTable::load(p).map_err(|e| anyhow::anyhow!("{e}")),
            None => Ok(VariantTable::default()),
        }
    }

    /// Configured policy labels, if any.
    pub fn policy_space(&self) -> Result<Option<LabelSpace>> {
        let Some(p) = &self.policy_labels else { return Ok(None) };
        let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
        let labels: Vec<String> =
            text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect();
        if labels.len() > POLICY_LABEL_COUNT {
            log::warn!("{} lists {} policies; using all of them", p.display(), labels.len());
        }
        Ok(Some(LabelSpace::new(AnalysisTask::Policy, labels)?))
    }

    pub fn stance_space(&self) -> Result<LabelSpace> {
        match &self.stance_labels {
            Some(labels) => Ok(LabelSpace::new(AnalysisTask::Stance, labels.clone())?),
            None => Ok(LabelSpace::default_for(AnalysisTask::Stance)),
        }
    }
}

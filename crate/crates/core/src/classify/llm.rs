//! Outcome prediction and explanations through an OpenAI-compatible chat
//! completions endpoint.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use ureq::Agent;

use super::prompt::{parse_llm_response, render_explanation_prompt, render_llm_prompt, Shot};
use super::{require_text, AnalysisTask, Classifier, ClassifyError, Explainer, LabelSpace, Prediction};
use crate::collector::RateLimiter;

pub const DEFAULT_LLM_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_LLM_MODEL: &str = "gpt-4o";
pub const DEFAULT_LLM_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    pub rate_limit: Option<f64>,
    pub shots: Vec<Shot>,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: DEFAULT_LLM_ENDPOINT.into(),
            model: DEFAULT_LLM_MODEL.into(),
            api_key_env: DEFAULT_LLM_KEY_ENV.into(),
            temperature: 0.0,
            max_tokens: 512,
            timeout_secs: 60,
            rate_limit: None,
            shots: Vec::new(),
        }
    }
}

pub struct LlmBackend {
    config: LlmConfig,
    api_key: String,
    agent: Agent,
    space: LabelSpace,
    limiter: Option<RateLimiter>,
}

impl LlmBackend {
    /// Reads the key from `config.api_key_env`.
    pub fn from_env(config: LlmConfig) -> Result<Self, ClassifyError> {
        match std::env::var(&config.api_key_env) {
            Ok(key) if !key.trim().is_empty() => Ok(Self::with_key(config, key)),
            _ => Err(ClassifyError::NotConfigured(format!("environment variable {} is not set", config.api_key_env))),
        }
    }

    pub fn with_key(config: LlmConfig, api_key: impl Into<String>) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let limiter = config.rate_limit.map(RateLimiter::new);
        LlmBackend { config, api_key: api_key.into(), agent, space: LabelSpace::default_for(AnalysisTask::Outcome), limiter }
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    /// Sends one user message and returns the reply text.
    pub fn complete(&self, prompt: &str) -> Result<String, ClassifyError> {
        if let Some(l) = &self.limiter {
            l.acquire();
        }
        let body = json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
            "messages": [{"role": "user", "content": prompt}],
        });
        let unavailable = |e: String| ClassifyError::BackendUnavailable(format!("{}: {e}", self.config.endpoint));
        let mut response = self
            .agent
            .post(&self.config.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| unavailable(e.to_string()))?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(unavailable(format!("HTTP {status}")));
        }
        let reply: serde_json::Value = response.body_mut().read_json().map_err(|e| unavailable(e.to_string()))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ClassifyError::UnparseableResponse("reply has no message content".into()))
    }
}

impl Classifier for LlmBackend {
    fn label_space(&self) -> &LabelSpace {
        &self.space
    }

    /// The model reports no confidence, so probability is 1.
    fn predict(&self, title: Option<&str>, text: &str) -> Result<Prediction, ClassifyError> {
        require_text(text)?;
        let reply = self.complete(&render_llm_prompt(title.unwrap_or(""), text, &self.config.shots))?;
        let (label, explanation) = parse_llm_response(&reply)?;
        Ok(Prediction { label: label.as_str().into(), probability: 1.0, explanation: Some(explanation), per_label_scores: None })
    }
}

impl Explainer for LlmBackend {
    fn explain(&self, title: Option<&str>, text: &str, label: &str) -> Result<String, ClassifyError> {
        require_text(text)?;
        let reply = self.complete(&render_explanation_prompt(title, text, label))?;
        Ok(match parse_llm_response(&reply) {
            Ok((_, explanation)) if !explanation.is_empty() => explanation,
            _ => reply.trim().to_string(),
        })
    }
}

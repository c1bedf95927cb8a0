//! Client for a remote inference endpoint.
//!
//! Wire protocol: `POST <endpoint>` with
//! `{"task": "...", "labels": [...], "text": "...", "title": null|"..."}`;
//! the reply is `{"predictions": [{"label": "...", "score": 0.9}, ...]}`,
//! ranked or not. Labels outside the requested space are a contract error.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;
use url::Url;

use super::{require_text, AnalysisTask, Classifier, ClassifyError, LabelScore, LabelSpace, Prediction};
use crate::collector::RateLimiter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteRequest {
    pub task: AnalysisTask,
    pub labels: Vec<String>,
    pub text: String,
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteLabelScore {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteResponse {
    pub predictions: Vec<RemoteLabelScore>,
}

pub struct RemoteBackend {
    endpoint: Url,
    space: LabelSpace,
    agent: Agent,
    limiter: Option<RateLimiter>,
}

impl RemoteBackend {
    pub fn new(endpoint: Url, space: LabelSpace, timeout: Duration) -> Self {
        let agent: Agent = Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        RemoteBackend { endpoint, space, agent, limiter: None }
    }

    /// Caps requests per second across all callers.
    pub fn with_rate_limit(mut self, per_second: f64) -> Self {
        self.limiter = Some(RateLimiter::new(per_second));
        self
    }

    pub fn endpoint(&self) -> &Url {
        &self.endpoint
    }

    /// Turns a reply into a prediction, enforcing the label space.
    pub fn interpret(&self, reply: RemoteResponse) -> Result<Prediction, ClassifyError> {
        if reply.predictions.is_empty() {
            return Err(ClassifyError::BackendUnavailable("endpoint returned no predictions".into()));
        }
        for p in &reply.predictions {
            if self.space.index_of(&p.label).is_none() {
                return Err(ClassifyError::LabelSpaceMismatch { task: self.space.task, label: p.label.clone() });
            }
            if !p.score.is_finite() || !(0.0..=1.0).contains(&p.score) {
                return Err(ClassifyError::InvalidPrediction(format!("score {} for {}", p.score, p.label)));
            }
        }
        let top = reply.predictions.iter().fold(&reply.predictions[0], |best, p| if p.score > best.score { p } else { best });
        let mut full: Vec<Option<f64>> = vec![None; self.space.len()];
        for p in &reply.predictions {
            full[self.space.index_of(&p.label).unwrap()] = Some(p.score);
        }
        let complete = full.iter().all(Option::is_some) && (full.iter().flatten().sum::<f64>() - 1.0).abs() <= 1e-6;
        let per_label_scores = complete.then(|| {
            self.space
                .labels
                .iter()
                .zip(&full)
                .map(|(l, s)| LabelScore { label: l.clone(), score: s.unwrap() })
                .collect()
        });
        Ok(Prediction { label: top.label.clone(), probability: top.score, explanation: None, per_label_scores })
    }
}

impl Classifier for RemoteBackend {
    fn label_space(&self) -> &LabelSpace {
        &self.space
    }

    fn predict(&self, title: Option<&str>, text: &str) -> Result<Prediction, ClassifyError> {
        require_text(text)?;
        if let Some(l) = &self.limiter {
            l.acquire();
        }
        let body = RemoteRequest {
            task: self.space.task,
            labels: self.space.labels.clone(),
            text: text.to_string(),
            title: title.map(str::to_string),
        };
        let unavailable = |e: String| ClassifyError::BackendUnavailable(format!("{}: {e}", self.endpoint));
        let mut response = self.agent.post(self.endpoint.as_str()).send_json(&body).map_err(|e| unavailable(e.to_string()))?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(unavailable(format!("HTTP {status}")));
        }
        let reply: RemoteResponse = response.body_mut().read_json().map_err(|e| unavailable(e.to_string()))?;
        self.interpret(reply)
    }
}

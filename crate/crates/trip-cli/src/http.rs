//! Chat-completion HTTP client for live travel-information retrieval.
//!
//! Talks to any OpenAI-style `/chat/completions` endpoint. Each reply is
//! appended to the conversation so later prompts see the earlier answers.
//! Configuration comes from `TRIP_LLM_ENDPOINT`, `TRIP_LLM_KEY` and
//! `TRIP_LLM_MODEL`.

use std::time::Duration;

use anyhow::{Context, Result};
use serde::Deserialize;
use serde_json::json;

use trip_core::providers::{ProviderError, TravelChat};

pub const ENV_ENDPOINT: &str = "TRIP_LLM_ENDPOINT";
pub const ENV_KEY: &str = "TRIP_LLM_KEY";
pub const ENV_MODEL: &str = "TRIP_LLM_MODEL";

pub struct HttpChat {
    endpoint: String,
    key: Option<String>,
    model: String,
    client: reqwest::blocking::Client,
    messages: Vec<serde_json::Value>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: String,
}

impl HttpChat {
    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var(ENV_ENDPOINT)
            .with_context(|| format!("{ENV_ENDPOINT} is not set"))?;
        let key = std::env::var(ENV_KEY).ok();
        let model = std::env::var(ENV_MODEL).unwrap_or_else(|_| "gpt-4".to_string());
        Ok(HttpChat::new(endpoint, key, model))
    }

    pub fn new(endpoint: String, key: Option<String>, model: String) -> Self {
        HttpChat {
            endpoint,
            key,
            model,
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("client builds"),
            messages: Vec::new(),
        }
    }
}

impl TravelChat for HttpChat {
    fn ask(&mut self, prompt: &str) -> Result<String, ProviderError> {
        self.messages.push(json!({"role": "user", "content": prompt}));
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": self.messages,
        });
        let mut request = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|e| ProviderError::ProviderUnavailable(e.to_string()))?;
        if !response.status().is_success() {
            return Err(ProviderError::ProviderUnavailable(format!(
                "endpoint returned {}",
                response.status()
            )));
        }
        let text = response
            .text()
            .map_err(|e| ProviderError::ProviderUnavailable(e.to_string()))?;
        if text.trim().is_empty() {
            return Err(ProviderError::ProviderUnavailable("empty body".to_string()));
        }
        let parsed: ChatResponse = serde_json::from_str(&text)
            .map_err(|e| ProviderError::ProviderUnavailable(format!("bad response: {e}")))?;
        let content = parsed
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .ok_or_else(|| ProviderError::ProviderUnavailable("no choices".to_string()))?;
        self.messages
            .push(json!({"role": "assistant", "content": content}));
        Ok(content)
    }
}

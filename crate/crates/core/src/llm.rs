//! Completion-model gateway.
//!
//! [`HttpCompletionClient`] speaks the classic `/completions` protocol;
//! [`MockCompletionModel`] answers from an ordered rule table without touching
//! the network.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use tracing::{debug, warn};

use crate::error::{ConfigError, LlmError};
use crate::prompt::{estimate_tokens, AssembledPrompt};

/// Price per 1000 tokens of the reference completion model, in USD.
pub const REFERENCE_RATE_PER_1K: f64 = 0.02;

pub const DEFAULT_MODEL: &str = "text-davinci-003";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

pub fn estimate_cost(usage_tokens: u64, rate_per_1k: f64) -> f64 {
    usage_tokens as f64 / 1000.0 * rate_per_1k
}

/// A string that never shows up in `Debug` or `Display` output.
#[derive(Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(transparent)]
pub struct Secret(String);

impl Secret {
    pub fn new(value: impl Into<String>) -> Self {
        Self(value.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Secret(***)")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub base_url: String,
    pub api_key: Secret,
    pub model: String,
    pub max_tokens: u32,
    pub temperature: f64,
    #[serde(with = "millis")]
    pub timeout: Duration,
    pub max_retries: u32,
    /// First backoff delay; doubled after every failed attempt.
    #[serde(with = "millis")]
    pub backoff_base: Duration,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            base_url: DEFAULT_BASE_URL.into(),
            api_key: Secret::default(),
            model: DEFAULT_MODEL.into(),
            max_tokens: 150,
            temperature: 0.7,
            timeout: Duration::from_secs(15),
            max_retries: 2,
            backoff_base: Duration::from_millis(500),
        }
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Duration, D::Error> {
        u64::deserialize(de).map(Duration::from_millis)
    }
}

impl LlmConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        if self.max_tokens < 1 {
            return Err(LlmError::InvalidConfig("max_tokens must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(LlmError::InvalidConfig("timeout must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::InvalidConfig("temperature must be within [0, 2]".into()));
        }
        if reqwest::Url::parse(&self.base_url).is_err() {
            return Err(LlmError::InvalidConfig(format!("bad base_url {:?}", self.base_url)));
        }
        Ok(())
    }

    /// Overrides fields from `LLM_API_KEY`, `LLM_BASE_URL` and `LLM_MODEL`.
    pub fn apply_env(&mut self) {
        self.apply_vars(|k| std::env::var(k).ok());
    }

    pub fn apply_vars(&mut self, var: impl Fn(&str) -> Option<String>) {
        if let Some(key) = var("LLM_API_KEY") {
            self.api_key = Secret::new(key);
        }
        if let Some(url) = var("LLM_BASE_URL") {
            self.base_url = url;
        }
        if let Some(model) = var("LLM_MODEL") {
            self.model = model;
        }
    }

    fn backoff(&self, retry: u32) -> Duration {
        self.backoff_base.saturating_mul(2u32.saturating_pow(retry))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub usage_tokens: u64,
    pub latency: Duration,
}

#[async_trait]
pub trait CompletionModel: Send + Sync {
    async fn complete(&self, prompt: &AssembledPrompt) -> Result<Completion, LlmError>;
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    text: String,
}

#[derive(Deserialize)]
struct Usage {
    total_tokens: u64,
}

enum Attempt {
    Done(Completion),
    Retry(LlmError),
    Fail(LlmError),
}

pub struct HttpCompletionClient {
    config: LlmConfig,
    http: reqwest::Client,
    endpoint: String,
}

impl HttpCompletionClient {
    pub fn new(config: LlmConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::InvalidConfig(e.to_string()))?;
        let endpoint = format!("{}/completions", config.base_url.trim_end_matches('/'));
        Ok(Self {
            config,
            http,
            endpoint,
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    async fn attempt(&self, prompt: &str, attempts: u32) -> Attempt {
        let started = Instant::now();
        let body = CompletionRequest {
            model: &self.config.model,
            prompt,
            max_tokens: self.config.max_tokens,
            temperature: self.config.temperature,
        };
        let mut request = self.http.post(&self.endpoint).json(&body);
        if !self.config.api_key.is_empty() {
            request = request.bearer_auth(self.config.api_key.expose());
        }
        let response = match request.send().await {
            Ok(r) => r,
            Err(e) if e.is_timeout() => return Attempt::Retry(LlmError::Timeout { attempts }),
            Err(e) => {
                return Attempt::Fail(LlmError::EndpointUnreachable(
                    e.without_url().to_string(),
                ))
            }
        };
        let status = response.status().as_u16();
        match status {
            401 | 403 => return Attempt::Fail(LlmError::AuthFailure(status)),
            429 => return Attempt::Retry(LlmError::RateLimited { attempts }),
            500..=599 => return Attempt::Retry(LlmError::ServerError { status, attempts }),
            200..=299 => {}
            _ => {
                return Attempt::Fail(LlmError::MalformedResponse(format!(
                    "unexpected status {status}"
                )))
            }
        }
        let parsed: CompletionResponse = match response.json().await {
            Ok(p) => p,
            Err(e) if e.is_timeout() => return Attempt::Retry(LlmError::Timeout { attempts }),
            Err(e) => return Attempt::Fail(LlmError::MalformedResponse(e.without_url().to_string())),
        };
        let Some(choice) = parsed.choices.into_iter().next() else {
            return Attempt::Fail(LlmError::MalformedResponse("no choices".into()));
        };
        Attempt::Done(Completion {
            text: choice.text.trim().to_owned(),
            usage_tokens: parsed.usage.map_or(0, |u| u.total_tokens),
            latency: started.elapsed(),
        })
    }
}

impl fmt::Debug for HttpCompletionClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpCompletionClient")
            .field("endpoint", &self.endpoint)
            .field("model", &self.config.model)
            .finish_non_exhaustive()
    }
}

#[async_trait]
impl CompletionModel for HttpCompletionClient {
    async fn complete(&self, prompt: &AssembledPrompt) -> Result<Completion, LlmError> {
        if prompt.text.trim().is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            debug!(endpoint = %self.endpoint, model = %self.config.model, attempts, "completion request");
            match self.attempt(&prompt.text, attempts).await {
                Attempt::Done(c) => return Ok(c),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) if attempts > self.config.max_retries => return Err(e),
                Attempt::Retry(e) => {
                    let delay = self.config.backoff(attempts - 1);
                    warn!(error = %e, ?delay, "transient completion failure, retrying");
                    tokio::time::sleep(delay).await;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub contains: String,
    pub reply: String,
}

/// Deterministic stand-in for a completion endpoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MockCompletionModel {
    rules: Vec<MockRule>,
}

impl MockCompletionModel {
    pub fn new(rules: Vec<MockRule>) -> Self {
        Self { rules }
    }

    /// Loads a JSON list of `{contains, reply}` objects.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&raw).map_err(|source| ConfigError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn rules(&self) -> &[MockRule] {
        &self.rules
    }

    pub fn reply_for(&self, prompt: &str) -> String {
        if let Some(rule) = self.rules.iter().find(|r| prompt.contains(&r.contains)) {
            return rule.reply.clone();
        }
        let said = prompt
            .lines()
            .rev()
            .find_map(|l| l.strip_prefix("User:"))
            .map(str::trim)
            .unwrap_or_default();
        if said.is_empty() {
            "You said: :)".to_owned()
        } else {
            format!("You said: {said} :)")
        }
    }
}

#[async_trait]
impl CompletionModel for MockCompletionModel {
    async fn complete(&self, prompt: &AssembledPrompt) -> Result<Completion, LlmError> {
        if prompt.text.trim().is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        let text = self.reply_for(&prompt.text);
        Ok(Completion {
            usage_tokens: (prompt.token_estimate + estimate_tokens(&text)) as u64,
            text,
            latency: Duration::ZERO,
        })
    }
}

/// A model that always fails, for exercising fallback paths.
#[derive(Debug, Clone)]
pub struct UnavailableModel(pub LlmError);

#[async_trait]
impl CompletionModel for UnavailableModel {
    async fn complete(&self, _prompt: &AssembledPrompt) -> Result<Completion, LlmError> {
        Err(self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_examples() {
        assert_eq!(estimate_cost(1000, REFERENCE_RATE_PER_1K), 0.02);
        assert_eq!(estimate_cost(0, REFERENCE_RATE_PER_1K), 0.0);
        assert!((estimate_cost(2500, REFERENCE_RATE_PER_1K) - 0.05).abs() < 1e-12);
    }

    #[tokio::test]
    async fn mock_rule_lookup() {
        let mock = MockCompletionModel::new(vec![
            MockRule {
                contains: "facility".into(),
                reply: "The National Robotarium is a research facility. :)".into(),
            },
            MockRule {
                contains: "research".into(),
                reply: "never chosen".into(),
            },
        ]);
        let out = mock
            .complete(&AssembledPrompt::raw("Facts:\nfacility research\n\nRobot:"))
            .await
            .unwrap();
        assert_eq!(out.text, "The National Robotarium is a research facility. :)");
        assert_eq!(out.latency, Duration::ZERO);
    }

    #[tokio::test]
    async fn mock_fallback_echoes_last_user_line() {
        let mock = MockCompletionModel::default();
        let prompt = AssembledPrompt::raw("User: hi\nRobot: hello\nUser: how are you?\n\nRobot:");
        assert_eq!(mock.complete(&prompt).await.unwrap().text, "You said: how are you? :)");
        assert_eq!(
            mock.complete(&AssembledPrompt::raw("nothing")).await.unwrap().text,
            "You said: :)"
        );
    }

    #[tokio::test]
    async fn empty_prompt_is_rejected() {
        let mock = MockCompletionModel::default();
        assert_eq!(
            mock.complete(&AssembledPrompt::raw("  ")).await,
            Err(LlmError::EmptyPrompt)
        );
        let http = HttpCompletionClient::new(LlmConfig::default()).unwrap();
        assert_eq!(http.complete(&AssembledPrompt::raw("")).await, Err(LlmError::EmptyPrompt));
    }

    #[test]
    fn config_validation_and_env() {
        assert!(LlmConfig::default().validate().is_ok());
        let bad = LlmConfig {
            max_tokens: 0,
            ..LlmConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LlmConfig {
            timeout: Duration::ZERO,
            ..LlmConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LlmConfig {
            temperature: 2.5,
            ..LlmConfig::default()
        };
        assert!(bad.validate().is_err());

        let mut cfg = LlmConfig::default();
        cfg.apply_vars(|k| match k {
            "LLM_API_KEY" => Some("sk-test".into()),
            "LLM_MODEL" => Some("gpt-3.5-turbo-instruct".into()),
            _ => None,
        });
        assert_eq!(cfg.api_key.expose(), "sk-test");
        assert_eq!(cfg.model, "gpt-3.5-turbo-instruct");
        assert_eq!(cfg.base_url, DEFAULT_BASE_URL);
        assert!(!format!("{cfg:?}").contains("sk-test"));
    }

    #[test]
    fn backoff_doubles() {
        let cfg = LlmConfig::default();
        assert_eq!(cfg.backoff(0), Duration::from_millis(500));
        assert_eq!(cfg.backoff(1), Duration::from_millis(1000));
        assert_eq!(cfg.backoff(2), Duration::from_millis(2000));
    }

    #[test]
    fn request_body_field_names() {
        let body = CompletionRequest {
            model: "m",
            prompt: "p",
            max_tokens: 3,
            temperature: 0.5,
        };
        assert_eq!(
            serde_json::to_value(&body).unwrap(),
            serde_json::json!({"model": "m", "prompt": "p", "max_tokens": 3, "temperature": 0.5})
        );
    }
}

//! Minimal JSON-over-HTTP plumbing shared by the MT and completion clients.

use std::time::Duration;

use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HttpError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("HTTP {code}: {body}")]
    Status { code: u16, body: String },
    #[error("unexpected response: {0}")]
    Decode(String),
    #[error("environment variable {0} is not set")]
    MissingToken(String),
}

impl HttpError {
    /// Transport failures, rate limiting and server errors are worth retrying.
    pub fn is_retryable(&self) -> bool {
        match self {
            HttpError::Transport(_) => true,
            HttpError::Status { code, .. } => *code == 429 || *code >= 500,
            HttpError::Decode(_) | HttpError::MissingToken(_) => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JsonEndpoint {
    pub url: String,
    /// Name of the environment variable holding a bearer token.
    pub token_env: Option<String>,
    client: reqwest::blocking::Client,
}

impl JsonEndpoint {
    pub fn new(url: impl Into<String>, token_env: Option<String>, timeout: Duration) -> Result<Self, HttpError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| HttpError::Transport(e.to_string()))?;
        Ok(Self { url: url.into(), token_env, client })
    }

    pub fn post(&self, body: &Value) -> Result<Value, HttpError> {
        let mut req = self.client.post(&self.url).json(body);
        if let Some(var) = &self.token_env {
            let token = std::env::var(var).map_err(|_| HttpError::MissingToken(var.clone()))?;
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| HttpError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| HttpError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(HttpError::Status { code: status.as_u16(), body: text });
        }
        serde_json::from_str(&text).map_err(|e| HttpError::Decode(format!("{e}: {text}")))
    }
}

/// First string found at any of the given JSON pointers.
pub fn first_string<'a>(value: &'a Value, pointers: &[&str]) -> Option<&'a str> {
    pointers.iter().find_map(|p| value.pointer(p).and_then(Value::as_str))
}

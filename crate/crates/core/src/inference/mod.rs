//! Completion endpoint access with an on-disk cache, retries and bounded
//! concurrency.

mod cache;
mod generator;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::concurrency::bounded_map;
use crate::http::HttpError;
use crate::retry::RetryPolicy;

pub use cache::ResponseCache;
pub use generator::{EchoGold, HttpGenerator, MockGenerator, Probe, TextGenerator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeParams {
    pub max_new_tokens: usize,
    /// Always 0: decoding is greedy.
    pub temperature: f64,
    pub stop: Vec<String>,
}

impl Default for DecodeParams {
    fn default() -> Self {
        Self { max_new_tokens: 32, temperature: 0.0, stop: vec!["\n".to_string()] }
    }
}

impl DecodeParams {
    pub fn validate(&self) -> Result<(), InferenceError> {
        if self.max_new_tokens == 0 {
            return Err(InferenceError::Params("max_new_tokens must be positive".into()));
        }
        if self.temperature != 0.0 {
            return Err(InferenceError::Params(format!("temperature {} (only greedy decoding is supported)", self.temperature)));
        }
        if self.stop.is_empty() || self.stop.iter().any(String::is_empty) {
            return Err(InferenceError::Params("stop sequences must be non-empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub request_key: String,
    pub model: String,
    pub prompt: String,
    pub params: DecodeParams,
    pub raw_output: String,
    pub parsed_answer: String,
    pub latency_ms: u64,
    #[serde(default)]
    pub from_cache: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("request {key} failed after {attempts} attempt(s): {source}")]
    Request {
        key: String,
        attempts: u32,
        #[source]
        source: HttpError,
    },
    #[error("cache: {0}")]
    Cache(String),
    #[error("invalid decode parameters: {0}")]
    Params(String),
    #[error("skipped after an earlier failure")]
    Skipped,
    #[error("all {0} requests failed; first error: {1}")]
    AllFailed(usize, String),
}

/// Digest of (model, prompt, params) identifying a request.
pub fn request_key(model: &str, prompt: &str, params: &DecodeParams) -> String {
    let canonical = serde_json::json!({ "model": model, "prompt": prompt, "params": params });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

/// Output cut at the earliest stop sequence, then trimmed.
pub fn parse_answer(raw: &str, stop: &[String]) -> String {
    let cut = stop
        .iter()
        .filter_map(|s| raw.find(s.as_str()))
        .min()
        .unwrap_or(raw.len());
    raw[..cut].trim().to_string()
}

pub struct InferenceClient {
    model: String,
    generator: Arc<dyn TextGenerator>,
    cache: Option<ResponseCache>,
    retry: RetryPolicy,
    calls: AtomicUsize,
}

impl InferenceClient {
    pub fn new(model: impl Into<String>, generator: Arc<dyn TextGenerator>) -> Self {
        Self {
            model: model.into(),
            generator,
            cache: None,
            retry: RetryPolicy::default(),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    /// Endpoint calls made so far, retries included.
    pub fn network_calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn generate(&self, prompt: &str, params: &DecodeParams) -> Result<GenerationRecord, InferenceError> {
        params.validate()?;
        let key = request_key(&self.model, prompt, params);
        if let Some(cache) = &self.cache {
            if let Some(mut hit) = cache.get(&key)? {
                hit.from_cache = true;
                return Ok(hit);
            }
        }
        let start = Instant::now();
        let raw = self
            .retry
            .run_if(
                |_| {
                    self.calls.fetch_add(1, Ordering::SeqCst);
                    self.generator.complete(&self.model, prompt, params)
                },
                HttpError::is_retryable,
            )
            .map_err(|(source, attempts)| InferenceError::Request { key: key.clone(), attempts, source })?;
        let record = GenerationRecord {
            request_key: key,
            model: self.model.clone(),
            prompt: prompt.to_string(),
            params: params.clone(),
            parsed_answer: parse_answer(&raw, &params.stop),
            raw_output: raw,
            latency_ms: start.elapsed().as_millis() as u64,
            from_cache: false,
        };
        if let Some(cache) = &self.cache {
            cache.put(&record)?;
        }
        Ok(record)
    }

    /// Runs requests with at most `limit` in flight. Results keep request
    /// order. With `fail_fast`, requests not yet started after a failure are
    /// reported as skipped.
    pub fn run_batch(
        &self,
        requests: &[(String, DecodeParams)],
        limit: usize,
        fail_fast: bool,
    ) -> Result<Vec<Result<GenerationRecord, InferenceError>>, InferenceError> {
        let out: Vec<Result<GenerationRecord, InferenceError>> = bounded_map(
            requests,
            limit.max(1),
            |_, (prompt, params)| self.generate(prompt, params),
            |r| fail_fast && r.is_err(),
        )
        .into_iter()
        .map(|r| r.unwrap_or(Err(InferenceError::Skipped)))
        .collect();
        if !out.is_empty() && out.iter().all(Result::is_err) {
            let first = out.iter().find_map(|r| r.as_ref().err()).map(|e| e.to_string()).unwrap_or_default();
            return Err(InferenceError::AllFailed(out.len(), first));
        }
        Ok(out)
    }
}

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde_json::json;

use super::DecodeParams;
use crate::http::{first_string, HttpError, JsonEndpoint};

pub trait TextGenerator: Send + Sync {
    fn complete(&self, model: &str, prompt: &str, params: &DecodeParams) -> Result<String, HttpError>;
}

/// Completion endpoint taking `{model, prompt, max_tokens, temperature,
/// stop}` and answering `{choices: [{text}]}` or `{text}`.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    endpoint: JsonEndpoint,
}

impl HttpGenerator {
    pub fn new(url: impl Into<String>, token_env: Option<String>, timeout: Duration) -> Result<Self, HttpError> {
        Ok(Self { endpoint: JsonEndpoint::new(url, token_env, timeout)? })
    }
}

impl TextGenerator for HttpGenerator {
    fn complete(&self, model: &str, prompt: &str, params: &DecodeParams) -> Result<String, HttpError> {
        let resp = self.endpoint.post(&json!({
            "model": model,
            "prompt": prompt,
            "max_tokens": params.max_new_tokens,
            "temperature": params.temperature,
            "stop": params.stop,
        }))?;
        first_string(&resp, &["/choices/0/text", "/text", "/generated_text"])
            .map(str::to_string)
            .ok_or_else(|| HttpError::Decode(format!("no generated text in {resp}")))
    }
}

/// Answers every registered query with its gold answer, followed by a
/// newline and some trailing noise so stop handling is exercised.
#[derive(Debug, Clone, Default)]
pub struct EchoGold {
    answers: HashMap<String, String>,
    separator: String,
}

impl EchoGold {
    pub fn new(separator: impl Into<String>) -> Self {
        Self { answers: HashMap::new(), separator: separator.into() }
    }

    /// `query` is the rendered query exactly as it ends the prompt.
    pub fn insert(&mut self, query: impl Into<String>, answer: impl Into<String>) {
        self.answers.insert(query.into(), answer.into());
    }

    pub fn lookup(&self, prompt: &str) -> Option<&str> {
        let block = match prompt.rfind(&self.separator) {
            Some(i) if !self.separator.is_empty() => &prompt[i + self.separator.len()..],
            _ => prompt,
        };
        self.answers.get(block).map(String::as_str)
    }
}

impl TextGenerator for EchoGold {
    fn complete(&self, _: &str, prompt: &str, _: &DecodeParams) -> Result<String, HttpError> {
        Ok(match self.lookup(prompt) {
            Some(a) => format!(" {a}\n\n"),
            None => String::new(),
        })
    }
}

/// Counters observable from tests.
#[derive(Debug, Default)]
pub struct Probe {
    pub calls: AtomicUsize,
    pub in_flight: AtomicUsize,
    pub peak: AtomicUsize,
}

impl Probe {
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }
}

type Respond = dyn Fn(&str) -> Result<String, HttpError> + Send + Sync;

/// Generator backed by a closure, with an optional per-call delay and a
/// concurrency probe.
pub struct MockGenerator {
    respond: Box<Respond>,
    delay: Duration,
    pub probe: Arc<Probe>,
}

impl MockGenerator {
    pub fn new(respond: impl Fn(&str) -> Result<String, HttpError> + Send + Sync + 'static) -> Self {
        Self { respond: Box::new(respond), delay: Duration::ZERO, probe: Arc::new(Probe::default()) }
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }
}

impl TextGenerator for MockGenerator {
    fn complete(&self, _: &str, prompt: &str, _: &DecodeParams) -> Result<String, HttpError> {
        let p = &self.probe;
        p.calls.fetch_add(1, Ordering::SeqCst);
        let now = p.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        p.peak.fetch_max(now, Ordering::SeqCst);
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        let out = (self.respond)(prompt);
        p.in_flight.fetch_sub(1, Ordering::SeqCst);
        out
    }
}

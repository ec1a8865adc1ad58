use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::http::{first_string, HttpError, JsonEndpoint};
use crate::lang::Lang;

/// A machine translation system.
pub trait MtClient: Send + Sync {
    fn translate(&self, text: &str, source: &Lang, target: &Lang) -> Result<String, HttpError>;
}

impl<C: MtClient + ?Sized> MtClient for &C {
    fn translate(&self, text: &str, source: &Lang, target: &Lang) -> Result<String, HttpError> {
        (**self).translate(text, source, target)
    }
}

impl<C: MtClient + ?Sized> MtClient for Box<C> {
    fn translate(&self, text: &str, source: &Lang, target: &Lang) -> Result<String, HttpError> {
        (**self).translate(text, source, target)
    }
}

/// Returns its input unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl MtClient for IdentityTranslator {
    fn translate(&self, text: &str, _: &Lang, _: &Lang) -> Result<String, HttpError> {
        Ok(text.to_string())
    }
}

fn digest(parts: &[&str]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    h.finalize().into()
}

/// Replaces every token with a symbol that never occurs in natural text, so
/// a round trip shares no n-gram with the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct SymbolTranslator;

impl MtClient for SymbolTranslator {
    fn translate(&self, text: &str, _: &Lang, target: &Lang) -> Result<String, HttpError> {
        Ok(text
            .split_whitespace()
            .map(|t| format!("§{}", &hex::encode(digest(&[target.as_str(), t]))[..10]))
            .collect::<Vec<_>>()
            .join(" "))
    }
}

/// Drops the final clause (text after the last comma or semicolon, or else
/// the last token) when translating out of `from`; other directions are the
/// identity.
#[derive(Debug, Clone)]
pub struct ClauseDroppingTranslator {
    pub from: Lang,
}

impl ClauseDroppingTranslator {
    pub fn drop_final_clause(text: &str) -> String {
        match text.rfind([',', ';']) {
            Some(i) => text[..i].trim_end().to_string(),
            None => {
                let tokens: Vec<&str> = text.split_whitespace().collect();
                tokens[..tokens.len().saturating_sub(1)].join(" ")
            }
        }
    }
}

impl MtClient for ClauseDroppingTranslator {
    fn translate(&self, text: &str, source: &Lang, _: &Lang) -> Result<String, HttpError> {
        if *source == self.from {
            Ok(Self::drop_final_clause(text))
        } else {
            Ok(text.to_string())
        }
    }
}

/// Replaces each token with probability `rate` by a junk token. The choice
/// depends only on (seed, direction, text), so runs are reproducible.
#[derive(Debug, Clone, Copy)]
pub struct CorruptingTranslator {
    pub seed: u64,
    pub rate: f64,
}

impl MtClient for CorruptingTranslator {
    fn translate(&self, text: &str, source: &Lang, target: &Lang) -> Result<String, HttpError> {
        let d = digest(&[&self.seed.to_string(), source.as_str(), target.as_str(), text]);
        let mut rng = ChaCha8Rng::from_seed(d);
        Ok(text
            .split_whitespace()
            .enumerate()
            .map(|(i, t)| {
                if rng.gen_bool(self.rate.clamp(0.0, 1.0)) {
                    format!("¤{i}")
                } else {
                    t.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" "))
    }
}

/// Translation endpoint speaking `{text, source, target}` → `{text}` (or
/// `{translatedText}`).
#[derive(Debug, Clone)]
pub struct HttpTranslator {
    endpoint: JsonEndpoint,
}

impl HttpTranslator {
    pub fn new(url: impl Into<String>, token_env: Option<String>, timeout: Duration) -> Result<Self, HttpError> {
        Ok(Self { endpoint: JsonEndpoint::new(url, token_env, timeout)? })
    }
}

impl MtClient for HttpTranslator {
    fn translate(&self, text: &str, source: &Lang, target: &Lang) -> Result<String, HttpError> {
        let resp = self.endpoint.post(&json!({
            "text": text,
            "source": source,
            "target": target,
        }))?;
        first_string(&resp, &["/text", "/translatedText", "/data/translations/0/translatedText"])
            .map(str::to_string)
            .ok_or_else(|| HttpError::Decode(format!("no translated text in {resp}")))
    }
}

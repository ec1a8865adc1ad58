use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PromptError;
use crate::lang::Lang;

/// Every label key a template may reference.
pub const LABEL_KEYS: [&str; 16] = [
    "passage",
    "question",
    "answer",
    "sentence1",
    "sentence2",
    "premise",
    "options",
    "yes",
    "no",
    "true",
    "false",
    "neither",
    "cause-question",
    "effect-question",
    "paraphrase-question",
    "nli-question",
];

const BUILTIN: &str = include_str!("../../data/localization.toml");

/// A label that was not available in the requested language and was taken
/// from another one instead.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fallback {
    pub language: Lang,
    pub key: String,
    pub used: Lang,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalizationTable {
    entries: BTreeMap<Lang, BTreeMap<String, String>>,
}

impl LocalizationTable {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN).expect("shipped localization table parses")
    }

    pub fn from_toml_str(raw: &str) -> Result<Self, PromptError> {
        let parsed: BTreeMap<String, BTreeMap<String, String>> =
            toml::from_str(raw).map_err(|e| PromptError::Data(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (lang, labels) in parsed {
            for key in labels.keys() {
                if !LABEL_KEYS.contains(&key.as_str()) {
                    return Err(PromptError::Data(format!("[{lang}] unknown label key {key:?}")));
                }
            }
            entries.insert(Lang::new(&lang), labels);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, PromptError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| PromptError::Data(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&raw)
    }

    /// Entries of `other` take precedence.
    pub fn merge(&mut self, other: LocalizationTable) {
        for (lang, labels) in other.entries {
            self.entries.entry(lang).or_default().extend(labels);
        }
    }

    pub fn insert(&mut self, lang: &Lang, key: &str, text: &str) {
        self.entries
            .entry(lang.clone())
            .or_default()
            .insert(key.to_string(), text.to_string());
    }

    pub fn get(&self, lang: &Lang, key: &str) -> Option<&str> {
        self.entries.get(lang)?.get(key).map(String::as_str)
    }

    pub fn languages(&self) -> impl Iterator<Item = &Lang> {
        self.entries.keys()
    }

    /// Keys with no entry for `lang`.
    pub fn missing(&self, lang: &Lang) -> Vec<&'static str> {
        LABEL_KEYS
            .iter()
            .copied()
            .filter(|k| self.get(lang, k).is_none())
            .collect()
    }

    /// Looks `key` up in `lang`, falling back to `fallback` and recording it.
    pub fn resolve(
        &self,
        lang: &Lang,
        key: &str,
        fallback: &Lang,
        fallbacks: &mut Vec<Fallback>,
    ) -> Result<&str, PromptError> {
        if let Some(text) = self.get(lang, key) {
            return Ok(text);
        }
        if lang != fallback {
            if let Some(text) = self.get(fallback, key) {
                let fb = Fallback { language: lang.clone(), key: key.to_string(), used: fallback.clone() };
                if !fallbacks.contains(&fb) {
                    log::warn!("label {key:?} missing for {lang}, using {fallback}");
                    fallbacks.push(fb);
                }
                return Ok(text);
            }
        }
        Err(PromptError::MissingLabel { language: lang.clone(), key: key.to_string() })
    }
}

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::lang::Lang;
use crate::text::{is_punctuation, nfc, segment};

fn articles() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b(a|an|the)\b").expect("valid article regex"))
}

/// Characters removed as punctuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PunctuationClass {
    /// Unicode `P*` plus ASCII punctuation.
    #[default]
    Unicode,
    /// ASCII punctuation only, as in the SQuAD v1.1 script. Differs from
    /// `Unicode` on answers holding e.g. en dashes or CJK full stops.
    Ascii,
}

impl PunctuationClass {
    fn strips(self, c: char) -> bool {
        match self {
            PunctuationClass::Unicode => is_punctuation(c),
            PunctuationClass::Ascii => c.is_ascii_punctuation(),
        }
    }
}

/// NFC, lowercase, drop punctuation, drop English articles, then tokenize
/// on whitespace with Han/Kana/Thai split into single characters.
pub fn normalize_answer(text: &str, language: &Lang) -> Vec<String> {
    normalize_answer_with(text, language, PunctuationClass::Unicode)
}

pub fn normalize_answer_with(text: &str, language: &Lang, punctuation: PunctuationClass) -> Vec<String> {
    let lowered = nfc(text).to_lowercase();
    let stripped: String = lowered.chars().filter(|c| !punctuation.strips(*c)).collect();
    let stripped = if language.is_english() {
        articles().replace_all(&stripped, " ").into_owned()
    } else {
        stripped
    };
    segment(&stripped)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn en(s: &str) -> Vec<String> {
        normalize_answer(s, &Lang::new("en"))
    }

    #[test]
    fn squad_style_english() {
        assert_eq!(en("The Panthers."), vec!["panthers"]);
        assert_eq!(en("  an   Apple, a day "), vec!["apple", "day"]);
        assert_eq!(en("theatre"), vec!["theatre"]);
        assert_eq!(en("well-known"), vec!["wellknown"]);
    }

    #[test]
    fn empty() {
        assert!(en("").is_empty());
        assert!(en("...").is_empty());
    }

    #[test]
    fn chinese_characters() {
        assert_eq!(normalize_answer("北京大学", &Lang::new("zh")), vec!["北", "京", "大", "学"]);
        assert_eq!(normalize_answer("北京。", &Lang::new("zh")), vec!["北", "京"]);
    }

    #[test]
    fn ascii_class_keeps_en_dash() {
        let l = Lang::new("en");
        assert_eq!(normalize_answer("24–10", &l), vec!["2410"]);
        assert_eq!(normalize_answer_with("24–10", &l, PunctuationClass::Ascii), vec!["24–10"]);
    }

    #[test]
    fn articles_only_dropped_for_english() {
        assert_eq!(normalize_answer("the Rhine", &Lang::new("de")), vec!["the", "rhine"]);
    }

    #[test]
    fn idempotent_on_joined_output() {
        for s in ["The Broncos!", "Ünïcödé — test", "a b c", "¿Qué?"] {
            let once = en(s);
            assert_eq!(en(&once.join(" ")), once);
        }
    }
}

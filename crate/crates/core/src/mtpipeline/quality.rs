use serde::{Deserialize, Serialize};

use super::bleu::bleu_score;
use super::client::MtClient;
use super::{PipelineConfig, PipelineError};
use crate::corpus::{Example, Task};
use crate::http::HttpError;
use crate::lang::Lang;
use crate::scalar::Scalar;

/// Which text the back-translation is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RttReference {
    /// The source-language original.
    #[default]
    Original,
    /// The forward translation, as the step is literally worded in some
    /// write-ups. Compares texts in different languages.
    Trans1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RttRecord<T> {
    pub original: String,
    pub trans1: String,
    pub trans2: String,
    pub bleu: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord<T> {
    pub id: String,
    pub language: Lang,
    pub context: RttRecord<T>,
    /// Absent when the example has no question text (XCOPA).
    pub question: Option<RttRecord<T>>,
    pub accepted: bool,
}

impl<T: Scalar> QualityRecord<T> {
    /// Accepted iff every scored field reaches `threshold`.
    pub fn accepts(&self, threshold: f64) -> bool {
        let t = T::lit(threshold);
        self.context.bleu >= t && self.question.as_ref().is_none_or(|q| q.bleu >= t)
    }
}

pub(crate) fn translate_with_retry(
    client: &dyn MtClient,
    text: &str,
    source: &Lang,
    target: &Lang,
    cfg: &PipelineConfig,
) -> Result<String, (HttpError, u32)> {
    cfg.retry
        .run_if(|_| client.translate(text, source, target), HttpError::is_retryable)
}

/// Forward then backward translation, scored with BLEU.
pub fn round_trip<T: Scalar>(
    text: &str,
    source: &Lang,
    target: &Lang,
    client: &dyn MtClient,
    cfg: &PipelineConfig,
) -> Result<RttRecord<T>, (HttpError, u32)> {
    let trans1 = translate_with_retry(client, text, source, target, cfg)?;
    let trans2 = translate_with_retry(client, &trans1, target, source, cfg)?;
    let reference = match cfg.rtt_reference {
        RttReference::Original => text,
        RttReference::Trans1 => &trans1,
    };
    let bleu = bleu_score(&trans2, reference, &cfg.bleu_config());
    Ok(RttRecord { original: text.to_string(), trans1, trans2, bleu })
}

/// Round-trips context and question of a source example and returns the
/// forward translation. Answers and options are translated but not scored.
pub fn estimate_quality<T: Scalar>(
    example: &Example,
    source: &Lang,
    target: &Lang,
    client: &dyn MtClient,
    cfg: &PipelineConfig,
) -> Result<(Example, bool, QualityRecord<T>), PipelineError> {
    let mt_err = |(source, attempts): (HttpError, u32)| PipelineError::Mt {
        id: example.id.clone(),
        attempts,
        source,
    };
    let translate = |text: &str| translate_with_retry(client, text, source, target, cfg).map_err(mt_err);

    if example.context.trim().is_empty() {
        return Err(PipelineError::EmptyText { id: example.id.clone(), field: "context" });
    }
    let context = round_trip::<T>(&example.context, source, target, client, cfg).map_err(mt_err)?;
    let question = if example.question.trim().is_empty() {
        None
    } else {
        Some(round_trip::<T>(&example.question, source, target, client, cfg).map_err(mt_err)?)
    };

    let mut translated = example.clone();
    translated.language = target.clone();
    translated.context = context.trans1.clone();
    translated.question = question.as_ref().map(|q| q.trans1.clone()).unwrap_or_default();

    let mut choices = Vec::new();
    for c in [&example.extras.choice1, &example.extras.choice2] {
        choices.push(match c {
            Some(text) => Some(translate(text)?),
            None => None,
        });
    }
    if example.extras.verdict.is_none() {
        if example.task == Task::Xcopa {
            // keep the gold aligned with whichever option it named
            let originals = [&example.extras.choice1, &example.extras.choice2];
            translated.gold_answers = example
                .gold_answers
                .iter()
                .map(|g| {
                    match originals.iter().position(|o| o.as_deref() == Some(g.as_str())) {
                        Some(i) => Ok(choices[i].clone().unwrap_or_default()),
                        None => translate(g),
                    }
                })
                .collect::<Result<_, _>>()?;
        } else {
            translated.gold_answers =
                example.gold_answers.iter().map(|g| translate(g)).collect::<Result<_, _>>()?;
        }
    }
    let [c1, c2]: [Option<String>; 2] = choices.try_into().expect("two options");
    translated.extras.choice1 = c1;
    translated.extras.choice2 = c2;

    let mut record = QualityRecord {
        id: example.id.clone(),
        language: target.clone(),
        context,
        question,
        accepted: false,
    };
    record.accepted = record.accepts(cfg.bleu_threshold);
    Ok((translated, record.accepted, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Extras;
    use crate::mtpipeline::client::{IdentityTranslator, SymbolTranslator};

    fn ex() -> Example {
        Example {
            id: "q1".into(),
            language: Lang::new("en"),
            task: Task::Qa,
            context: "Denver won the game in the final minutes of play".into(),
            question: "Who won the game in the end ?".into(),
            gold_answers: vec!["Denver".into()],
            extras: Extras::default(),
        }
    }

    fn rec(c: f64, q: f64) -> QualityRecord<f64> {
        let r = |b| RttRecord { original: String::new(), trans1: String::new(), trans2: String::new(), bleu: b };
        QualityRecord { id: "x".into(), language: Lang::new("de"), context: r(c), question: Some(r(q)), accepted: false }
    }

    #[test]
    fn identity_accepts() {
        let (t, ok, q) = estimate_quality::<f64>(
            &ex(),
            &Lang::new("en"),
            &Lang::new("de"),
            &IdentityTranslator,
            &PipelineConfig::default(),
        )
        .unwrap();
        assert!(ok);
        assert_eq!(q.context.bleu, 100.0);
        assert_eq!(t.language.as_str(), "de");
        assert_eq!(t.gold_answers, vec!["Denver"]);
    }

    #[test]
    fn symbols_reject() {
        let rtt: RttRecord<f64> = round_trip(
            "the cat sat on the mat",
            &Lang::new("en"),
            &Lang::new("de"),
            &SymbolTranslator,
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(rtt.bleu, 0.0);
    }

    #[test]
    fn threshold_is_inclusive() {
        assert!(rec(50.0, 73.2).accepts(50.0));
        assert!(!rec(49.99, 100.0).accepts(50.0));
        assert!(!rec(100.0, 49.99).accepts(50.0));
    }

    #[test]
    fn trans1_reference_is_selectable() {
        let cfg = PipelineConfig { rtt_reference: RttReference::Trans1, ..Default::default() };
        let rtt: RttRecord<f64> =
            round_trip("a b c d", &Lang::new("en"), &Lang::new("de"), &SymbolTranslator, &cfg).unwrap();
        // trans2 re-encodes the symbols of trans1, so nothing matches either way
        assert_eq!(rtt.bleu, 0.0);
        let rtt: RttRecord<f64> =
            round_trip("a b c d", &Lang::new("en"), &Lang::new("de"), &IdentityTranslator, &cfg).unwrap();
        assert_eq!(rtt.bleu, 100.0);
    }
}

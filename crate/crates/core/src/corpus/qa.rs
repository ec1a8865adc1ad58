use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use super::{dedup_ids, read_file, CorpusError, Example, Extras, Task};
use crate::lang::Lang;

/// All three share the SQuAD v1.1 nesting `data → paragraphs → qas → answers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QaFormat {
    SquadV1,
    Mlqa,
    Xquad,
}

impl FromStr for QaFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "squad-v1" | "squad" | "squad1.1" => Ok(QaFormat::SquadV1),
            "mlqa" => Ok(QaFormat::Mlqa),
            "xquad" => Ok(QaFormat::Xquad),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn load_qa_dataset(
    path: &Path,
    format: QaFormat,
    language: &Lang,
) -> Result<Vec<Example>, CorpusError> {
    let raw = read_file(path)?;
    let examples = parse_qa_json(&raw, format, language)?;
    if examples.is_empty() {
        return Err(CorpusError::Empty(path.display().to_string()));
    }
    Ok(dedup_ids(examples, &path.display().to_string()))
}

/// Parses one SQuAD-layout document. One example per question; every
/// annotated answer text is kept as a gold answer.
pub fn parse_qa_json(
    raw: &str,
    _format: QaFormat,
    language: &Lang,
) -> Result<Vec<Example>, CorpusError> {
    let root: Value = serde_json::from_str(raw).map_err(|e| CorpusError::Parse {
        at: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let articles = array(&root, "data", "$")?;
    let mut out = Vec::new();
    for (ai, article) in articles.iter().enumerate() {
        let at_article = format!("data[{ai}]");
        for (pi, paragraph) in array(article, "paragraphs", &at_article)?.iter().enumerate() {
            let at_par = format!("{at_article}.paragraphs[{pi}]");
            let context = string(paragraph, "context", &at_par)?;
            for (qi, qa) in array(paragraph, "qas", &at_par)?.iter().enumerate() {
                let at = format!("{at_par}.qas[{qi}]");
                let id = match qa.get("id") {
                    Some(Value::String(s)) => s.clone(),
                    Some(Value::Number(n)) => n.to_string(),
                    _ => return Err(missing(&at, "id")),
                };
                let question = string(qa, "question", &at)?;
                let answers = array(qa, "answers", &at)?;
                if answers.is_empty() {
                    return Err(CorpusError::Parse {
                        at: format!("{at}.answers"),
                        message: "empty answers array".into(),
                    });
                }
                let gold_answers = answers
                    .iter()
                    .enumerate()
                    .map(|(i, a)| string(a, "text", &format!("{at}.answers[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(Example {
                    id,
                    language: language.clone(),
                    task: Task::Qa,
                    context: context.clone(),
                    question,
                    gold_answers,
                    extras: Extras::default(),
                });
            }
        }
    }
    Ok(out)
}

fn missing(at: &str, field: &str) -> CorpusError {
    CorpusError::Parse {
        at: at.to_string(),
        message: format!("missing or mistyped field `{field}`"),
    }
}

fn array<'a>(v: &'a Value, field: &str, at: &str) -> Result<&'a Vec<Value>, CorpusError> {
    v.get(field).and_then(Value::as_array).ok_or_else(|| missing(at, field))
}

fn string(v: &Value, field: &str, at: &str) -> Result<String, CorpusError> {
    v.get(field)
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| missing(at, field))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_PARAGRAPH: &str = r#"{"version":"1.1","data":[{"title":"Super_Bowl_50","paragraphs":[
        {"context":"Super Bowl 50 was an American football game. The Denver Broncos defeated the Carolina Panthers.",
         "qas":[
           {"id":"56be4db0acb8001400a502ec","question":"Which team won Super Bowl 50?",
            "answers":[{"answer_start":49,"text":"Denver Broncos"},{"answer_start":49,"text":"the Denver Broncos"}]},
           {"id":"56be4db0acb8001400a502ed","question":"Who lost?",
            "answers":[{"answer_start":80,"text":"Carolina Panthers"}]}]}]}]}"#;

    #[test]
    fn one_example_per_question_sharing_context() {
        let ex = parse_qa_json(ONE_PARAGRAPH, QaFormat::SquadV1, &Lang::new("en")).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].context, ex[1].context);
        assert_eq!(ex[0].gold_answers, vec!["Denver Broncos", "the Denver Broncos"]);
        assert_eq!(ex[0].id, "56be4db0acb8001400a502ec");
        assert_eq!(ex[1].task, Task::Qa);
    }

    #[test]
    fn missing_answers_names_record_path() {
        let raw = r#"{"data":[{"paragraphs":[{"context":"c","qas":[
            {"id":"a","question":"q","answers":[{"text":"c"}]},
            {"id":"b","question":"q2"}]}]}]}"#;
        let err = parse_qa_json(raw, QaFormat::Xquad, &Lang::new("de")).unwrap_err();
        match err {
            CorpusError::Parse { at, message } => {
                assert_eq!(at, "data[0].paragraphs[0].qas[1]");
                assert!(message.contains("answers"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.json");
        std::fs::write(&p, r#"{"data":[]}"#).unwrap();
        assert!(matches!(
            load_qa_dataset(&p, QaFormat::SquadV1, &Lang::new("en")),
            Err(CorpusError::Empty(_))
        ));
    }

    #[test]
    fn duplicate_ids_keep_first() {
        let raw = r#"{"data":[{"paragraphs":[{"context":"ctx","qas":[
            {"id":"x","question":"first","answers":[{"text":"c"}]},
            {"id":"x","question":"second","answers":[{"text":"c"}]}]}]}]}"#;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("dup.json");
        std::fs::write(&p, raw).unwrap();
        let ex = load_qa_dataset(&p, QaFormat::SquadV1, &Lang::new("en")).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].question, "first");
    }

    #[test]
    fn truncated_json_is_a_parse_error() {
        assert!(matches!(
            parse_qa_json("{\"data\": [", QaFormat::Mlqa, &Lang::new("en")),
            Err(CorpusError::Parse { .. })
        ));
    }
}

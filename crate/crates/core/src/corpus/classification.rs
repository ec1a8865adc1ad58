use std::collections::HashMap;
use std::path::Path;

use serde_json::Value;

use super::{dedup_ids, read_file, CopaKind, CorpusError, Example, Extras, Task, Verdict};
use crate::lang::Lang;

/// Loads PAWS-X / XNLI (tab-separated with a header row) or XCOPA (one JSON
/// record per line). Rows carrying a `language` column that differs from
/// `language` are skipped, so the multi-language XNLI file can be read one
/// language at a time.
pub fn load_classification_dataset(
    path: &Path,
    task: Task,
    language: &Lang,
) -> Result<Vec<Example>, CorpusError> {
    let raw = read_file(path)?;
    let origin = path.display().to_string();
    let examples = parse_classification(&raw, task, language)?;
    if examples.is_empty() {
        return Err(CorpusError::Empty(origin));
    }
    Ok(dedup_ids(examples, &origin))
}

pub fn parse_classification(
    raw: &str,
    task: Task,
    language: &Lang,
) -> Result<Vec<Example>, CorpusError> {
    match task {
        Task::PawsX | Task::Xnli => parse_tsv(raw, task, language),
        Task::Xcopa => parse_xcopa(raw, language),
        Task::Qa => Err(CorpusError::UnknownTask(
            "qa is not a classification task".into(),
        )),
    }
}

fn verdict_for(task: Task, label: &str) -> Option<Verdict> {
    match (task, label.trim().to_ascii_lowercase().as_str()) {
        (Task::PawsX, "1") => Some(Verdict::Yes),
        (Task::PawsX, "0") => Some(Verdict::No),
        (Task::Xnli, "entailment" | "0") => Some(Verdict::True),
        (Task::Xnli, "neutral" | "1") => Some(Verdict::Neither),
        (Task::Xnli, "contradiction" | "2") => Some(Verdict::False),
        _ => None,
    }
}

fn parse_tsv(raw: &str, task: Task, language: &Lang) -> Result<Vec<Example>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Parse { at: "header".into(), message: e.to_string() })?
        .clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let col = |names: &[&str]| names.iter().find_map(|n| index.get(n).copied());

    let (first, second) = match task {
        Task::PawsX => (col(&["sentence1"]), col(&["sentence2"])),
        _ => (col(&["sentence1", "premise"]), col(&["sentence2", "hypothesis"])),
    };
    let missing = |what: &str| CorpusError::Parse {
        at: "header".into(),
        message: format!("no {what} column in {:?}", headers.iter().collect::<Vec<_>>()),
    };
    let first = first.ok_or_else(|| missing("first-sentence"))?;
    let second = second.ok_or_else(|| missing("second-sentence"))?;
    let label = col(&["label", "gold_label"]).ok_or_else(|| missing("label"))?;
    let id_col = col(&["id", "pairID", "pair_id"]);
    let lang_col = col(&["language", "lang"]);

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| CorpusError::Parse {
            at: format!("row {line}"),
            message: e.to_string(),
        })?;
        let field = |c: usize| -> Result<&str, CorpusError> {
            record.get(c).ok_or_else(|| CorpusError::Parse {
                at: format!("row {line}"),
                message: format!("expected at least {} columns, found {}", c + 1, record.len()),
            })
        };
        if let Some(c) = lang_col {
            if Lang::new(field(c)?) != *language {
                continue;
            }
        }
        let raw_label = field(label)?;
        let verdict = verdict_for(task, raw_label).ok_or_else(|| CorpusError::InvalidLabel {
            row: line,
            value: raw_label.to_string(),
        })?;
        let id = match id_col {
            Some(c) => field(c)?.to_string(),
            None => (line - 1).to_string(),
        };
        out.push(Example {
            id,
            language: language.clone(),
            task,
            context: field(first)?.to_string(),
            question: field(second)?.to_string(),
            gold_answers: vec![verdict.english().to_string()],
            extras: Extras { verdict: Some(verdict), ..Extras::default() },
        });
    }
    Ok(out)
}

fn parse_xcopa(raw: &str, language: &Lang) -> Result<Vec<Example>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let at = format!("row {row}");
        let v: Value = serde_json::from_str(line)
            .map_err(|e| CorpusError::Parse { at: at.clone(), message: e.to_string() })?;
        let text = |key: &str| -> Result<String, CorpusError> {
            v.get(key).and_then(Value::as_str).map(str::to_owned).ok_or_else(|| {
                CorpusError::Parse { at: at.clone(), message: format!("missing `{key}`") }
            })
        };
        let premise = text("premise")?;
        let choice1 = text("choice1")?;
        let choice2 = text("choice2")?;
        let kind = match text("question")?.as_str() {
            "cause" => CopaKind::Cause,
            "effect" => CopaKind::Effect,
            other => {
                return Err(CorpusError::InvalidLabel { row, value: format!("question={other}") })
            }
        };
        let label = v.get("label").map(|l| match l {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        });
        let answer = match label.as_deref() {
            Some("0") => choice1.clone(),
            Some("1") => choice2.clone(),
            other => {
                return Err(CorpusError::InvalidLabel {
                    row,
                    value: other.unwrap_or("<missing>").to_string(),
                })
            }
        };
        let id = match v.get("idx").or_else(|| v.get("id")) {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => row.to_string(),
        };
        out.push(Example {
            id,
            language: language.clone(),
            task: Task::Xcopa,
            context: premise,
            question: String::new(),
            gold_answers: vec![answer],
            extras: Extras {
                choice1: Some(choice1),
                choice2: Some(choice2),
                kind: Some(kind),
                verdict: None,
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pawsx_label_one_is_yes() {
        let raw = "id\tsentence1\tsentence2\tlabel\n1\tA cat sat.\tA cat was sitting.\t1\n2\tX\tY\t0\n";
        let ex = parse_classification(raw, Task::PawsX, &Lang::new("en")).unwrap();
        assert_eq!(ex[0].gold_answers, vec!["Yes"]);
        assert_eq!(ex[0].extras.verdict, Some(Verdict::Yes));
        assert_eq!(ex[1].gold_answers, vec!["No"]);
        assert_eq!(ex[0].context, "A cat sat.");
        assert_eq!(ex[0].question, "A cat was sitting.");
    }

    #[test]
    fn xnli_labels_verbalize() {
        let raw = "language\tgold_label\tsentence1\tsentence2\tpairID\n\
                   en\tentailment\tP1\tH1\t10\n\
                   de\tneutral\tP2\tH2\t11\n\
                   en\tcontradiction\tP3\tH3\t12\n\
                   en\tneutral\tP4\tH4\t13\n";
        let ex = parse_classification(raw, Task::Xnli, &Lang::new("en")).unwrap();
        let golds: Vec<_> = ex.iter().map(|e| e.gold_answers[0].as_str()).collect();
        assert_eq!(golds, vec!["True", "False", "Neither"]);
        assert_eq!(ex[0].id, "10");
    }

    #[test]
    fn unknown_label_names_row() {
        let raw = "premise\thypothesis\tlabel\nP\tH\t0\nP\tH\tmaybe\n";
        match parse_classification(raw, Task::Xnli, &Lang::new("en")) {
            Err(CorpusError::InvalidLabel { row, value }) => {
                assert_eq!(row, 3);
                assert_eq!(value, "maybe");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn xcopa_cause_choice2() {
        let raw = r#"{"premise":"The man broke his toe.","choice1":"He dropped a hammer on his foot.","choice2":"He got a hole in his sock.","question":"cause","label":1,"idx":1}
{"premise":"I tipped the bottle.","choice1":"The liquid in the bottle froze.","choice2":"The liquid poured out.","question":"effect","label":1,"idx":2}"#;
        let ex = parse_classification(raw, Task::Xcopa, &Lang::new("en")).unwrap();
        assert_eq!(ex[0].gold_answers, vec!["He got a hole in his sock."]);
        assert_eq!(ex[0].extras.kind, Some(CopaKind::Cause));
        assert_eq!(ex[0].extras.choice1.as_deref(), Some("He dropped a hammer on his foot."));
        assert_eq!(ex[1].extras.kind, Some(CopaKind::Effect));
        assert_eq!(ex[1].id, "2");
    }

    #[test]
    fn xcopa_bad_label() {
        let raw = r#"{"premise":"p","choice1":"a","choice2":"b","question":"cause","label":3}"#;
        assert!(matches!(
            parse_classification(raw, Task::Xcopa, &Lang::new("en")),
            Err(CorpusError::InvalidLabel { row: 1, .. })
        ));
    }
}

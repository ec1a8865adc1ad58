use serde::{Deserialize, Serialize};

use super::localization::{Fallback, LocalizationTable};
use super::method::{AttributeAssignment, PromptMethod, Side};
use super::template::{Field, Group, Segment, TaskTemplate};
use super::PromptError;
use crate::corpus::{CopaKind, Example, Verdict};
use crate::lang::Lang;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    /// Source language; also the fallback for missing labels.
    pub source: Lang,
    /// Render labels of context lines in the source language regardless of
    /// the assignment, queries included.
    pub pin_context_labels: bool,
    /// Language of the query's labels.
    pub query_labels: Side,
    /// Placed between demonstrations and before the query.
    pub separator: String,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            source: Lang::new("en"),
            pin_context_labels: false,
            query_labels: Side::Tgt,
            separator: "\n\n".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub fallbacks: Vec<Fallback>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptText {
    pub text: String,
    /// Byte offset where the rendered query starts.
    pub query_offset: usize,
    pub fallbacks: Vec<Fallback>,
}

impl PromptText {
    pub fn query(&self) -> &str {
        &self.text[self.query_offset..]
    }
}

fn verdict_key(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::True => "true",
        Verdict::False => "false",
        Verdict::Neither => "neither",
    }
}

fn missing(ex: &Example, field: &str) -> PromptError {
    PromptError::MissingField { id: ex.id.clone(), field: field.to_string() }
}

/// Answer text as it appears after the answer label. Classification labels
/// are localized into the example's own language.
fn answer_text<'a>(
    ex: &'a Example,
    loc: &'a LocalizationTable,
    opts: &RenderOptions,
    fallbacks: &mut Vec<Fallback>,
) -> Result<&'a str, PromptError> {
    if let Some(v) = ex.extras.verdict {
        return loc.resolve(&ex.language, verdict_key(v), &opts.source, fallbacks);
    }
    let a = ex.primary_answer();
    if a.is_empty() {
        return Err(missing(ex, "answer"));
    }
    Ok(a)
}

/// Gold answers to score a query's generation against, matching what the
/// demonstrations teach the model to produce.
pub fn query_golds(
    query: &Example,
    loc: &LocalizationTable,
    opts: &RenderOptions,
) -> Result<Vec<String>, PromptError> {
    match query.extras.verdict {
        Some(v) => Ok(vec![loc
            .resolve(&query.language, verdict_key(v), &opts.source, &mut Vec::new())?
            .to_string()]),
        None => Ok(query.gold_answers.clone()),
    }
}

struct LinePlan<'a> {
    content: &'a Example,
    labels: &'a Lang,
}

fn render_lines<'a>(
    template: &TaskTemplate,
    plan: impl Fn(Group) -> LinePlan<'a>,
    loc: &LocalizationTable,
    opts: &RenderOptions,
    as_query: bool,
    fallbacks: &mut Vec<Fallback>,
) -> Result<String, PromptError> {
    let mut lines = Vec::with_capacity(template.lines.len());
    for line in &template.lines {
        let LinePlan { content, labels } = plan(line.group);
        let mut out = String::new();
        for seg in &line.segments {
            match seg {
                Segment::Text(t) => out.push_str(t),
                Segment::Label(key) => out.push_str(loc.resolve(labels, key, &opts.source, fallbacks)?),
                Segment::KindQuestion => {
                    let key = match content.extras.kind.ok_or_else(|| missing(content, "kind"))? {
                        CopaKind::Cause => "cause-question",
                        CopaKind::Effect => "effect-question",
                    };
                    out.push_str(loc.resolve(labels, key, &opts.source, fallbacks)?);
                }
                Segment::Field(Field::Context) => out.push_str(&content.context),
                Segment::Field(Field::Question) => out.push_str(&content.question),
                Segment::Field(Field::Choice1) => {
                    out.push_str(content.extras.choice1.as_deref().ok_or_else(|| missing(content, "choice1"))?)
                }
                Segment::Field(Field::Choice2) => {
                    out.push_str(content.extras.choice2.as_deref().ok_or_else(|| missing(content, "choice2"))?)
                }
                Segment::Field(Field::Answer) => {
                    if as_query {
                        let trimmed = out.trim_end().len();
                        out.truncate(trimmed);
                    } else {
                        out.push_str(answer_text(content, loc, opts, fallbacks)?);
                    }
                }
            }
        }
        lines.push(out);
    }
    Ok(lines.join("\n"))
}

/// Renders the query: all target language, ending with the answer label.
pub fn render_query(
    query: &Example,
    template: &TaskTemplate,
    loc: &LocalizationTable,
    opts: &RenderOptions,
) -> Result<Rendered, PromptError> {
    let label_lang = match opts.query_labels {
        Side::Src => &opts.source,
        Side::Tgt => &query.language,
    };
    let mut fallbacks = Vec::new();
    let text = render_lines(
        template,
        |group| LinePlan {
            content: query,
            labels: if group == Group::Context && opts.pin_context_labels { &opts.source } else { label_lang },
        },
        loc,
        opts,
        true,
        &mut fallbacks,
    )?;
    Ok(Rendered { text, fallbacks })
}

/// Renders one parallel example. Demonstrations follow `assignment`;
/// queries ignore it and are rendered by [`render_query`] on `tgt`.
pub fn render_example(
    src: &Example,
    tgt: &Example,
    template: &TaskTemplate,
    assignment: AttributeAssignment,
    loc: &LocalizationTable,
    opts: &RenderOptions,
    as_query: bool,
) -> Result<Rendered, PromptError> {
    if as_query {
        return render_query(tgt, template, loc, opts);
    }
    if src.id != tgt.id {
        return Err(PromptError::NotParallel { src: src.id.clone(), tgt: tgt.id.clone() });
    }
    let side_of = |group| match group {
        Group::Context => assignment.context,
        Group::Question => assignment.question,
        Group::Answer => assignment.answer,
    };
    let mut fallbacks = Vec::new();
    let text = render_lines(
        template,
        |group| {
            let content = match side_of(group) {
                Side::Src => src,
                Side::Tgt => tgt,
            };
            let labels = if group == Group::Context && opts.pin_context_labels {
                &src.language
            } else {
                &content.language
            };
            LinePlan { content, labels }
        },
        loc,
        opts,
        false,
        &mut fallbacks,
    )?;
    Ok(Rendered { text, fallbacks })
}

/// First `k` demonstrations (in the given order) followed by the query.
pub fn build_prompt(
    method: PromptMethod,
    demos: &[(&Example, &Example)],
    query: &Example,
    k: usize,
    template: &TaskTemplate,
    loc: &LocalizationTable,
    opts: &RenderOptions,
) -> Result<PromptText, PromptError> {
    if k > demos.len() {
        return Err(PromptError::TooFewDemos { k, available: demos.len() });
    }
    let assignment = method.assignment();
    let mut text = String::new();
    let mut fallbacks: Vec<Fallback> = Vec::new();
    for (src, tgt) in &demos[..k] {
        if tgt.language != query.language {
            return Err(PromptError::LanguageMismatch {
                id: tgt.id.clone(),
                expected: query.language.clone(),
                found: tgt.language.clone(),
            });
        }
        let r = render_example(src, tgt, template, assignment, loc, opts, false)?;
        text.push_str(&r.text);
        text.push_str(&opts.separator);
        fallbacks.extend(r.fallbacks);
    }
    let query_offset = text.len();
    let q = render_query(query, template, loc, opts)?;
    text.push_str(&q.text);
    fallbacks.extend(q.fallbacks);
    fallbacks.sort();
    fallbacks.dedup();
    Ok(PromptText { text, query_offset, fallbacks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Extras, Task};

    fn qa(lang: &str, id: &str, ctx: &str, q: &str, a: &str) -> Example {
        Example {
            id: id.into(),
            language: Lang::new(lang),
            task: Task::Qa,
            context: ctx.into(),
            question: q.into(),
            gold_answers: vec![a.into()],
            extras: Extras::default(),
        }
    }

    fn pair(id: &str) -> (Example, Example) {
        (
            qa("en", id, &format!("English passage {id}."), &format!("English question {id}?"), "apple"),
            qa("de", id, &format!("Deutscher Text {id}."), &format!("Deutsche Frage {id}?"), "Apfel"),
        )
    }

    #[test]
    fn in_clt_demo_mixes_sides() {
        let (src, tgt) = pair("1");
        let t = TaskTemplate::builtin(Task::Qa);
        let loc = LocalizationTable::builtin();
        let r = render_example(
            &src,
            &tgt,
            &t,
            PromptMethod::InCltTgtA.assignment(),
            &loc,
            &RenderOptions::default(),
            false,
        )
        .unwrap();
        assert_eq!(r.text, "Passage: English passage 1.\nFrage: Deutsche Frage 1?\nAntwort: Apfel");
    }

    #[test]
    fn pinned_context_labels_stay_source() {
        let (src, tgt) = pair("1");
        let t = TaskTemplate::builtin(Task::Qa);
        let loc = LocalizationTable::builtin();
        let opts = RenderOptions { pin_context_labels: true, ..Default::default() };
        let r = render_example(&src, &tgt, &t, PromptMethod::Mono.assignment(), &loc, &opts, false).unwrap();
        assert!(r.text.starts_with("Passage: Deutscher Text 1."));
        let q = render_query(&tgt, &t, &loc, &opts).unwrap();
        assert!(q.text.starts_with("Passage: Deutscher"));
    }

    #[test]
    fn query_ends_with_label() {
        let (_, tgt) = pair("9");
        let t = TaskTemplate::builtin(Task::Qa);
        let q = render_query(&tgt, &t, &LocalizationTable::builtin(), &RenderOptions::default()).unwrap();
        assert!(q.text.ends_with("\nAntwort:"));
        assert!(!q.text.contains("Apfel"));
    }

    #[test]
    fn non_parallel_pair_rejected() {
        let (src, _) = pair("1");
        let (_, tgt) = pair("2");
        let t = TaskTemplate::builtin(Task::Qa);
        let err = render_example(
            &src,
            &tgt,
            &t,
            PromptMethod::Mono.assignment(),
            &LocalizationTable::builtin(),
            &RenderOptions::default(),
            false,
        )
        .unwrap_err();
        assert!(matches!(err, PromptError::NotParallel { .. }));
    }

    #[test]
    fn too_few_demos() {
        let (src, tgt) = pair("1");
        let (_, q) = pair("q");
        let err = build_prompt(
            PromptMethod::Mono,
            &[(&src, &tgt)],
            &q,
            2,
            &TaskTemplate::builtin(Task::Qa),
            &LocalizationTable::builtin(),
            &RenderOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, PromptError::TooFewDemos { k: 2, available: 1 });
    }

    #[test]
    fn query_labels_in_source_when_configured() {
        let (_, tgt) = pair("9");
        let opts = RenderOptions { query_labels: Side::Src, ..Default::default() };
        let q = render_query(&tgt, &TaskTemplate::builtin(Task::Qa), &LocalizationTable::builtin(), &opts).unwrap();
        assert!(q.text.starts_with("Passage: Deutscher"));
        assert!(q.text.ends_with("\nAnswer:"));
    }

    #[test]
    fn missing_label_without_fallback() {
        let (_, tgt) = pair("9");
        let loc = LocalizationTable::from_toml_str("[de]\nanswer = \"A:\"\n").unwrap();
        let err = render_query(&tgt, &TaskTemplate::builtin(Task::Qa), &loc, &RenderOptions::default()).unwrap_err();
        assert_eq!(err, PromptError::MissingLabel { language: Lang::new("de"), key: "passage".into() });
    }
}

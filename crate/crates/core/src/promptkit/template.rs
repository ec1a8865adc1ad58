use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::localization::LABEL_KEYS;
use super::PromptError;
use crate::corpus::Task;

const BUILTIN: &str = include_str!("../../data/templates.toml");

/// Attribute a template line belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Context,
    Question,
    Answer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Context,
    Question,
    Answer,
    Choice1,
    Choice2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Text(String),
    Field(Field),
    Label(String),
    /// Cause or effect phrasing, chosen per example.
    KindQuestion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateLine {
    pub group: Group,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskTemplate {
    pub task: Task,
    pub lines: Vec<TemplateLine>,
}

#[derive(Deserialize)]
struct RawLine {
    group: Group,
    text: String,
}

#[derive(Deserialize)]
struct RawTemplate {
    lines: Vec<RawLine>,
}

pub fn parse_segments(text: &str) -> Result<Vec<Segment>, PromptError> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        if open > 0 {
            out.push(Segment::Text(rest[..open].to_string()));
        }
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| PromptError::Template(format!("unclosed placeholder in {text:?}")))?
            + open;
        let name = rest[open + 1..close].trim();
        out.push(match name {
            "context" => Segment::Field(Field::Context),
            "question" => Segment::Field(Field::Question),
            "answer" => Segment::Field(Field::Answer),
            "choice1" => Segment::Field(Field::Choice1),
            "choice2" => Segment::Field(Field::Choice2),
            "@kind-question" => Segment::KindQuestion,
            label if label.starts_with('@') && LABEL_KEYS.contains(&&label[1..]) => {
                Segment::Label(label[1..].to_string())
            }
            other => {
                return Err(PromptError::Template(format!("unknown placeholder {{{other}}} in {text:?}")))
            }
        });
        rest = &rest[close + 1..];
    }
    if !rest.is_empty() {
        out.push(Segment::Text(rest.to_string()));
    }
    Ok(out)
}

impl TaskTemplate {
    pub fn new(task: Task, lines: Vec<TemplateLine>) -> Result<Self, PromptError> {
        let last = lines
            .last()
            .ok_or_else(|| PromptError::Template(format!("{task}: template has no lines")))?;
        if last.segments.last() != Some(&Segment::Field(Field::Answer)) {
            return Err(PromptError::Template(format!("{task}: last line must end with {{answer}}")));
        }
        let answer_fields = lines
            .iter()
            .flat_map(|l| &l.segments)
            .filter(|s| **s == Segment::Field(Field::Answer))
            .count();
        if answer_fields != 1 {
            return Err(PromptError::Template(format!("{task}: {{answer}} must appear exactly once")));
        }
        Ok(Self { task, lines })
    }

    /// The shipped template for `task`.
    pub fn builtin(task: Task) -> Self {
        TemplateSet::builtin()
            .get(task)
            .cloned()
            .expect("shipped templates cover every task")
    }
}

#[derive(Debug, Clone, Default)]
pub struct TemplateSet {
    templates: BTreeMap<Task, TaskTemplate>,
}

impl TemplateSet {
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN).expect("shipped templates parse")
    }

    pub fn from_toml_str(raw: &str) -> Result<Self, PromptError> {
        let parsed: BTreeMap<String, RawTemplate> =
            toml::from_str(raw).map_err(|e| PromptError::Data(e.to_string()))?;
        let mut templates = BTreeMap::new();
        for (name, raw) in parsed {
            let task: Task = name
                .parse()
                .map_err(|_| PromptError::Template(format!("unknown task {name:?}")))?;
            let lines = raw
                .lines
                .into_iter()
                .map(|l| Ok(TemplateLine { group: l.group, segments: parse_segments(&l.text)? }))
                .collect::<Result<Vec<_>, PromptError>>()?;
            templates.insert(task, TaskTemplate::new(task, lines)?);
        }
        Ok(Self { templates })
    }

    pub fn load(path: &Path) -> Result<Self, PromptError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| PromptError::Data(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&raw)
    }

    pub fn get(&self, task: Task) -> Option<&TaskTemplate> {
        self.templates.get(&task)
    }
}

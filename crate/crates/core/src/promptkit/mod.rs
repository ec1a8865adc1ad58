//! Demonstration and query rendering under the prompting methods.

mod localization;
mod method;
mod render;
mod template;

use crate::lang::Lang;

pub use localization::{Fallback, LocalizationTable, LABEL_KEYS};
pub use method::{resolve_assignment, AttributeAssignment, PromptMethod, Side};
pub use render::{
    build_prompt, query_golds, render_example, render_query, PromptText, RenderOptions, Rendered,
};
pub use template::{parse_segments, Field, Group, Segment, TaskTemplate, TemplateLine, TemplateSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("unknown prompt method {0:?}")]
    UnknownMethod(String),
    #[error("no label {key:?} for language {language}")]
    MissingLabel { language: Lang, key: String },
    #[error("example {id} has no {field}")]
    MissingField { id: String, field: String },
    #[error("demonstration pair is not parallel: {src} vs {tgt}")]
    NotParallel { src: String, tgt: String },
    #[error("demonstration {id} is in {found}, query is in {expected}")]
    LanguageMismatch { id: String, expected: Lang, found: Lang },
    #[error("k={k} but only {available} demonstrations available")]
    TooFewDemos { k: usize, available: usize },
    #[error("template: {0}")]
    Template(String),
    #[error("data file: {0}")]
    Data(String),
}

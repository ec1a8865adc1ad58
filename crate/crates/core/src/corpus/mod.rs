//! Multilingual task datasets in a uniform, parallel representation.

mod classification;
mod parallel;
mod qa;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lang::Lang;

pub use classification::{load_classification_dataset, parse_classification};
pub use parallel::{validate_parallelism, ParallelCorpus, ParallelismReport};
pub use qa::{load_qa_dataset, parse_qa_json, QaFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "qa")]
    Qa,
    #[serde(rename = "paws-x")]
    PawsX,
    #[serde(rename = "xnli")]
    Xnli,
    #[serde(rename = "xcopa")]
    Xcopa,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Qa, Task::PawsX, Task::Xnli, Task::Xcopa];

    pub fn name(self) -> &'static str {
        match self {
            Task::Qa => "qa",
            Task::PawsX => "paws-x",
            Task::Xnli => "xnli",
            Task::Xcopa => "xcopa",
        }
    }

    /// Extractive QA is scored by token F1, the rest by exact match.
    pub fn is_classification(self) -> bool {
        !matches!(self, Task::Qa)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qa" | "xquad" | "mlqa" => Ok(Task::Qa),
            "paws-x" | "pawsx" | "paws_x" => Ok(Task::PawsX),
            "xnli" => Ok(Task::Xnli),
            "xcopa" => Ok(Task::Xcopa),
            other => Err(CorpusError::UnknownTask(other.to_string())),
        }
    }
}

/// Verbalized classification label. Metrics only ever see the text; the key
/// lets prompts render the label in another language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    True,
    False,
    Neither,
}

impl Verdict {
    pub fn english(self) -> &'static str {
        match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::True => "True",
            Verdict::False => "False",
            Verdict::Neither => "Neither",
        }
    }
}

/// Whether an XCOPA premise asks for its cause or its effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopaKind {
    Cause,
    Effect,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extras {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CopaKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl Extras {
    pub fn is_empty(&self) -> bool {
        self == &Extras::default()
    }
}

/// One task instance in one language.
///
/// Field semantics per task:
///
/// | task   | context     | question    | gold answer            |
/// |--------|-------------|-------------|------------------------|
/// | qa     | passage     | question    | annotated answer texts |
/// | paws-x | sentence 1  | sentence 2  | `Yes` / `No`           |
/// | xnli   | premise     | hypothesis  | `True`/`False`/`Neither` |
/// | xcopa  | premise     | (empty)     | text of the right option |
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    pub language: Lang,
    pub task: Task,
    pub context: String,
    pub question: String,
    pub gold_answers: Vec<String>,
    #[serde(default, skip_serializing_if = "Extras::is_empty")]
    pub extras: Extras,
}

impl Example {
    pub fn primary_answer(&self) -> &str {
        self.gold_answers.first().map(String::as_str).unwrap_or("")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at {at}: {message}")]
    Parse { at: String, message: String },
    #[error("dataset {0} contains no examples")]
    Empty(String),
    #[error("row {row}: unknown label {value:?}")]
    InvalidLabel { row: usize, value: String },
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("unknown QA format {0:?}")]
    UnknownFormat(String),
    #[error("parallel validation needs at least two languages, got {0}")]
    TooFewLanguages(usize),
    #[error("no id is shared by all languages ({0})")]
    NoSharedIds(String),
    #[error("language {language} mixes tasks {first} and {second}")]
    MixedTasks {
        language: Lang,
        first: Task,
        second: Task,
    },
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Drops repeated ids, keeping the first occurrence.
pub(crate) fn dedup_ids(examples: Vec<Example>, origin: &str) -> Vec<Example> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(examples.len());
    for ex in examples {
        if seen.insert(ex.id.clone()) {
            out.push(ex);
        } else {
            log::warn!("{origin}: duplicate id {} ignored", ex.id);
        }
    }
    out
}

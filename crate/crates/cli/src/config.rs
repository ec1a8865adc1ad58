use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clt_core::corpus::Task;
use clt_core::inference::DecodeParams;
use clt_core::metrics::PunctuationClass;
use clt_core::promptkit::{PromptMethod, RenderOptions};
use clt_core::retry::RetryPolicy;
use clt_core::Lang;
use serde::{Deserialize, Serialize};

/// Where completions come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Endpoint {
    /// Offline mock that answers every registered query with its gold answer.
    EchoGold,
    Http {
        url: String,
        /// Environment variable holding a bearer token.
        #[serde(default)]
        token_env: Option<String>,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
}

fn default_timeout() -> u64 {
    60
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Name sent to the endpoint and used in every output row.
    pub name: String,
    /// Corpus family for seen/unseen grouping (`bloom`, `xglm`).
    #[serde(default)]
    pub family: Option<String>,
    pub endpoint: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskData {
    /// Evaluation set per language.
    pub queries: BTreeMap<Lang, PathBuf>,
    /// Demonstration buckets as written by `clt pipeline`.
    pub buckets: PathBuf,
    /// QA file layout (`xquad`, `mlqa`, `squad`). Ignored for classification.
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    /// Languages split into seen/unseen groups. Defaults to every target
    /// except the source.
    pub group_languages: Option<Vec<Lang>>,
    /// Languages left out of correlation plots.
    pub exclusions: Vec<Lang>,
    /// Extra profile records, typically proximity values.
    pub profiles: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub models: Vec<ModelConfig>,
    pub tasks: Vec<Task>,
    #[serde(default = "english")]
    pub source: Lang,
    /// Query languages. Include the source to get its MONO row; CLT cells
    /// for it are skipped.
    pub targets: Vec<Lang>,
    pub methods: Vec<PromptMethod>,
    pub shots: Vec<usize>,
    /// Bucket indices to evaluate; empty means every bucket in the file.
    #[serde(default)]
    pub buckets: Vec<usize>,
    /// Picks the query subsample when `max_queries` is set.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_queries: Option<usize>,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Keyed by task name.
    pub data: BTreeMap<String, TaskData>,
    #[serde(default)]
    pub decode: DecodeParams,
    #[serde(default)]
    pub render: RenderOptions,
    /// Replaces built-in templates for the tasks it defines.
    #[serde(default)]
    pub templates: Option<PathBuf>,
    /// Merged over the built-in label table.
    #[serde(default)]
    pub localization: Option<PathBuf>,
    #[serde(default)]
    pub punctuation: PunctuationClass,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default)]
    pub report: ReportConfig,
}

fn english() -> Lang {
    Lang::new("en")
}

fn default_concurrency() -> usize {
    4
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Reads a TOML file. Relative paths are taken from the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        let mut cfg: RunConfig =
            toml::from_str(&raw).map_err(|e| ConfigError::Parse(path.to_path_buf(), e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        Ok(cfg)
    }

    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.cache_dir);
        fix(&mut self.output_dir);
        for data in self.data.values_mut() {
            fix(&mut data.buckets);
            data.queries.values_mut().for_each(fix);
        }
        self.report.profiles.iter_mut().for_each(fix);
        self.templates.iter_mut().for_each(fix);
        self.localization.iter_mut().for_each(fix);
    }

    pub fn task_data(&self, task: Task) -> Result<&TaskData, ConfigError> {
        self.data
            .iter()
            .find(|(name, _)| name.parse::<Task>().ok() == Some(task))
            .map(|(_, d)| d)
            .ok_or_else(|| ConfigError::Invalid(format!("no data entry for task {task}")))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.models.is_empty() {
            return invalid("no models".into());
        }
        for (what, empty) in [
            ("tasks", self.tasks.is_empty()),
            ("targets", self.targets.is_empty()),
            ("methods", self.methods.is_empty()),
            ("shots", self.shots.is_empty()),
        ] {
            if empty {
                return invalid(format!("{what} is empty"));
            }
        }
        let mut names: Vec<&str> = self.models.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return invalid("model names must be unique".into());
        }
        if self.concurrency == 0 {
            return invalid("concurrency must be at least 1".into());
        }
        if self.max_queries == Some(0) {
            return invalid("max_queries must be at least 1".into());
        }
        for name in self.data.keys() {
            name.parse::<Task>().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        for task in &self.tasks {
            let data = self.task_data(*task)?;
            for lang in &self.targets {
                if !data.queries.contains_key(lang) {
                    return invalid(format!("task {task} has no query file for {lang}"));
                }
            }
        }
        self.decode.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn render_options(&self) -> RenderOptions {
        RenderOptions { source: self.source.clone(), ..self.render.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        tasks = ["qa"]
        targets = ["de"]
        methods = ["MONO", "IN_CLT"]
        shots = [0, 2]
        cache_dir = "cache"
        output_dir = "out"

        [[models]]
        name = "mock"
        endpoint = { kind = "echo-gold" }

        [data.qa]
        queries = { de = "de.json" }
        buckets = "buckets.jsonl"
    "#;

    #[test]
    fn defaults_fill_in() {
        let mut cfg: RunConfig = toml::from_str(MINIMAL).unwrap();
        cfg.rebase(Path::new("/base"));
        assert_eq!(cfg.source, Lang::new("en"));
        assert_eq!(cfg.methods, vec![PromptMethod::Mono, PromptMethod::InCltTgtA]);
        assert_eq!(cfg.decode, DecodeParams::default());
        assert_eq!(cfg.concurrency, 4);
        assert_eq!(cfg.output_dir, PathBuf::from("/base/out"));
        assert_eq!(cfg.task_data(Task::Qa).unwrap().queries[&Lang::new("de")], PathBuf::from("/base/de.json"));
        cfg.validate().unwrap();
    }

    #[test]
    fn prompt_overrides_and_punctuation() {
        let raw = format!("punctuation = \"ascii\"\ntemplates = \"t.toml\"\n{MINIMAL}");
        let mut cfg: RunConfig = toml::from_str(&raw).unwrap();
        cfg.rebase(Path::new("/base"));
        assert_eq!(cfg.punctuation, PunctuationClass::Ascii);
        assert_eq!(cfg.templates, Some(PathBuf::from("/base/t.toml")));
        assert_eq!(cfg.localization, None);
    }

    #[test]
    fn missing_query_file_is_rejected() {
        let mut cfg: RunConfig = toml::from_str(MINIMAL).unwrap();
        cfg.targets.push(Lang::new("es"));
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("no query file for es"), "{err}");
    }

    #[test]
    fn http_endpoint_parses() {
        let e: Endpoint = toml::from_str(
            r#"
            kind = "http"
            url = "http://localhost:8080/v1/completions"
            token_env = "GEN_TOKEN"
            "#,
        )
        .unwrap();
        assert_eq!(
            e,
            Endpoint::Http {
                url: "http://localhost:8080/v1/completions".into(),
                token_env: Some("GEN_TOKEN".into()),
                timeout_secs: 60
            }
        );
    }
}

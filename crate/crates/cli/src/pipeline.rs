//! `clt pipeline`: translate a source training set and write parallel buckets.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clt_core::corpus::{load_classification_dataset, load_qa_dataset, QaFormat, Task};
use clt_core::mtpipeline::{
    run_pipeline, write_buckets_jsonl, Bucket, CorruptingTranslator, HttpTranslator, IdentityTranslator, MtClient,
    PipelineConfig,
};
use clt_core::{Lang, Real};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Translator {
    /// Returns the input; every example passes quality estimation.
    Identity,
    /// Replaces a seeded fraction of tokens.
    Corrupting { seed: u64, rate: f64 },
    Http {
        url: String,
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
pub struct PipelineRunConfig {
    pub task: Task,
    #[serde(default = "english")]
    pub source: Lang,
    pub targets: Vec<Lang>,
    /// Source-language training set.
    pub input: PathBuf,
    #[serde(default)]
    pub format: Option<String>,
    pub output_dir: PathBuf,
    pub translator: Translator,
    #[serde(default)]
    pub pipeline: PipelineConfig,
}

fn english() -> Lang {
    Lang::new("en")
}

impl PipelineRunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Self = toml::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.input, &mut cfg.output_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

fn translator(t: &Translator) -> Result<Box<dyn MtClient>> {
    Ok(match t {
        Translator::Identity => Box::new(IdentityTranslator),
        Translator::Corrupting { seed, rate } => Box::new(CorruptingTranslator { seed: *seed, rate: *rate }),
        Translator::Http { url, token_env, timeout_secs } => {
            if let Some(var) = token_env {
                if std::env::var_os(var).is_none() {
                    bail!("environment variable {var} is not set");
                }
            }
            Box::new(HttpTranslator::new(url.clone(), token_env.clone(), Duration::from_secs(*timeout_secs))?)
        }
    })
}

fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).with_context(|| path.display().to_string())?);
    for r in rows {
        serde_json::to_writer(&mut out, &r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub buckets: PathBuf,
    pub candidates: usize,
    pub accepted: usize,
    pub dropped: usize,
}

/// Writes `buckets.jsonl`, `quality.jsonl` and `drops.jsonl` to the output
/// directory.
pub fn run(cfg: &PipelineRunConfig) -> Result<PipelineSummary> {
    let examples = if cfg.task == Task::Qa {
        let format = match &cfg.format {
            Some(f) => f.parse::<QaFormat>()?,
            None => QaFormat::SquadV1,
        };
        load_qa_dataset(&cfg.input, format, &cfg.source)?
    } else {
        load_classification_dataset(&cfg.input, cfg.task, &cfg.source)?
    };
    let mt = translator(&cfg.translator)?;
    let out = run_pipeline::<Real>(&examples, &cfg.source, &cfg.targets, mt.as_ref(), &cfg.pipeline)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let buckets: Vec<Bucket> = out.buckets.into_values().flatten().collect();
    let path = cfg.output_dir.join("buckets.jsonl");
    write_buckets_jsonl(&path, &buckets)?;
    write_jsonl(&cfg.output_dir.join("quality.jsonl"), &out.quality)?;
    write_jsonl(&cfg.output_dir.join("drops.jsonl"), &out.drops.drops)?;
    Ok(PipelineSummary {
        buckets: path,
        candidates: examples.len(),
        accepted: out.quality.iter().filter(|q| q.accepted).count(),
        dropped: out.drops.drops.len(),
    })
}

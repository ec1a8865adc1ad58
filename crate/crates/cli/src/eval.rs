//! Grid execution: prompts, generations, scores and aggregates for every
//! (model, task, language, method, k, bucket) cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clt_core::corpus::{load_classification_dataset, load_qa_dataset, Example, QaFormat, Task};
use clt_core::inference::{
    DecodeParams, EchoGold, HttpGenerator, InferenceClient, ResponseCache, TextGenerator,
};
use clt_core::metrics::{aggregate, bucket_score, exact_match_with, f1_with, PunctuationClass, AggregateResult, BucketScore, GroupKey, ScoreRecord};
use clt_core::mtpipeline::read_buckets_jsonl;
use clt_core::promptkit::{build_prompt, query_golds, render_query, LocalizationTable, TaskTemplate, TemplateSet};
use clt_core::{Lang, Real};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, Endpoint, ModelConfig, RunConfig};
use crate::digest::{file_digest, seeded_rank, value_digest};

pub const MANIFEST: &str = "manifest.json";
pub const SCORES: &str = "scores.jsonl";
pub const BUCKET_SCORES: &str = "bucket_scores.jsonl";
pub const AGGREGATES: &str = "aggregates.jsonl";
pub const GENERATIONS: &str = "generations.jsonl";
pub const FAILURES: &str = "failures.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Preflight(String),
    #[error("writing {0}: {1}")]
    Io(PathBuf, std::io::Error),
}

/// One grid cell: an aggregate key plus the bucket supplying demonstrations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    #[serde(flatten)]
    pub key: GroupKey,
    pub bucket: usize,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|bucket={}", self.key, self.bucket)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_digest: String,
    /// Input file → sha256.
    pub corpus_digests: BTreeMap<String, String>,
    pub config: RunConfig,
    /// Every aggregate the grid should produce, sorted.
    pub expected: Vec<GroupKey>,
    pub cells: usize,
}

/// A generation as stored in the run directory. Timing and cache status are
/// left out so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRow {
    #[serde(flatten)]
    pub cell: Cell,
    pub id: String,
    pub request_key: String,
    pub prompt: String,
    pub raw_output: String,
    pub parsed_answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    #[serde(flatten)]
    pub cell: Cell,
    /// Absent when the whole cell failed.
    pub id: Option<String>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub run_dir: PathBuf,
    pub cells: usize,
    pub scored: usize,
    pub failures: usize,
    pub aggregates: usize,
    pub network_calls: usize,
}

/// Queries and demonstration buckets for one task.
struct TaskInputs {
    queries: BTreeMap<Lang, Vec<Example>>,
    buckets: BTreeMap<(Lang, usize), Vec<Example>>,
    indices: Vec<usize>,
}

struct Inputs {
    tasks: BTreeMap<Task, TaskInputs>,
    digests: BTreeMap<String, String>,
}

fn preflight(msg: impl Into<String>) -> EvalError {
    EvalError::Preflight(msg.into())
}

fn digest_into(digests: &mut BTreeMap<String, String>, path: &Path) -> Result<(), EvalError> {
    let d = file_digest(path).map_err(|e| preflight(format!("cannot read {}: {e}", path.display())))?;
    digests.insert(path.display().to_string(), d);
    Ok(())
}

fn load_queries(cfg: &RunConfig, task: Task, lang: &Lang, path: &Path) -> Result<Vec<Example>, EvalError> {
    let loaded = if task == Task::Qa {
        let format = match &cfg.task_data(task)?.format {
            Some(f) => f.parse::<QaFormat>().map_err(|e| preflight(e.to_string()))?,
            None => QaFormat::Xquad,
        };
        load_qa_dataset(path, format, lang)
    } else {
        load_classification_dataset(path, task, lang)
    };
    let mut examples = loaded.map_err(|e| preflight(format!("{task}/{lang}: {e}")))?;
    if let Some(n) = cfg.max_queries {
        examples.sort_by_cached_key(|e| seeded_rank(cfg.seed, &e.id));
        examples.truncate(n);
    }
    examples.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(examples)
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs, EvalError> {
    let mut tasks = BTreeMap::new();
    let mut digests = BTreeMap::new();
    for &task in &cfg.tasks {
        let data = cfg.task_data(task)?;
        let mut queries = BTreeMap::new();
        for lang in &cfg.targets {
            let path = &data.queries[lang];
            digest_into(&mut digests, path)?;
            queries.insert(lang.clone(), load_queries(cfg, task, lang, path)?);
        }
        digest_into(&mut digests, &data.buckets)?;
        let mut buckets = BTreeMap::new();
        let mut available = BTreeSet::new();
        for b in read_buckets_jsonl(&data.buckets).map_err(|e| preflight(format!("{task} buckets: {e}")))? {
            available.insert(b.index);
            if b.examples.iter().any(|e| e.task != task) {
                return Err(preflight(format!("{} holds examples of another task than {task}", data.buckets.display())));
            }
            buckets.insert((b.language.clone(), b.index), b.examples);
        }
        let indices: Vec<usize> = if cfg.buckets.is_empty() {
            available.into_iter().collect()
        } else {
            for i in &cfg.buckets {
                if !available.contains(i) {
                    return Err(preflight(format!("{task}: bucket {i} not in {}", data.buckets.display())));
                }
            }
            let mut v = cfg.buckets.clone();
            v.sort_unstable();
            v.dedup();
            v
        };
        if indices.is_empty() {
            return Err(preflight(format!("{task}: no buckets in {}", data.buckets.display())));
        }
        tasks.insert(task, TaskInputs { queries, buckets, indices });
    }
    Ok(Inputs { tasks, digests })
}

/// The grid in execution order. CLT cells whose target is the source
/// language are skipped.
fn grid(cfg: &RunConfig, indices: &BTreeMap<Task, Vec<usize>>) -> Vec<Cell> {
    let mut cells = Vec::new();
    for model in &cfg.models {
        for &task in &cfg.tasks {
            for language in &cfg.targets {
                for &method in &cfg.methods {
                    if method.is_cross_lingual() && *language == cfg.source {
                        continue;
                    }
                    for &k in &cfg.shots {
                        for &bucket in &indices[&task] {
                            let key = GroupKey { model: model.name.clone(), task, language: language.clone(), method, k };
                            cells.push(Cell { key, bucket });
                        }
                    }
                }
            }
        }
    }
    cells.sort();
    cells.dedup();
    cells
}

/// Cells that `run_eval` would execute, without calling any endpoint.
pub fn plan(cfg: &RunConfig) -> Result<Vec<Cell>, EvalError> {
    cfg.validate()?;
    let inputs = load_inputs(cfg)?;
    Ok(grid(cfg, &inputs.tasks.iter().map(|(t, i)| (*t, i.indices.clone())).collect()))
}

struct Query<'a> {
    example: &'a Example,
    prompt: String,
    golds: Vec<String>,
}

/// Renders every prompt of a cell; any failure here aborts the run before
/// the first request.
fn render_cell<'a>(
    cfg: &RunConfig,
    cell: &Cell,
    inputs: &'a TaskInputs,
    template: &TaskTemplate,
    loc: &LocalizationTable,
) -> Result<Vec<Query<'a>>, EvalError> {
    let key = &cell.key;
    let opts = cfg.render_options();
    let demo_side = |lang: &Lang| -> Result<&[Example], EvalError> {
        if key.k == 0 {
            return Ok(&[]);
        }
        let b = inputs
            .buckets
            .get(&(lang.clone(), cell.bucket))
            .ok_or_else(|| preflight(format!("{cell}: no {lang} bucket {}", cell.bucket)))?;
        if b.len() < key.k {
            return Err(preflight(format!("{cell}: bucket has {} examples, k = {}", b.len(), key.k)));
        }
        Ok(&b[..key.k])
    };
    let tgt = demo_side(&key.language)?;
    let src = if key.method.assignment().uses_source() { demo_side(&cfg.source)? } else { tgt };
    let pairs: Vec<(&Example, &Example)> = src.iter().zip(tgt).collect();
    inputs.queries[&key.language]
        .iter()
        .map(|q| {
            let prompt = build_prompt(key.method, &pairs, q, key.k, template, loc, &opts)
                .map_err(|e| preflight(format!("{cell}, query {}: {e}", q.id)))?;
            let golds = query_golds(q, loc, &opts).map_err(|e| preflight(format!("{cell}, query {}: {e}", q.id)))?;
            Ok(Query { example: q, prompt: prompt.text, golds })
        })
        .collect()
}

fn generator(
    model: &ModelConfig,
    cfg: &RunConfig,
    inputs: &Inputs,
    loc: &LocalizationTable,
    templates: &BTreeMap<Task, TaskTemplate>,
) -> Result<Arc<dyn TextGenerator>, EvalError> {
    match &model.endpoint {
        Endpoint::EchoGold => {
            let opts = cfg.render_options();
            let mut echo = EchoGold::new(opts.separator.clone());
            for (task, ti) in &inputs.tasks {
                let template = &templates[task];
                for q in ti.queries.values().flatten() {
                    let text = render_query(q, template, loc, &opts).map_err(|e| preflight(e.to_string()))?.text;
                    let golds = query_golds(q, loc, &opts).map_err(|e| preflight(e.to_string()))?;
                    if let Some(g) = golds.first() {
                        echo.insert(text, g.clone());
                    }
                }
            }
            Ok(Arc::new(echo))
        }
        Endpoint::Http { url, token_env, timeout_secs } => {
            if let Some(var) = token_env {
                if std::env::var_os(var).is_none() {
                    return Err(preflight(format!("model {}: environment variable {var} is not set", model.name)));
                }
            }
            let g = HttpGenerator::new(url.clone(), token_env.clone(), Duration::from_secs(*timeout_secs))
                .map_err(|e| preflight(format!("model {}: {e}", model.name)))?;
            Ok(Arc::new(g))
        }
    }
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), EvalError> {
    let io = |e| EvalError::Io(path.to_path_buf(), e);
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for r in rows {
        serde_json::to_writer(&mut out, r).map_err(|e| io(e.into()))?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), EvalError> {
    let mut raw = serde_json::to_string_pretty(value).expect("serializable");
    raw.push('\n');
    std::fs::write(path, raw).map_err(|e| EvalError::Io(path.to_path_buf(), e))
}

fn score(key: &GroupKey, bucket: usize, q: &Query<'_>, answer: &str, punct: PunctuationClass) -> ScoreRecord<Real> {
    let lang = &q.example.language;
    ScoreRecord::new(
        q.example.id.clone(),
        key.clone(),
        bucket,
        f1_with(answer, &q.golds, lang, punct),
        exact_match_with(answer, &q.golds, lang, punct),
    )
}

fn prompt_resources(cfg: &RunConfig) -> Result<(LocalizationTable, BTreeMap<Task, TaskTemplate>), EvalError> {
    let mut loc = LocalizationTable::builtin();
    if let Some(path) = &cfg.localization {
        loc.merge(LocalizationTable::load(path).map_err(|e| preflight(e.to_string()))?);
    }
    let custom = match &cfg.templates {
        Some(path) => Some(TemplateSet::load(path).map_err(|e| preflight(e.to_string()))?),
        None => None,
    };
    let templates = cfg
        .tasks
        .iter()
        .map(|t| {
            let template = custom.as_ref().and_then(|c| c.get(*t)).cloned().unwrap_or_else(|| TaskTemplate::builtin(*t));
            (*t, template)
        })
        .collect();
    Ok((loc, templates))
}

pub fn run_eval(cfg: &RunConfig) -> Result<EvalSummary, EvalError> {
    cfg.validate()?;
    let inputs = load_inputs(cfg)?;
    let (loc, templates) = prompt_resources(cfg)?;
    let cells = grid(cfg, &inputs.tasks.iter().map(|(t, i)| (*t, i.indices.clone())).collect());

    let mut rendered = Vec::with_capacity(cells.len());
    for cell in &cells {
        let task = cell.key.task;
        rendered.push(render_cell(cfg, cell, &inputs.tasks[&task], &templates[&task], &loc)?);
    }
    let mut clients = BTreeMap::new();
    for model in &cfg.models {
        let cache = ResponseCache::open(&cfg.cache_dir).map_err(|e| preflight(e.to_string()))?;
        let client = InferenceClient::new(model.name.clone(), generator(model, cfg, &inputs, &loc, &templates)?)
            .with_cache(cache)
            .with_retry(cfg.retry);
        clients.insert(model.name.clone(), client);
    }
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| EvalError::Io(cfg.output_dir.clone(), e))?;

    let mut scores: Vec<ScoreRecord<Real>> = Vec::new();
    let mut generations = Vec::new();
    let mut failures = Vec::new();
    for (cell, queries) in cells.iter().zip(&rendered) {
        let client = &clients[&cell.key.model];
        let requests: Vec<(String, DecodeParams)> = queries.iter().map(|q| (q.prompt.clone(), cfg.decode.clone())).collect();
        log::info!("{cell}: {} queries", requests.len());
        let results = match client.run_batch(&requests, cfg.concurrency, false) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("{cell}: {e}");
                failures.push(FailureRow { cell: cell.clone(), id: None, error: e.to_string() });
                continue;
            }
        };
        for (q, r) in queries.iter().zip(results) {
            match r {
                Ok(g) => {
                    scores.push(score(&cell.key, cell.bucket, q, &g.parsed_answer, cfg.punctuation));
                    generations.push(GenerationRow {
                        cell: cell.clone(),
                        id: q.example.id.clone(),
                        request_key: g.request_key,
                        prompt: g.prompt,
                        raw_output: g.raw_output,
                        parsed_answer: g.parsed_answer,
                    });
                }
                Err(e) => failures.push(FailureRow { cell: cell.clone(), id: Some(q.example.id.clone()), error: e.to_string() }),
            }
        }
    }

    let mut by_bucket: BTreeMap<(GroupKey, usize), Vec<ScoreRecord<Real>>> = BTreeMap::new();
    for s in &scores {
        by_bucket.entry((s.key.clone(), s.bucket)).or_default().push(s.clone());
    }
    let mut bucket_rows: Vec<BucketScore<Real>> = Vec::new();
    let mut by_key: BTreeMap<GroupKey, Vec<Vec<ScoreRecord<Real>>>> = BTreeMap::new();
    for ((key, _), records) in by_bucket {
        bucket_rows.push(bucket_score(&records).expect("bucket is non-empty and uniform"));
        by_key.entry(key).or_default().push(records);
    }
    let aggregates: Vec<AggregateResult<Real>> =
        by_key.values().map(|b| aggregate(b).expect("buckets are non-empty and uniform")).collect();

    let expected: Vec<GroupKey> = cells.iter().map(|c| c.key.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let manifest = Manifest {
        config_digest: value_digest(cfg),
        corpus_digests: inputs.digests.clone(),
        config: cfg.clone(),
        expected,
        cells: cells.len(),
    };
    let dir = &cfg.output_dir;
    write_json(&dir.join(MANIFEST), &manifest)?;
    write_jsonl(&dir.join(SCORES), &scores)?;
    write_jsonl(&dir.join(BUCKET_SCORES), &bucket_rows)?;
    write_jsonl(&dir.join(AGGREGATES), &aggregates)?;
    write_jsonl(&dir.join(GENERATIONS), &generations)?;
    write_jsonl(&dir.join(FAILURES), &failures)?;

    Ok(EvalSummary {
        run_dir: dir.clone(),
        cells: cells.len(),
        scored: scores.len(),
        failures: failures.len(),
        aggregates: aggregates.len(),
        network_calls: clients.values().map(InferenceClient::network_calls).sum(),
    })
}

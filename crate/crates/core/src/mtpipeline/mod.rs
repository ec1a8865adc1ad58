//! Parallel demonstration buckets from a source-language training set:
//! machine translation, round-trip BLEU quality estimation, filtering and
//! seeded bucketing.

mod bleu;
mod bucket;
mod client;
mod filter;
mod quality;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::concurrency::map_all;
use crate::corpus::{validate_parallelism, CorpusError, Example, ParallelismReport};
use crate::http::HttpError;
use crate::lang::Lang;
use crate::retry::RetryPolicy;
use crate::scalar::Scalar;

pub use bleu::{bleu_score, bleu_tokens, tokenize, BleuConfig, Smoothing};
pub use bucket::{
    build_buckets, build_parallel_buckets, read_buckets_jsonl, write_buckets_jsonl, Bucket, BucketRecord,
};
pub use client::{
    ClauseDroppingTranslator, CorruptingTranslator, HttpTranslator, IdentityTranslator, MtClient,
    SymbolTranslator,
};
pub use filter::{answer_in_context, filter_candidates, filter_parallel, Drop, DropReport, DropRule};
pub use quality::{estimate_quality, round_trip, QualityRecord, RttRecord, RttReference};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Minimum round-trip BLEU (inclusive) for context and question.
    pub bleu_threshold: f64,
    pub bucket_count: usize,
    pub bucket_size: usize,
    pub rng_seed: u64,
    pub max_ngram_order: usize,
    pub smoothing: Smoothing,
    pub rtt_reference: RttReference,
    /// Examples translated concurrently.
    pub concurrency: usize,
    pub retry: RetryPolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            bleu_threshold: 50.0,
            bucket_count: 5,
            bucket_size: 10,
            rng_seed: 0,
            max_ngram_order: 4,
            smoothing: Smoothing::AddOne,
            rtt_reference: RttReference::Original,
            concurrency: 4,
            retry: RetryPolicy::default(),
        }
    }
}

impl PipelineConfig {
    pub fn bleu_config(&self) -> BleuConfig {
        BleuConfig { max_ngram_order: self.max_ngram_order, smoothing: self.smoothing }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(0.0..=100.0).contains(&self.bleu_threshold) {
            return Err(PipelineError::Config(format!("bleu_threshold {} outside [0, 100]", self.bleu_threshold)));
        }
        if self.bucket_count == 0 || self.bucket_size == 0 {
            return Err(PipelineError::Config("bucket_count and bucket_size must be positive".into()));
        }
        if self.max_ngram_order == 0 {
            return Err(PipelineError::Config("max_ngram_order must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("translation of {id} failed after {attempts} attempt(s): {source}")]
    Mt {
        id: String,
        attempts: u32,
        #[source]
        source: HttpError,
    },
    #[error("example {id} has empty {field}")]
    EmptyText { id: String, field: &'static str },
    #[error("pool for {language} has {available} usable examples, {needed} needed (short by {})", needed - available)]
    InsufficientPool { language: Lang, needed: usize, available: usize },
    #[error("pool for {0} does not hold the same ids as the other languages")]
    NotAligned(Lang),
    #[error("invalid pipeline config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput<T> {
    pub buckets: BTreeMap<Lang, Vec<Bucket>>,
    pub quality: Vec<QualityRecord<T>>,
    pub drops: DropReport,
    pub parallelism: ParallelismReport,
}

/// Runs the whole construction: translate and score every source example
/// into each target, drop rejected and filtered items, and bucket the ids
/// that survive in every language (the source included).
pub fn run_pipeline<T: Scalar>(
    source_examples: &[Example],
    source: &Lang,
    targets: &[Lang],
    client: &dyn MtClient,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput<T>, PipelineError> {
    cfg.validate()?;
    let mut sorted: Vec<&Example> = source_examples.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let mut drops = DropReport::default();
    let mut quality = Vec::new();
    let mut pools: BTreeMap<Lang, Vec<Example>> = BTreeMap::new();
    pools.insert(source.clone(), sorted.iter().map(|e| (*e).clone()).collect());
    for target in targets.iter().filter(|t| *t != source) {
        let results = map_all(&sorted, cfg.concurrency, |_, ex| {
            estimate_quality::<T>(ex, source, target, client, cfg)
        });
        let mut accepted = Vec::new();
        for r in results {
            let (translated, ok, record) = r?;
            if ok {
                accepted.push(translated);
            } else {
                drops.push(&record.id, target, DropRule::QualityBelowThreshold);
            }
            quality.push(record);
        }
        log::info!("{target}: {} of {} candidates pass quality estimation", accepted.len(), sorted.len());
        pools.insert(target.clone(), accepted);
    }

    let (corpus, parallelism) = validate_parallelism(pools.clone())?;
    let (filtered, filter_drops) = filter_parallel(pools, &corpus);
    drops.extend(filter_drops);
    let buckets = build_parallel_buckets(&filtered, cfg)?;
    Ok(PipelineOutput { buckets, quality, drops, parallelism })
}

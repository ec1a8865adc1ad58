use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PipelineConfig, PipelineError};
use crate::corpus::{Example, Extras, Task};
use crate::lang::Lang;
use crate::text::dedup_key;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub language: Lang,
    pub index: usize,
    pub examples: Vec<Example>,
}

#[derive(Default)]
struct Slot {
    ids: Vec<usize>,
    questions: HashSet<String>,
    contexts: HashSet<String>,
}

impl Slot {
    fn admits(&self, ex: &Example) -> bool {
        let q = dedup_key(&ex.question);
        (q.is_empty() || !self.questions.contains(&q)) && !self.contexts.contains(&dedup_key(&ex.context))
    }

    fn add(&mut self, idx: usize, ex: &Example) {
        self.ids.push(idx);
        let q = dedup_key(&ex.question);
        if !q.is_empty() {
            self.questions.insert(q);
        }
        self.contexts.insert(dedup_key(&ex.context));
    }
}

/// Shuffles `0..n` with the configured seed and fills buckets first-fit,
/// refusing an item where any language would repeat a question or context.
fn assign(views: &[&[Example]], cfg: &PipelineConfig, language: &Lang) -> Result<Vec<Vec<usize>>, PipelineError> {
    let n = views[0].len();
    let (b, s) = (cfg.bucket_count, cfg.bucket_size);
    let needed = b * s;
    if n < needed {
        return Err(PipelineError::InsufficientPool { language: language.clone(), needed, available: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.rng_seed));

    let mut slots: Vec<Vec<Slot>> = (0..b).map(|_| views.iter().map(|_| Slot::default()).collect()).collect();
    let mut placed = 0;
    for idx in order {
        if placed == needed {
            break;
        }
        let target = slots.iter().position(|per_lang| {
            per_lang[0].ids.len() < s && per_lang.iter().zip(views).all(|(slot, v)| slot.admits(&v[idx]))
        });
        if let Some(t) = target {
            for (slot, v) in slots[t].iter_mut().zip(views) {
                slot.add(idx, &v[idx]);
            }
            placed += 1;
        }
    }
    if placed < needed {
        return Err(PipelineError::InsufficientPool { language: language.clone(), needed, available: placed });
    }
    Ok(slots.into_iter().map(|mut per_lang| per_lang.swap_remove(0).ids).collect())
}

/// Samples `bucket_count × bucket_size` examples into disjoint buckets
/// without repeated questions or contexts inside a bucket.
pub fn build_buckets(pool: &[Example], cfg: &PipelineConfig) -> Result<Vec<Bucket>, PipelineError> {
    let language = pool.first().map(|e| e.language.clone()).unwrap_or_else(|| Lang::new("und"));
    let parts = assign(&[pool], cfg, &language)?;
    Ok(parts
        .into_iter()
        .enumerate()
        .map(|(index, ids)| Bucket {
            language: language.clone(),
            index,
            examples: ids.into_iter().map(|i| pool[i].clone()).collect(),
        })
        .collect())
}

/// Buckets every language with one shared id partition. Pools must hold the
/// same ids; they are aligned by id before sampling.
pub fn build_parallel_buckets(
    pools: &BTreeMap<Lang, Vec<Example>>,
    cfg: &PipelineConfig,
) -> Result<BTreeMap<Lang, Vec<Bucket>>, PipelineError> {
    let mut sorted: BTreeMap<&Lang, Vec<&Example>> = BTreeMap::new();
    for (lang, pool) in pools {
        let mut v: Vec<&Example> = pool.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        sorted.insert(lang, v);
    }
    let Some(first) = sorted.values().next() else {
        return Ok(BTreeMap::new());
    };
    let ids: Vec<&str> = first.iter().map(|e| e.id.as_str()).collect();
    for (lang, v) in &sorted {
        if v.iter().map(|e| e.id.as_str()).ne(ids.iter().copied()) {
            return Err(PipelineError::NotAligned((*lang).clone()));
        }
    }
    let owned: Vec<Vec<Example>> = sorted.values().map(|v| v.iter().map(|e| (*e).clone()).collect()).collect();
    let views: Vec<&[Example]> = owned.iter().map(Vec::as_slice).collect();
    let label = Lang::new(sorted.keys().map(|l| l.as_str()).collect::<Vec<_>>().join("+"));
    let parts = assign(&views, cfg, &label)?;
    Ok(sorted
        .keys()
        .zip(&owned)
        .map(|(lang, pool)| {
            let buckets = parts
                .iter()
                .enumerate()
                .map(|(index, ids)| Bucket {
                    language: (*lang).clone(),
                    index,
                    examples: ids.iter().map(|&i| pool[i].clone()).collect(),
                })
                .collect();
            ((*lang).clone(), buckets)
        })
        .collect())
}

/// One line of a bucket file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketRecord {
    pub language: Lang,
    pub bucket_index: usize,
    pub id: String,
    pub context: String,
    pub question: String,
    pub answers: Vec<String>,
    #[serde(default = "default_task")]
    pub task: Task,
    #[serde(default, skip_serializing_if = "Extras::is_empty")]
    pub extras: Extras,
}

fn default_task() -> Task {
    Task::Qa
}

impl BucketRecord {
    pub fn new(bucket: &Bucket, ex: &Example) -> Self {
        Self {
            language: bucket.language.clone(),
            bucket_index: bucket.index,
            id: ex.id.clone(),
            context: ex.context.clone(),
            question: ex.question.clone(),
            answers: ex.gold_answers.clone(),
            task: ex.task,
            extras: ex.extras.clone(),
        }
    }

    pub fn into_example(self) -> Example {
        Example {
            id: self.id,
            language: self.language,
            task: self.task,
            context: self.context,
            question: self.question,
            gold_answers: self.answers,
            extras: self.extras,
        }
    }
}

pub fn write_buckets_jsonl(path: &Path, buckets: &[Bucket]) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for b in buckets {
        for ex in &b.examples {
            let line = serde_json::to_string(&BucketRecord::new(b, ex)).expect("bucket record serializes");
            writeln!(out, "{line}").map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Reads a bucket file back. Buckets come out ordered by language, then
/// index; examples keep their file order.
pub fn read_buckets_jsonl(path: &Path) -> Result<Vec<Bucket>, PipelineError> {
    let io = |e: std::io::Error| PipelineError::Io(format!("{}: {e}", path.display()));
    let file = std::io::BufReader::new(std::fs::File::open(path).map_err(io)?);
    let mut by_slot: BTreeMap<(Lang, usize), Bucket> = BTreeMap::new();
    for (n, line) in file.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: BucketRecord = serde_json::from_str(&line)
            .map_err(|e| PipelineError::Io(format!("{}:{}: {e}", path.display(), n + 1)))?;
        by_slot
            .entry((rec.language.clone(), rec.bucket_index))
            .or_insert_with(|| Bucket { language: rec.language.clone(), index: rec.bucket_index, examples: Vec::new() })
            .examples
            .push(rec.into_example());
    }
    Ok(by_slot.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(n: usize) -> Vec<Example> {
        (0..n)
            .map(|i| Example {
                id: format!("id{i:03}"),
                language: Lang::new("de"),
                task: Task::Qa,
                context: format!("Kontext {}", i / 2),
                question: format!("Frage {i}?"),
                gold_answers: vec!["Kontext".into()],
                extras: Extras::default(),
            })
            .collect()
    }

    fn cfg(b: usize, s: usize) -> PipelineConfig {
        PipelineConfig { bucket_count: b, bucket_size: s, ..Default::default() }
    }

    #[test]
    fn defaults_give_fifty() {
        let buckets = build_buckets(&pool(120), &PipelineConfig::default()).unwrap();
        assert_eq!(buckets.len(), 5);
        assert_eq!(buckets.iter().map(|b| b.examples.len()).sum::<usize>(), 50);
    }

    #[test]
    fn exact_pool_used_once() {
        // distinct contexts so every item can be placed
        let mut p = pool(12);
        for (i, e) in p.iter_mut().enumerate() {
            e.context = format!("c{i}");
        }
        let buckets = build_buckets(&p, &cfg(3, 4)).unwrap();
        let mut ids: Vec<_> = buckets.iter().flat_map(|b| b.examples.iter().map(|e| e.id.clone())).collect();
        ids.sort();
        assert_eq!(ids, p.iter().map(|e| e.id.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn shortfall_reported() {
        let err = build_buckets(&pool(7), &cfg(2, 4)).unwrap_err();
        assert_eq!(err.to_string(), "pool for de has 7 usable examples, 8 needed (short by 1)");
    }

    #[test]
    fn no_repeated_context_in_bucket() {
        for b in build_buckets(&pool(60), &cfg(5, 10)).unwrap() {
            let ctx: HashSet<_> = b.examples.iter().map(|e| &e.context).collect();
            assert_eq!(ctx.len(), b.examples.len());
        }
    }

    #[test]
    fn seeded() {
        let p = pool(80);
        let a = build_buckets(&p, &cfg(4, 5)).unwrap();
        assert_eq!(a, build_buckets(&p, &cfg(4, 5)).unwrap());
        let other = PipelineConfig { rng_seed: 99, ..cfg(4, 5) };
        assert_ne!(a, build_buckets(&p, &other).unwrap());
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("de.jsonl");
        let buckets = build_buckets(&pool(40), &cfg(2, 3)).unwrap();
        write_buckets_jsonl(&path, &buckets).unwrap();
        assert_eq!(read_buckets_jsonl(&path).unwrap(), buckets);
        let first = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
        for key in ["language", "bucket_index", "id", "context", "question", "answers"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Example, ParallelCorpus, Task};
use crate::lang::Lang;
use crate::text::{dedup_key, nfc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropRule {
    QualityBelowThreshold,
    NotParallel,
    AnswerNotInContext,
    DuplicateQuestion,
    DuplicateContext,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Drop {
    pub id: String,
    pub language: Lang,
    pub rule: DropRule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    pub drops: Vec<Drop>,
}

impl DropReport {
    pub fn is_empty(&self) -> bool {
        self.drops.is_empty()
    }

    pub fn push(&mut self, id: &str, language: &Lang, rule: DropRule) {
        self.drops.push(Drop { id: id.to_string(), language: language.clone(), rule });
    }

    pub fn count(&self, rule: DropRule) -> usize {
        self.drops.iter().filter(|d| d.rule == rule).count()
    }

    pub fn extend(&mut self, other: DropReport) {
        self.drops.extend(other.drops);
    }
}

/// QA answers must occur verbatim (after NFC) in their context.
pub fn answer_in_context(ex: &Example) -> bool {
    if ex.task != Task::Qa {
        return true;
    }
    let answer = nfc(ex.primary_answer());
    !answer.is_empty() && nfc(&ex.context).contains(&answer)
}

/// Applies the parallel-id, answer-in-context and duplicate-question rules
/// in that order. Duplicate contexts are handled when bucketing.
pub fn filter_candidates(pool: Vec<Example>, corpus: &ParallelCorpus) -> (Vec<Example>, DropReport) {
    let mut report = DropReport::default();
    let mut questions = HashSet::new();
    let mut kept = Vec::with_capacity(pool.len());
    for ex in pool {
        if !corpus.contains_id(&ex.id) {
            report.push(&ex.id, &ex.language, DropRule::NotParallel);
            continue;
        }
        if !answer_in_context(&ex) {
            report.push(&ex.id, &ex.language, DropRule::AnswerNotInContext);
            continue;
        }
        if !ex.question.trim().is_empty() && !questions.insert(dedup_key(&ex.question)) {
            report.push(&ex.id, &ex.language, DropRule::DuplicateQuestion);
            continue;
        }
        kept.push(ex);
    }
    (kept, report)
}

/// Filters every language and keeps only ids that survive in all of them.
pub fn filter_parallel(
    pools: BTreeMap<Lang, Vec<Example>>,
    corpus: &ParallelCorpus,
) -> (BTreeMap<Lang, Vec<Example>>, DropReport) {
    let mut report = DropReport::default();
    let mut filtered = BTreeMap::new();
    for (lang, pool) in pools {
        let (kept, r) = filter_candidates(pool, corpus);
        report.extend(r);
        filtered.insert(lang, kept);
    }
    let mut common: Option<BTreeSet<String>> = None;
    for kept in filtered.values() {
        let ids: BTreeSet<String> = kept.iter().map(|e| e.id.clone()).collect();
        common = Some(match common {
            None => ids,
            Some(c) => c.intersection(&ids).cloned().collect(),
        });
    }
    let common = common.unwrap_or_default();
    for (lang, kept) in filtered.iter_mut() {
        kept.retain(|e| {
            let keep = common.contains(&e.id);
            if !keep {
                report.push(&e.id, lang, DropRule::NotParallel);
            }
            keep
        });
    }
    (filtered, report)
}

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{CorpusError, Example, Task};
use crate::lang::Lang;

/// Examples for several languages over one shared id space. Every language
/// holds the same ids, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    pub task: Task,
    by_language: BTreeMap<Lang, Vec<Example>>,
    ids: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParallelismReport {
    /// Dropped id → languages it was missing from.
    pub dropped: BTreeMap<String, Vec<Lang>>,
}

impl ParallelismReport {
    pub fn is_empty(&self) -> bool {
        self.dropped.is_empty()
    }
}

impl ParallelCorpus {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn languages(&self) -> impl Iterator<Item = &Lang> {
        self.by_language.keys()
    }

    pub fn examples(&self, lang: &Lang) -> Option<&[Example]> {
        self.by_language.get(lang).map(Vec::as_slice)
    }

    pub fn get(&self, lang: &Lang, id: &str) -> Option<&Example> {
        let examples = self.by_language.get(lang)?;
        examples
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &examples[i])
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).is_ok()
    }

    pub fn by_language(&self) -> &BTreeMap<Lang, Vec<Example>> {
        &self.by_language
    }

    pub fn into_by_language(self) -> BTreeMap<Lang, Vec<Example>> {
        self.by_language
    }

    /// Keeps only `keep` ids in every language.
    pub fn retain_ids(&mut self, keep: &BTreeSet<String>) {
        self.ids.retain(|id| keep.contains(id));
        for examples in self.by_language.values_mut() {
            examples.retain(|e| keep.contains(&e.id));
        }
    }
}

/// Restricts every language to the ids present in all of them.
pub fn validate_parallelism(
    per_language: BTreeMap<Lang, Vec<Example>>,
) -> Result<(ParallelCorpus, ParallelismReport), CorpusError> {
    if per_language.len() < 2 {
        return Err(CorpusError::TooFewLanguages(per_language.len()));
    }

    let mut task: Option<Task> = None;
    let mut id_sets: BTreeMap<&Lang, BTreeSet<&str>> = BTreeMap::new();
    for (lang, examples) in &per_language {
        for e in examples {
            match task {
                None => task = Some(e.task),
                Some(t) if t != e.task => {
                    return Err(CorpusError::MixedTasks {
                        language: lang.clone(),
                        first: t,
                        second: e.task,
                    })
                }
                _ => {}
            }
        }
        id_sets.insert(lang, examples.iter().map(|e| e.id.as_str()).collect());
    }

    let all_ids: BTreeSet<&str> = id_sets.values().flatten().copied().collect();
    let mut shared = BTreeSet::new();
    let mut report = ParallelismReport::default();
    for id in all_ids {
        let missing: Vec<Lang> = id_sets
            .iter()
            .filter(|(_, ids)| !ids.contains(id))
            .map(|(l, _)| (*l).clone())
            .collect();
        if missing.is_empty() {
            shared.insert(id.to_string());
        } else {
            report.dropped.insert(id.to_string(), missing);
        }
    }
    if shared.is_empty() {
        let langs: Vec<_> = per_language.keys().map(Lang::to_string).collect();
        return Err(CorpusError::NoSharedIds(langs.join(", ")));
    }

    let mut by_language = BTreeMap::new();
    for (lang, examples) in per_language {
        let mut first: HashMap<String, Example> = HashMap::new();
        for e in examples {
            if shared.contains(&e.id) && !first.contains_key(&e.id) {
                first.insert(e.id.clone(), e);
            }
        }
        let mut kept: Vec<Example> = first.into_values().collect();
        kept.sort_by(|a, b| a.id.cmp(&b.id));
        by_language.insert(lang, kept);
    }

    Ok((
        ParallelCorpus {
            task: task.expect("non-empty corpus has a task"),
            by_language,
            ids: shared.into_iter().collect(),
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Extras;
    use proptest::prelude::*;

    fn ex(lang: &str, id: &str) -> Example {
        Example {
            id: id.into(),
            language: Lang::new(lang),
            task: Task::Qa,
            context: format!("ctx {id}"),
            question: format!("q {id}"),
            gold_answers: vec![id.into()],
            extras: Extras::default(),
        }
    }

    fn sets(spec: &[(&str, &[&str])]) -> BTreeMap<Lang, Vec<Example>> {
        spec.iter()
            .map(|(l, ids)| (Lang::new(l), ids.iter().map(|i| ex(l, i)).collect()))
            .collect()
    }

    #[test]
    fn identical_sets_drop_nothing() {
        let (c, r) = validate_parallelism(sets(&[("en", &["b", "a"]), ("de", &["a", "b"])])).unwrap();
        assert!(r.is_empty());
        assert_eq!(c.ids(), &["a".to_string(), "b".to_string()]);
        assert_eq!(c.examples(&Lang::new("en")).unwrap()[0].id, "a");
    }

    #[test]
    fn missing_id_dropped_from_all() {
        let (c, r) =
            validate_parallelism(sets(&[("en", &["a", "x"]), ("de", &["a"])])).unwrap();
        assert_eq!(c.ids(), &["a".to_string()]);
        assert_eq!(r.dropped.get("x"), Some(&vec![Lang::new("de")]));
        assert!(c.get(&Lang::new("en"), "x").is_none());
    }

    #[test]
    fn disjoint_is_error() {
        assert!(matches!(
            validate_parallelism(sets(&[("en", &["a"]), ("de", &["b"])])),
            Err(CorpusError::NoSharedIds(_))
        ));
    }

    #[test]
    fn single_language_rejected() {
        assert!(matches!(
            validate_parallelism(sets(&[("en", &["a"])])),
            Err(CorpusError::TooFewLanguages(1))
        ));
    }

    proptest! {
        #[test]
        fn survivors_equal_intersection_and_idempotent(
            a in proptest::collection::btree_set(0u8..20, 1..15),
            b in proptest::collection::btree_set(0u8..20, 1..15),
            c in proptest::collection::btree_set(0u8..20, 1..15),
        ) {
            let mk = |lang: &str, s: &BTreeSet<u8>| -> Vec<Example> {
                s.iter().rev().map(|i| ex(lang, &format!("{i:02}"))).collect()
            };
            let mut input = BTreeMap::new();
            input.insert(Lang::new("en"), mk("en", &a));
            input.insert(Lang::new("de"), mk("de", &b));
            input.insert(Lang::new("zh"), mk("zh", &c));
            let brute: BTreeSet<String> = (0u8..20)
                .filter(|i| a.contains(i) && b.contains(i) && c.contains(i))
                .map(|i| format!("{i:02}"))
                .collect();
            match validate_parallelism(input) {
                Ok((corpus, _)) => {
                    let got: BTreeSet<String> = corpus.ids().iter().cloned().collect();
                    prop_assert_eq!(&got, &brute);
                    let again = validate_parallelism(corpus.by_language().clone()).unwrap();
                    prop_assert!(again.1.is_empty());
                    prop_assert_eq!(again.0, corpus);
                }
                Err(CorpusError::NoSharedIds(_)) => prop_assert!(brute.is_empty()),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::lang::Lang;

const BLOOM: &str = include_str!("../../data/profiles/bloom.jsonl");
const XGLM: &str = include_str!("../../data/profiles/xglm.jsonl");

/// One line of a profile file. Rows without `iso` (code, romanized or
/// unassigned text) only count toward the family total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub iso: Option<String>,
    #[serde(default)]
    pub model_family: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub gib: Option<f64>,
    #[serde(default)]
    pub seen: Option<bool>,
    #[serde(default)]
    pub proximity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub iso: Lang,
    pub seen: BTreeMap<String, bool>,
    pub corpus_gib: BTreeMap<String, f64>,
    pub proportion: BTreeMap<String, f64>,
    /// Genetic proximity to English, 0–100.
    pub proximity_to_en: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Profiles {
    by_iso: BTreeMap<Lang, LanguageProfile>,
    family_totals: BTreeMap<String, f64>,
    explicit_seen: BTreeMap<(Lang, String), bool>,
}

/// Codes folded together: the BLOOM table lists Chinese by script.
fn canonical_iso(iso: &str) -> Lang {
    match iso.trim().to_ascii_lowercase().as_str() {
        "zhs" | "zht" | "zh-hans" | "zh-hant" => Lang::new("zh"),
        other => Lang::new(other),
    }
}

impl Profiles {
    /// Corpus tables shipped with the crate (BLOOM and XGLM).
    pub fn builtin() -> Self {
        let mut p = Profiles::default();
        p.add_jsonl(BLOOM).expect("shipped BLOOM profile parses");
        p.add_jsonl(XGLM).expect("shipped XGLM profile parses");
        p
    }

    pub fn from_records(records: impl IntoIterator<Item = ProfileRecord>) -> Result<Self, AnalysisError> {
        let mut p = Profiles::default();
        p.add_records(records)?;
        Ok(p)
    }

    pub fn add_jsonl(&mut self, raw: &str) -> Result<(), AnalysisError> {
        let mut records = Vec::new();
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            records.push(
                serde_json::from_str(line)
                    .map_err(|e| AnalysisError::Data(format!("line {}: {e}", i + 1)))?,
            );
        }
        self.add_records(records)
    }

    pub fn add_file(&mut self, path: &Path) -> Result<(), AnalysisError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| AnalysisError::Data(format!("{}: {e}", path.display())))?;
        self.add_jsonl(&raw)
            .map_err(|e| AnalysisError::Data(format!("{}: {e}", path.display())))
    }

    pub fn add_records(&mut self, records: impl IntoIterator<Item = ProfileRecord>) -> Result<(), AnalysisError> {
        for r in records {
            if let Some(p) = r.proximity {
                if !(0.0..=100.0).contains(&p) {
                    return Err(AnalysisError::Data(format!("proximity {p} outside [0, 100]")));
                }
            }
            let gib = r.gib.unwrap_or(0.0);
            if gib < 0.0 {
                return Err(AnalysisError::Data(format!("negative size {gib}")));
            }
            if let Some(family) = &r.model_family {
                *self.family_totals.entry(family.to_ascii_lowercase()).or_default() += gib;
            }
            let Some(iso) = r.iso.as_deref() else { continue };
            let lang = canonical_iso(iso);
            let profile = self.by_iso.entry(lang.clone()).or_insert_with(|| LanguageProfile {
                iso: lang.clone(),
                seen: BTreeMap::new(),
                corpus_gib: BTreeMap::new(),
                proportion: BTreeMap::new(),
                proximity_to_en: None,
            });
            if let Some(p) = r.proximity {
                profile.proximity_to_en = Some(p);
            }
            if let Some(family) = &r.model_family {
                let family = family.to_ascii_lowercase();
                *profile.corpus_gib.entry(family.clone()).or_default() += gib;
                if let Some(seen) = r.seen {
                    self.explicit_seen.insert((lang.clone(), family), seen);
                }
            }
        }
        self.refresh();
        Ok(())
    }

    fn refresh(&mut self) {
        for (lang, profile) in self.by_iso.iter_mut() {
            for family in self.family_totals.keys() {
                let gib = profile.corpus_gib.get(family).copied().unwrap_or(0.0);
                let seen = self
                    .explicit_seen
                    .get(&(lang.clone(), family.clone()))
                    .copied()
                    .unwrap_or(gib > 0.0);
                profile.seen.insert(family.clone(), seen);
                let total = self.family_totals[family];
                let share = if total > 0.0 { gib / total } else { 0.0 };
                profile.proportion.insert(family.clone(), share);
            }
        }
    }

    pub fn get(&self, lang: &Lang) -> Option<&LanguageProfile> {
        self.by_iso.get(lang)
    }

    pub fn families(&self) -> impl Iterator<Item = &str> {
        self.family_totals.keys().map(String::as_str)
    }

    pub fn family_total(&self, family: &str) -> Option<f64> {
        self.family_totals.get(&family.to_ascii_lowercase()).copied()
    }

    pub fn languages(&self) -> impl Iterator<Item = &Lang> {
        self.by_iso.keys()
    }

    pub(crate) fn require(&self, lang: &Lang) -> Result<&LanguageProfile, AnalysisError> {
        self.get(lang).ok_or_else(|| AnalysisError::MissingProfile(lang.clone()))
    }

    pub(crate) fn require_family(&self, family: &str) -> Result<String, AnalysisError> {
        let f = family.to_ascii_lowercase();
        if self.family_totals.contains_key(&f) {
            Ok(f)
        } else {
            Err(AnalysisError::UnknownFamily(family.to_string()))
        }
    }
}

/// Splits `targets` into languages seen and unseen during pre-training of
/// `family`.
pub fn group_languages(
    profiles: &Profiles,
    family: &str,
    targets: &[Lang],
) -> Result<(BTreeSet<Lang>, BTreeSet<Lang>), AnalysisError> {
    let family = profiles.require_family(family)?;
    let mut seen = BTreeSet::new();
    let mut unseen = BTreeSet::new();
    for t in targets {
        let p = profiles.require(t)?;
        if p.seen.get(&family).copied().unwrap_or(false) {
            seen.insert(t.clone());
        } else {
            unseen.insert(t.clone());
        }
    }
    Ok((seen, unseen))
}

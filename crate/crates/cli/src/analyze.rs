//! Transfer gaps and correlations from a method-by-language score table.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clt_core::analysis::{
    correlation_report, group_languages, AnalysisError, CorrelationReport, Profiles, ScoreTable, TransferGapRecord,
    XAxis,
};
use clt_core::{Lang, Real};

#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    /// Languages to group and correlate. Defaults to every table column
    /// except the source.
    pub languages: Option<Vec<Lang>>,
    /// Left out of correlations only.
    pub exclusions: BTreeSet<Lang>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub model: String,
    pub method: String,
    pub report: CorrelationReport<Real>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisOutput {
    pub gaps: Vec<TransferGapRecord<Real>>,
    pub correlations: Vec<Correlation>,
}

pub fn load_profiles(extra: &[PathBuf]) -> Result<Profiles, AnalysisError> {
    let mut p = Profiles::builtin();
    for path in extra {
        p.add_file(path)?;
    }
    Ok(p)
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c.to_ascii_lowercase() } else { '-' })
        .collect()
}

/// Seen/unseen gap rows and per-language correlations for every model with
/// a known family and every method other than MONO.
pub fn analyze_table(
    table: &ScoreTable<Real>,
    families: &BTreeMap<String, String>,
    profiles: &Profiles,
    source: &Lang,
    opts: &AnalyzeOptions,
) -> Result<AnalysisOutput, AnalysisError> {
    let languages: Vec<Lang> = match &opts.languages {
        Some(l) => l.clone(),
        None => table.columns.iter().filter(|l| *l != source).cloned().collect(),
    };
    let mut out = AnalysisOutput::default();
    for model in table.models() {
        let Some(family) = families.get(model) else {
            log::info!("{model}: no model family, skipping analysis");
            continue;
        };
        if table.get(model, "MONO", source).is_none() {
            log::warn!("{model}: no MONO {source} score, skipping analysis");
            continue;
        }
        let (seen, unseen) = group_languages(profiles, family, &languages)?;
        let mut methods: Vec<&str> = Vec::new();
        for row in table.rows.iter().filter(|r| r.model == model && r.method != "MONO") {
            if !methods.contains(&row.method.as_str()) {
                methods.push(&row.method);
            }
        }
        for method in methods {
            for (name, group) in [("seen", &seen), ("unseen", &unseen)] {
                if group.is_empty() {
                    continue;
                }
                let langs: Vec<Lang> = group.iter().cloned().collect();
                out.gaps.push(table.group_gap(model, method, name, &langs)?);
            }
            let per_lang = table.language_gaps(model, method, &languages)?;
            for axis in [XAxis::Proportion, XAxis::Proximity] {
                match correlation_report(&per_lang, profiles, family, axis, &opts.exclusions) {
                    Ok(report) => out.correlations.push(Correlation {
                        model: model.to_string(),
                        method: method.to_string(),
                        report,
                    }),
                    Err(e @ (AnalysisError::MissingValue(..) | AnalysisError::ZeroVariance(_) | AnalysisError::TooFewPairs(_))) => {
                        log::info!("{model} {method} vs {}: {e}", axis.label());
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

/// One row per (model, method, group): `mean (gap)` as in a seen/unseen
/// gap table.
pub fn gap_table_tsv(gaps: &[TransferGapRecord<Real>]) -> String {
    let mut out = String::from("model\tmethod\tgroup\tlanguages\ten_mono\tmean (gap)\n");
    for g in gaps {
        let langs: Vec<&str> = g.languages.iter().map(Lang::as_str).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.2}\t{}\n",
            g.model,
            g.method,
            g.group,
            langs.join(","),
            g.en_mono,
            g.display()
        ));
    }
    out
}

/// Writes `<prefix>gaps.tsv` plus a scatter TSV and SVG per correlation.
pub fn write_analysis(dir: &Path, prefix: &str, out: &AnalysisOutput) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let gaps = dir.join(format!("{prefix}gaps.tsv"));
    std::fs::write(&gaps, gap_table_tsv(&out.gaps))?;
    written.push(gaps);
    let mut summary = String::from("model\tmethod\tx\tn\tr\texcluded\n");
    for c in &out.correlations {
        let stem = format!("{prefix}{}.{}.{}", slug(&c.model), slug(&c.method), c.report.x_label.label());
        let tsv = dir.join(format!("{stem}.tsv"));
        let svg = dir.join(format!("{stem}.svg"));
        std::fs::write(&tsv, c.report.scatter_tsv())?;
        std::fs::write(&svg, c.report.svg())?;
        written.extend([tsv, svg]);
        let excluded: Vec<&str> = c.report.excluded.iter().map(Lang::as_str).collect();
        summary.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.4}\t{}\n",
            c.model,
            c.method,
            c.report.x_label.label(),
            c.report.pairs.len(),
            c.report.r,
            excluded.join(",")
        ));
    }
    let corr = dir.join(format!("{prefix}correlations.tsv"));
    std::fs::write(&corr, summary)?;
    written.push(corr);
    Ok(written)
}
